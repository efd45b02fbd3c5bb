#pragma once

// Boolean task specifications of the form
//   (visit clauses) & (end clauses) & (negated atoms)
// where each clause is a disjunction of atoms of one kind.
//
// Grammar:
//   spec := 'true' | term ('&' term)* | <empty>
//   term := '!' atom | atom | '(' atom ('|' atom)* ')'
//   atom := 'visit(' name ')' | 'end(' name ')'

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tamp/error.hpp"
#include "tamp/petri_net.hpp"

namespace tamp {

struct BooleanSpec {
  // Each clause holds sorted, distinct proposition names.
  std::vector<std::vector<std::string>> trajectory_clauses;
  std::vector<std::vector<std::string>> final_clauses;
  std::vector<Atom> forbidden;

  bool empty() const { return trajectory_clauses.empty() && final_clauses.empty() && forbidden.empty(); }

  friend bool operator==(const BooleanSpec&, const BooleanSpec&) = default;
};

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  BooleanSpec parse() {
    skip_ws();
    if (at_end()) return {};
    if (text_.substr(pos_).starts_with("true")) {
      std::size_t save = pos_;
      pos_ += 4;
      skip_ws();
      if (at_end()) return {};
      pos_ = save;
    }
    BooleanSpec spec;
    term(spec);
    skip_ws();
    while (!at_end()) {
      expect('&');
      term(spec);
      skip_ws();
    }
    return spec;
  }

 private:
  struct ParsedAtom {
    Atom atom;
    std::size_t pos;
  };

  bool at_end() const { return pos_ >= text_.size(); }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return at_end() ? '\0' : text_[pos_];
  }

  void expect(char c) {
    skip_ws();
    if (at_end()) throw SyntaxError(pos_, std::string("expected '") + c + "', found end of input");
    if (text_[pos_] != c)
      throw SyntaxError(pos_, std::string("expected '") + c + "', found '" + text_[pos_] + "'");
    ++pos_;
  }

  static bool name_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != '&' && c != '|' && c != '!';
  }

  ParsedAtom atom() {
    skip_ws();
    std::size_t start = pos_;
    AtomKind kind;
    if (text_.substr(pos_).starts_with("visit")) {
      kind = AtomKind::kVisit;
      pos_ += 5;
    } else if (text_.substr(pos_).starts_with("end")) {
      kind = AtomKind::kEnd;
      pos_ += 3;
    } else {
      throw SyntaxError(pos_, "expected 'visit(' or 'end('");
    }
    expect('(');
    skip_ws();
    std::size_t name_start = pos_;
    while (!at_end() && name_char(text_[pos_])) ++pos_;
    if (pos_ == name_start) throw SyntaxError(pos_, "expected a proposition name");
    std::string name(text_.substr(name_start, pos_ - name_start));
    expect(')');
    return {{kind, std::move(name)}, start};
  }

  void term(BooleanSpec& spec) {
    char c = peek();
    if (c == '!') {
      std::size_t bang = pos_++;
      if (peek() == '(') throw ShapeError(bang, "negation applies to a single atom only");
      ParsedAtom a = atom();
      check_not_positive(a);
      negatives_.push_back(a);
      if (std::find(spec.forbidden.begin(), spec.forbidden.end(), a.atom) == spec.forbidden.end())
        spec.forbidden.push_back(a.atom);
      return;
    }
    if (c == '(') {
      ++pos_;
      std::vector<ParsedAtom> atoms;
      if (peek() == '!') throw ShapeError(pos_, "negation inside a disjunction");
      atoms.push_back(atom());
      while (peek() == '|') {
        ++pos_;
        if (peek() == '!') throw ShapeError(pos_, "negation inside a disjunction");
        atoms.push_back(atom());
      }
      expect(')');
      add_clause(spec, atoms);
      return;
    }
    if (at_end()) throw SyntaxError(pos_, "expected a term, found end of input");
    std::vector<ParsedAtom> atoms{atom()};
    add_clause(spec, atoms);
  }

  void add_clause(BooleanSpec& spec, const std::vector<ParsedAtom>& atoms) {
    AtomKind kind = atoms.front().atom.kind;
    std::vector<std::string> names;
    for (const auto& a : atoms) {
      if (a.atom.kind != kind) throw ShapeError(a.pos, "clause mixes visit and end atoms");
      check_not_negated(a);
      positives_.push_back(a);
      names.push_back(a.atom.name);
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    (kind == AtomKind::kVisit ? spec.trajectory_clauses : spec.final_clauses).push_back(std::move(names));
  }

  void check_not_positive(const ParsedAtom& a) const {
    for (const auto& p : positives_)
      if (p.atom == a.atom) throw ShapeError(a.pos, to_string(a.atom) + " is both required and forbidden");
  }
  void check_not_negated(const ParsedAtom& a) const {
    for (const auto& n : negatives_)
      if (n.atom == a.atom) throw ShapeError(a.pos, to_string(a.atom) + " is both required and forbidden");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<ParsedAtom> positives_;
  std::vector<ParsedAtom> negatives_;
};

}  // namespace detail

inline BooleanSpec parse_spec(std::string_view text) { return detail::SpecParser(text).parse(); }

inline std::string print_spec(const BooleanSpec& spec) {
  if (spec.empty()) return "true";
  std::vector<std::string> terms;
  auto clause = [&](const std::vector<std::string>& names, AtomKind kind) {
    if (names.size() == 1) {
      terms.push_back(to_string(Atom{kind, names[0]}));
      return;
    }
    std::string s = "(";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) s += " | ";
      s += to_string(Atom{kind, names[i]});
    }
    terms.push_back(s + ")");
  };
  for (const auto& c : spec.trajectory_clauses) clause(c, AtomKind::kVisit);
  for (const auto& c : spec.final_clauses) clause(c, AtomKind::kEnd);
  for (const Atom& a : spec.forbidden) terms.push_back("!" + to_string(a));
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += " & ";
    out += terms[i];
  }
  return out;
}

// Indicator vectors over the places of a monitored net.
struct SpecVectors {
  std::vector<std::vector<std::uint8_t>> z;  // one per visit clause
  std::vector<std::vector<std::uint8_t>> d;  // one per end clause
  std::vector<std::uint8_t> g;
};

inline std::int64_t dot(std::span<const std::uint8_t> v, std::span<const Count> m) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) s += m[i];
  return s;
}

// `indicator_of` maps each visit proposition to its indicating place; end
// atoms bind to every place of `net` whose labels carry them.
inline SpecVectors compile_vectors(const BooleanSpec& spec, const PetriNet& net,
                                   const std::map<std::string, PlaceId>& indicator_of) {
  const std::size_t n = net.place_count();
  auto indicator = [&](const std::string& name) -> PlaceId {
    auto it = indicator_of.find(name);
    if (it == indicator_of.end()) throw UnknownPropositionError(to_string(Atom{AtomKind::kVisit, name}));
    if (it->second >= n) throw DomainError("indicator place out of range for " + name);
    return it->second;
  };
  auto mark_end = [&](std::vector<std::uint8_t>& v, const std::string& name) {
    Atom a{AtomKind::kEnd, name};
    bool bound = false;
    for (PlaceId p = 0; p < n; ++p)
      if (contains(net.labels(p), a)) {
        v[p] = 1;
        bound = true;
      }
    if (!bound) throw UnknownPropositionError(to_string(a));
  };

  SpecVectors out;
  for (const auto& clause : spec.trajectory_clauses) {
    std::vector<std::uint8_t> z(n, 0);
    for (const auto& name : clause) z[indicator(name)] = 1;
    out.z.push_back(std::move(z));
  }
  for (const auto& clause : spec.final_clauses) {
    std::vector<std::uint8_t> d(n, 0);
    for (const auto& name : clause) mark_end(d, name);
    out.d.push_back(std::move(d));
  }
  out.g.assign(n, 0);
  for (const Atom& a : spec.forbidden) {
    if (a.kind == AtomKind::kVisit)
      out.g[indicator(a.name)] = 1;
    else
      mark_end(out.g, a.name);
  }
  return out;
}

// Visit atoms seen anywhere along the run (including the start) and end atoms
// of places occupied at the final marking.
inline LabelSet satisfied_atoms(const PropositionWord& word, const Marking& final_marking, const PetriNet& net) {
  LabelSet out;
  auto take_visits = [&](const LabelSet& letter) {
    for (const Atom& a : letter)
      if (a.kind == AtomKind::kVisit) out.push_back(a);
  };
  take_visits(word.initial);
  for (const auto& letter : word.steps) take_visits(letter);
  for (const Atom& a : occupied_labels(net, final_marking))
    if (a.kind == AtomKind::kEnd) out.push_back(a);
  normalize(out);
  return out;
}

// Semantic truth of `spec` for a run with proposition word `word` ending in
// `final_marking` of `net`.
inline bool holds(const BooleanSpec& spec, const PropositionWord& word, const Marking& final_marking,
                  const PetriNet& net) {
  const LabelSet atoms = satisfied_atoms(word, final_marking, net);
  auto any_of = [&](const std::vector<std::string>& clause, AtomKind kind) {
    for (const auto& name : clause)
      if (contains(atoms, Atom{kind, name})) return true;
    return false;
  };
  for (const auto& c : spec.trajectory_clauses)
    if (!any_of(c, AtomKind::kVisit)) return false;
  for (const auto& c : spec.final_clauses)
    if (!any_of(c, AtomKind::kEnd)) return false;
  for (const Atom& a : spec.forbidden)
    if (contains(atoms, a)) return false;
  return true;
}

}  // namespace tamp
