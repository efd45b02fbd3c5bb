#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

#include "tamp/error.hpp"

namespace tamp {

// Exact transition cost. Integer costs are the common case; rationals keep
// tie-breaking and cache bytes independent of floating point rounding.
using Cost = boost::rational<std::int64_t>;

inline std::string to_string(const Cost& c) {
  if (c.denominator() == 1) return std::to_string(c.numerator());
  return std::to_string(c.numerator()) + "/" + std::to_string(c.denominator());
}

// Accepts "n" or "n/d".
inline Cost parse_cost(std::string_view text) {
  auto parse_int = [&](std::string_view s) -> std::int64_t {
    if (s.empty()) throw ValidationError("", "empty cost component in '" + std::string(text) + "'");
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      i = 1;
    }
    if (i == s.size()) throw ValidationError("", "bad cost '" + std::string(text) + "'");
    std::int64_t v = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw ValidationError("", "bad cost '" + std::string(text) + "'");
      v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Cost(parse_int(text));
  std::int64_t den = parse_int(text.substr(slash + 1));
  if (den == 0) throw ValidationError("", "zero denominator in cost '" + std::string(text) + "'");
  return Cost(parse_int(text.substr(0, slash)), den);
}

struct CostHash {
  std::size_t operator()(const Cost& c) const {
    return std::hash<std::int64_t>{}(c.numerator()) * 31u + std::hash<std::int64_t>{}(c.denominator());
  }
};

}  // namespace tamp
