#pragma once

// Grid environments and their compilation to a movement net: one place per
// free cell (row-major), one transition per directed 4-neighbour adjacency,
// ordered by (source place, direction) with directions up, down, left, right.

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tamp/cost.hpp"
#include "tamp/error.hpp"
#include "tamp/petri_net.hpp"

namespace tamp {

struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline std::string to_string(const Cell& c) {
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

enum class Direction : std::uint8_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

inline constexpr std::array<Direction, 4> kDirections = {Direction::kUp, Direction::kDown, Direction::kLeft,
                                                         Direction::kRight};

inline Cell step(Cell c, Direction d) {
  switch (d) {
    case Direction::kUp: return {c.row - 1, c.col};
    case Direction::kDown: return {c.row + 1, c.col};
    case Direction::kLeft: return {c.row, c.col - 1};
    case Direction::kRight: return {c.row, c.col + 1};
  }
  return c;
}

struct Region {
  std::string name;
  std::vector<Cell> cells;
  std::vector<std::string> trajectory_props;
  std::vector<std::string> final_props;
};

struct Environment {
  int rows = 0;
  int cols = 0;
  std::vector<Cell> obstacles;
  std::vector<Region> regions;
  std::vector<Cell> agents;
  Cost move_cost = 1;
  // Format extension: per-direction costs (up, down, left, right) overriding move_cost.
  std::optional<std::array<Cost, 4>> direction_costs;

  bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols; }
  bool is_obstacle(Cell c) const {
    for (const Cell& o : obstacles)
      if (o == c) return true;
    return false;
  }
  bool is_free(Cell c) const { return in_bounds(c) && !is_obstacle(c); }
  Cost step_cost(Direction d) const {
    return direction_costs ? (*direction_costs)[static_cast<std::size_t>(d)] : move_cost;
  }
  std::size_t free_cell_count() const {
    std::set<Cell> obs(obstacles.begin(), obstacles.end());
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) - obs.size();
  }
};

inline void validate(const Environment& env) {
  if (env.rows <= 0 || env.cols <= 0) throw ValidationError("grid", "rows and cols must be positive");
  if (env.move_cost <= 0) throw ValidationError("move_cost", "must be positive");
  if (env.direction_costs)
    for (const Cost& c : *env.direction_costs)
      if (c <= 0) throw ValidationError("direction_costs", "must be positive");
  for (std::size_t i = 0; i < env.obstacles.size(); ++i)
    if (!env.in_bounds(env.obstacles[i]))
      throw ValidationError("obstacles[" + std::to_string(i) + "]", "cell " + to_string(env.obstacles[i]) +
                                                                        " out of bounds");
  for (std::size_t i = 0; i < env.agents.size(); ++i) {
    const std::string where = "agents[" + std::to_string(i) + "]";
    if (!env.in_bounds(env.agents[i]))
      throw ValidationError(where, "cell " + to_string(env.agents[i]) + " out of bounds");
    if (env.is_obstacle(env.agents[i]))
      throw ValidationError(where, "agent on obstacle " + to_string(env.agents[i]));
  }
  std::set<std::string> names;
  for (std::size_t r = 0; r < env.regions.size(); ++r) {
    const Region& reg = env.regions[r];
    const std::string where = "regions[" + std::to_string(r) + "]";
    if (!names.insert(reg.name).second) throw ValidationError(where, "duplicate region name '" + reg.name + "'");
    if (reg.cells.empty()) throw ValidationError(where, "region has no cells");
    for (std::size_t i = 0; i < reg.cells.size(); ++i) {
      const std::string cw = where + ".cells[" + std::to_string(i) + "]";
      if (!env.in_bounds(reg.cells[i])) throw ValidationError(cw, "cell " + to_string(reg.cells[i]) + " out of bounds");
      if (env.is_obstacle(reg.cells[i]))
        throw ValidationError(cw, "region cell on obstacle " + to_string(reg.cells[i]));
    }
    for (const auto* props : {&reg.trajectory_props, &reg.final_props})
      for (const std::string& p : *props)
        if (p.empty()) throw ValidationError(where, "empty proposition name");
  }
}

namespace detail {

inline Cell parse_cell(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ValidationError(where, "expected [row, col] integer pair");
  return {j[0].get<int>(), j[1].get<int>()};
}

inline std::vector<Cell> parse_cells(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where, "expected a list of cells");
  std::vector<Cell> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_cell(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline Cost parse_json_cost(const nlohmann::json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Cost(j.get<std::int64_t>());
    if (j.is_number_float()) {
      double d = j.get<double>();
      if (d == static_cast<double>(static_cast<std::int64_t>(d))) return Cost(static_cast<std::int64_t>(d));
      throw ValidationError(where, "non-integer costs must be given as \"n/d\" strings");
    }
    if (j.is_string()) return parse_cost(j.get<std::string>());
  } catch (const ValidationError& e) {
    if (!e.where().empty()) throw;
    throw ValidationError(where, e.what());
  }
  throw ValidationError(where, "expected a cost (integer or \"n/d\")");
}

inline std::vector<std::string> parse_names(const nlohmann::json& j, const std::string& where) {
  std::vector<std::string> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw ValidationError(where, "expected a list of proposition names");
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_string())
      out.push_back(j[i].get<std::string>());
    else if (j[i].is_number_integer())
      out.push_back(std::to_string(j[i].get<std::int64_t>()));
    else
      throw ValidationError(where + "[" + std::to_string(i) + "]", "proposition name must be a string");
  }
  return out;
}

}  // namespace detail

inline Environment parse_env(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("", "environment must be a JSON object");
  Environment env;
  if (!j.contains("grid") || !j["grid"].is_object()) throw ValidationError("grid", "missing grid{rows,cols}");
  const auto& g = j["grid"];
  if (!g.contains("rows") || !g["rows"].is_number_integer() || !g.contains("cols") || !g["cols"].is_number_integer())
    throw ValidationError("grid", "rows and cols must be integers");
  env.rows = g["rows"].get<int>();
  env.cols = g["cols"].get<int>();
  if (j.contains("connectivity")) {
    if (!j["connectivity"].is_number_integer() || j["connectivity"].get<int>() != 4)
      throw ValidationError("connectivity", "only 4-connected movement is supported");
  }
  if (j.contains("obstacles")) env.obstacles = detail::parse_cells(j["obstacles"], "obstacles");
  if (j.contains("agents")) env.agents = detail::parse_cells(j["agents"], "agents");
  if (j.contains("move_cost")) env.move_cost = detail::parse_json_cost(j["move_cost"], "move_cost");
  if (j.contains("direction_costs")) {
    const auto& dc = j["direction_costs"];
    if (!dc.is_object()) throw ValidationError("direction_costs", "expected {up,down,left,right}");
    std::array<Cost, 4> costs;
    const char* keys[] = {"up", "down", "left", "right"};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!dc.contains(keys[i])) throw ValidationError("direction_costs", std::string("missing '") + keys[i] + "'");
      costs[i] = detail::parse_json_cost(dc[keys[i]], std::string("direction_costs.") + keys[i]);
    }
    for (auto it = dc.begin(); it != dc.end(); ++it)
      if (it.key() != "up" && it.key() != "down" && it.key() != "left" && it.key() != "right")
        throw ValidationError("direction_costs." + it.key(), "unsupported direction (4-connected only)");
    env.direction_costs = costs;
  }
  if (j.contains("regions")) {
    const auto& rs = j["regions"];
    if (!rs.is_array()) throw ValidationError("regions", "expected a list");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::string where = "regions[" + std::to_string(i) + "]";
      const auto& r = rs[i];
      if (!r.is_object()) throw ValidationError(where, "expected an object");
      Region reg;
      if (!r.contains("name")) throw ValidationError(where, "missing name");
      reg.name = r["name"].is_string() ? r["name"].get<std::string>() : r["name"].dump();
      if (!r.contains("cells")) throw ValidationError(where, "missing cells");
      reg.cells = detail::parse_cells(r["cells"], where + ".cells");
      if (r.contains("trajectory_props"))
        reg.trajectory_props = detail::parse_names(r["trajectory_props"], where + ".trajectory_props");
      if (r.contains("final_props")) reg.final_props = detail::parse_names(r["final_props"], where + ".final_props");
      env.regions.push_back(std::move(reg));
    }
  }
  validate(env);
  return env;
}

inline Environment parse_env_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("json byte " + std::to_string(e.byte), e.what());
  }
  return parse_env(j);
}

inline Environment load_env(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string(), "cannot open environment file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_env_text(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + (e.where().empty() ? "" : ": " + e.where()), e.message());
  }
}

inline nlohmann::ordered_json cell_json(Cell c) { return nlohmann::ordered_json::array({c.row, c.col}); }

inline nlohmann::ordered_json cost_json(const Cost& c) {
  if (c.denominator() == 1) return c.numerator();
  return to_string(c);
}

inline nlohmann::ordered_json env_to_json(const Environment& env) {
  nlohmann::ordered_json j;
  j["grid"] = {{"rows", env.rows}, {"cols", env.cols}};
  j["obstacles"] = nlohmann::ordered_json::array();
  for (Cell c : env.obstacles) j["obstacles"].push_back(cell_json(c));
  j["regions"] = nlohmann::ordered_json::array();
  for (const Region& r : env.regions) {
    nlohmann::ordered_json rj;
    rj["name"] = r.name;
    rj["cells"] = nlohmann::ordered_json::array();
    for (Cell c : r.cells) rj["cells"].push_back(cell_json(c));
    rj["trajectory_props"] = r.trajectory_props;
    rj["final_props"] = r.final_props;
    j["regions"].push_back(std::move(rj));
  }
  j["agents"] = nlohmann::ordered_json::array();
  for (Cell c : env.agents) j["agents"].push_back(cell_json(c));
  j["move_cost"] = cost_json(env.move_cost);
  if (env.direction_costs) {
    const auto& d = *env.direction_costs;
    j["direction_costs"] = {{"up", cost_json(d[0])}, {"down", cost_json(d[1])},
                            {"left", cost_json(d[2])}, {"right", cost_json(d[3])}};
  }
  return j;
}

// The movement net together with the cell <-> place correspondence.
struct GridNet {
  PetriNet net;
  int rows = 0;
  int cols = 0;
  std::vector<Cell> place_cell;
  std::vector<std::int32_t> cell_place;  // rows*cols entries, -1 on obstacles
  std::vector<Direction> transition_direction;
  std::vector<PlaceId> agent_places;  // in environment order

  bool has_place(Cell c) const {
    return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols &&
           cell_place[static_cast<std::size_t>(c.row * cols + c.col)] >= 0;
  }
  PlaceId place_at(Cell c) const {
    if (!has_place(c)) throw ValidationError("", "cell " + to_string(c) + " is not a free cell");
    return static_cast<PlaceId>(cell_place[static_cast<std::size_t>(c.row * cols + c.col)]);
  }
  Cell cell_of(PlaceId p) const { return place_cell.at(p); }

  std::optional<TransitionId> move(PlaceId from, PlaceId to) const {
    for (TransitionId t : net.consumers(from))
      if (net.outputs(t)[0] == to) return t;
    return std::nullopt;
  }
};

inline GridNet env_to_pn(const Environment& env) {
  GridNet g;
  g.rows = env.rows;
  g.cols = env.cols;
  g.cell_place.assign(static_cast<std::size_t>(env.rows) * static_cast<std::size_t>(env.cols), -1);

  std::vector<LabelSet> cell_labels(g.cell_place.size());
  for (const Region& r : env.regions)
    for (Cell c : r.cells) {
      auto& l = cell_labels[static_cast<std::size_t>(c.row * env.cols + c.col)];
      for (const auto& p : r.trajectory_props) l.push_back({AtomKind::kVisit, p});
      for (const auto& p : r.final_props) l.push_back({AtomKind::kEnd, p});
    }

  PetriNetBuilder b;
  for (int r = 0; r < env.rows; ++r)
    for (int c = 0; c < env.cols; ++c) {
      Cell cell{r, c};
      if (env.is_obstacle(cell)) continue;
      auto idx = static_cast<std::size_t>(r * env.cols + c);
      g.cell_place[idx] = static_cast<std::int32_t>(b.add_place(cell_labels[idx]));
      g.place_cell.push_back(cell);
    }
  for (PlaceId p = 0; p < g.place_cell.size(); ++p)
    for (Direction d : kDirections) {
      Cell to = step(g.place_cell[p], d);
      if (!g.has_place(to)) continue;
      b.add_transition({p}, {g.place_at(to)}, env.step_cost(d));
      g.transition_direction.push_back(d);
    }
  std::vector<Count> m0(g.place_cell.size(), 0);
  for (Cell a : env.agents) {
    PlaceId p = g.place_at(a);
    g.agent_places.push_back(p);
    ++m0[p];
  }
  for (PlaceId p = 0; p < m0.size(); ++p) b.set_initial(p, m0[p]);
  g.net = std::move(b).build();
  return g;
}

// A team plan at grid level.
struct Plan {
  std::vector<std::vector<Cell>> per_agent_paths;  // each starts at the agent's start cell
  std::vector<TransitionId> team_sequence;         // transition ids of the grid net
  Cost total_cost = 0;
  LabelSet satisfied_atoms;  // visit atoms seen along the run, end atoms occupied at the end
};

inline nlohmann::ordered_json plan_to_json(const Plan& plan) {
  nlohmann::ordered_json j;
  j["total_cost"] = cost_json(plan.total_cost);
  j["agents"] = nlohmann::ordered_json::array();
  for (const auto& path : plan.per_agent_paths) {
    nlohmann::ordered_json a;
    a["start"] = cell_json(path.front());
    a["path"] = nlohmann::ordered_json::array();
    for (Cell c : path) a["path"].push_back(cell_json(c));
    j["agents"].push_back(std::move(a));
  }
  j["team_sequence"] = plan.team_sequence;
  j["satisfied_atoms"] = nlohmann::ordered_json::array();
  for (const Atom& a : plan.satisfied_atoms) j["satisfied_atoms"].push_back(to_string(a));
  return j;
}

inline std::string dump_plan(const Plan& plan) { return plan_to_json(plan).dump(2) + "\n"; }

}  // namespace tamp
