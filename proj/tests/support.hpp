#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tamp/tamp.hpp"

namespace tamp::test {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(TAMP_DATA_DIR) / name; }

inline Environment example1() { return load_env(data_path("example1.json")); }

// Row-major place id of a cell in an obstacle-free grid.
inline PlaceId pid(int row, int col, int cols) { return static_cast<PlaceId>(row * cols + col); }

// Random token-conserving net together with a partition whose implicit part
// is acyclic: implicit transitions only move tokens towards higher place ids.
struct RandomNet {
  PetriNet net;
  BasisPartition partition;
};

inline RandomNet random_net(std::mt19937_64& rng, int places, int transitions, double implicit_share = 0.4,
                            int max_tokens = 2) {
  std::uniform_int_distribution<int> pick_place(0, places - 1);
  std::uniform_int_distribution<int> pick_cost(1, 4);
  std::uniform_int_distribution<int> pick_den(1, 2);
  std::bernoulli_distribution implicit_draw(implicit_share);
  std::bernoulli_distribution two_arcs(0.25);

  PetriNetBuilder b;
  for (int p = 0; p < places; ++p) b.add_place();
  std::vector<bool> is_explicit;
  for (int t = 0; t < transitions; ++t) {
    const bool implicit = implicit_draw(rng) && places >= 2;
    const int arcs = (two_arcs(rng) && places >= 4) ? 2 : 1;
    std::vector<PlaceId> in, out;
    for (int guard = 0; guard < 100 && static_cast<int>(in.size()) < arcs; ++guard) {
      auto p = static_cast<PlaceId>(pick_place(rng));
      if (std::find(in.begin(), in.end(), p) == in.end()) in.push_back(p);
    }
    const PlaceId in_max = *std::max_element(in.begin(), in.end());
    for (int guard = 0; guard < 200 && out.size() < in.size(); ++guard) {
      PlaceId p;
      if (implicit) {
        if (in_max + 1 >= static_cast<PlaceId>(places)) break;
        p = static_cast<PlaceId>(std::uniform_int_distribution<int>(static_cast<int>(in_max) + 1, places - 1)(rng));
      } else {
        p = static_cast<PlaceId>(pick_place(rng));
      }
      if (std::find(out.begin(), out.end(), p) == out.end() &&
          (implicit || std::find(in.begin(), in.end(), p) == in.end() || in.size() == 1))
        out.push_back(p);
    }
    if (out.size() != in.size() || (in.size() == 1 && in[0] == out[0])) {
      // Fall back to an explicit single move.
      PlaceId a = static_cast<PlaceId>(pick_place(rng));
      PlaceId c = static_cast<PlaceId>((a + 1 + static_cast<PlaceId>(pick_place(rng)) % (places - 1)) % places);
      in = {a};
      out = {c};
      b.add_transition(in, out, Cost(pick_cost(rng), pick_den(rng)));
      is_explicit.push_back(true);
      continue;
    }
    b.add_transition(in, out, Cost(pick_cost(rng), pick_den(rng)));
    is_explicit.push_back(!implicit);
  }
  std::uniform_int_distribution<int> tokens(1, max_tokens);
  const int n = tokens(rng);
  std::vector<Count> m0(static_cast<std::size_t>(places), 0);
  for (int i = 0; i < n; ++i) ++m0[static_cast<std::size_t>(pick_place(rng))];
  for (int p = 0; p < places; ++p) b.set_initial(static_cast<PlaceId>(p), m0[static_cast<std::size_t>(p)]);
  RandomNet r{std::move(b).build(), {}};
  r.partition = make_partition(r.net, is_explicit);
  return r;
}

// Random obstacle-sparse grid with single-cell regions named "1".."labels".
inline Environment random_env(std::mt19937_64& rng, int rows, int cols, int agents, int labels, double density = 0.1) {
  Environment env;
  env.rows = rows;
  env.cols = cols;
  std::vector<Cell> cells;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) cells.push_back({r, c});
  std::shuffle(cells.begin(), cells.end(), rng);
  auto obstacles = static_cast<std::size_t>(density * static_cast<double>(cells.size()));
  obstacles = std::min(obstacles, cells.size() - static_cast<std::size_t>(labels) - 1);
  env.obstacles.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(obstacles));
  std::vector<Cell> free(cells.begin() + static_cast<std::ptrdiff_t>(obstacles), cells.end());
  for (int j = 1; j <= labels; ++j) {
    const std::string name = std::to_string(j);
    env.regions.push_back({name, {free[static_cast<std::size_t>(j - 1)]}, {name}, {name}});
  }
  std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
  for (int a = 0; a < agents; ++a) env.agents.push_back(free[pick(rng)]);
  validate(env);
  return env;
}

}  // namespace tamp::test
