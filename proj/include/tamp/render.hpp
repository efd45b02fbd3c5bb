#pragma once

// Text and SVG drawings of an environment, optionally with a plan overlaid.

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tamp/environment.hpp"
#include "tamp/error.hpp"

namespace tamp {

enum class RenderFormat { kAscii, kSvg };

inline RenderFormat parse_render_format(std::string_view token) {
  if (token == "ascii") return RenderFormat::kAscii;
  if (token == "svg") return RenderFormat::kSvg;
  throw UsageError("unknown render format '" + std::string(token) + "' (expected ascii or svg)");
}

namespace detail {

inline void check_plan(const Environment& env, const Plan& plan) {
  if (plan.per_agent_paths.size() != env.agents.size())
    throw ValidationError("plan.agents", "plan has " + std::to_string(plan.per_agent_paths.size()) +
                                             " agents, environment has " + std::to_string(env.agents.size()));
  for (std::size_t a = 0; a < plan.per_agent_paths.size(); ++a) {
    const auto& path = plan.per_agent_paths[a];
    const std::string where = "plan.agents[" + std::to_string(a) + "]";
    if (path.empty() || path.front() != env.agents[a]) throw ValidationError(where, "path does not start at the agent");
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (!env.is_free(path[i]))
        throw ValidationError(where + ".path[" + std::to_string(i) + "]", "cell " + to_string(path[i]) + " is not free");
      if (i > 0 && std::abs(path[i].row - path[i - 1].row) + std::abs(path[i].col - path[i - 1].col) != 1)
        throw ValidationError(where + ".path[" + std::to_string(i) + "]", "step is not between adjacent cells");
    }
  }
}

// Region glyphs: A..Z then a..z, '?' beyond that.
inline char region_glyph(std::size_t r) {
  if (r < 26) return static_cast<char>('A' + r);
  if (r < 52) return static_cast<char>('a' + (r - 26));
  return '?';
}

inline char agent_glyph(std::size_t a) { return a < 10 ? static_cast<char>('0' + a) : '@'; }

}  // namespace detail

// One glyph per cell. Without a plan: '#' obstacle, region letter, agent
// digit at its start, '.' otherwise. With a plan the grid is followed by one
// panel per agent where '*' marks its path and the digit its final cell.
inline std::string render_ascii(const Environment& env, const Plan* plan = nullptr) {
  if (plan) detail::check_plan(env, *plan);
  std::vector<std::string> base(static_cast<std::size_t>(env.rows), std::string(static_cast<std::size_t>(env.cols), '.'));
  auto at = [&](std::vector<std::string>& g, Cell c) -> char& {
    return g[static_cast<std::size_t>(c.row)][static_cast<std::size_t>(c.col)];
  };
  for (Cell o : env.obstacles) at(base, o) = '#';
  for (std::size_t r = 0; r < env.regions.size(); ++r)
    for (Cell c : env.regions[r].cells) at(base, c) = detail::region_glyph(r);

  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& g) {
    for (const auto& line : g) out << line << '\n';
  };
  std::vector<std::string> starts = base;
  for (std::size_t a = 0; a < env.agents.size(); ++a) at(starts, env.agents[a]) = detail::agent_glyph(a);
  emit(starts);
  for (std::size_t r = 0; r < env.regions.size(); ++r) {
    const Region& reg = env.regions[r];
    out << detail::region_glyph(r) << ' ' << reg.name;
    if (!reg.trajectory_props.empty()) {
      out << " visit:";
      for (const auto& p : reg.trajectory_props) out << ' ' << p;
    }
    if (!reg.final_props.empty()) {
      out << " end:";
      for (const auto& p : reg.final_props) out << ' ' << p;
    }
    out << '\n';
  }
  if (!plan) return out.str();

  out << "cost " << to_string(plan->total_cost) << '\n';
  for (std::size_t a = 0; a < plan->per_agent_paths.size(); ++a) {
    const auto& path = plan->per_agent_paths[a];
    std::vector<std::string> g = base;
    for (Cell c : path) at(g, c) = '*';
    at(g, path.back()) = detail::agent_glyph(a);
    out << "\nagent " << a << " (" << path.size() - 1 << " moves)\n";
    emit(g);
  }
  return out.str();
}

inline std::string render_svg(const Environment& env, const Plan* plan = nullptr) {
  if (plan) detail::check_plan(env, *plan);
  constexpr int kCell = 40;
  static constexpr const char* kRegionFill[] = {"#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
                                               "#b3de69", "#fccde5", "#bc80bd", "#ccebc5", "#ffed6f", "#d9d9d9"};
  static constexpr const char* kAgentStroke[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
  const int w = env.cols * kCell;
  const int h = env.rows * kCell;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << ' ' << h << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
  auto rect = [&](Cell c, const char* fill) {
    out << "<rect x=\"" << c.col * kCell << "\" y=\"" << c.row * kCell << "\" width=\"" << kCell << "\" height=\""
        << kCell << "\" fill=\"" << fill << "\"/>\n";
  };
  for (std::size_t r = 0; r < env.regions.size(); ++r) {
    out << "<g class=\"region\" id=\"region-" << r << "\">\n";
    for (Cell c : env.regions[r].cells) rect(c, kRegionFill[r % std::size(kRegionFill)]);
    const Cell c0 = env.regions[r].cells.front();
    out << "<text x=\"" << c0.col * kCell + 3 << "\" y=\"" << c0.row * kCell + 12
        << "\" font-size=\"10\" font-family=\"monospace\">" << env.regions[r].name << "</text>\n";
    out << "</g>\n";
  }
  for (Cell o : env.obstacles) rect(o, "#333333");
  for (int r = 0; r <= env.rows; ++r)
    out << "<line x1=\"0\" y1=\"" << r * kCell << "\" x2=\"" << w << "\" y2=\"" << r * kCell
        << "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
  for (int c = 0; c <= env.cols; ++c)
    out << "<line x1=\"" << c * kCell << "\" y1=\"0\" x2=\"" << c * kCell << "\" y2=\"" << h
        << "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";

  auto centre = [&](Cell c, int a) {
    // Small per-agent offset keeps overlapping paths distinguishable.
    int off = (a % 5 - 2) * 3;
    return std::to_string(c.col * kCell + kCell / 2 + off) + "," + std::to_string(c.row * kCell + kCell / 2 + off);
  };
  for (std::size_t a = 0; a < env.agents.size(); ++a) {
    const char* stroke = kAgentStroke[a % std::size(kAgentStroke)];
    const int ia = static_cast<int>(a);
    if (plan) {
      const auto& path = plan->per_agent_paths[a];
      out << "<polyline class=\"agent-path\" id=\"agent-" << a << "\" fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"3\" points=\"";
      for (std::size_t i = 0; i < path.size(); ++i) out << (i ? " " : "") << centre(path[i], ia);
      out << "\"/>\n";
    }
    const Cell s = env.agents[a];
    out << "<circle cx=\"" << s.col * kCell + kCell / 2 << "\" cy=\"" << s.row * kCell + kCell / 2
        << "\" r=\"9\" fill=\"" << stroke << "\"/>\n";
    out << "<text x=\"" << s.col * kCell + kCell / 2 - 3 << "\" y=\"" << s.row * kCell + kCell / 2 + 4
        << "\" font-size=\"11\" font-family=\"monospace\" fill=\"#ffffff\">" << a << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline std::string render(const Environment& env, const Plan* plan, RenderFormat format) {
  return format == RenderFormat::kAscii ? render_ascii(env, plan) : render_svg(env, plan);
}

}  // namespace tamp
