#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gdlab/error.hpp"
#include "gdlab/generators/delaunay.hpp"
#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"
#include "gdlab/layouts/radial.hpp"
#include "gdlab/layouts/stress_majorization.hpp"

namespace gdlab {

enum class GraphClass { Grids, GridsD, GridsRD, Delaunay, Caterp2, Caterp3, RRTrees, RSMTrees };

inline constexpr GraphClass kAllClasses[] = {GraphClass::Grids,   GraphClass::GridsD,  GraphClass::GridsRD,
                                             GraphClass::Delaunay, GraphClass::Caterp2, GraphClass::Caterp3,
                                             GraphClass::RRTrees, GraphClass::RSMTrees};

inline std::string_view class_name(GraphClass c) {
  switch (c) {
    case GraphClass::Grids: return "Grids";
    case GraphClass::GridsD: return "GridsD";
    case GraphClass::GridsRD: return "GridsRD";
    case GraphClass::Delaunay: return "Delaunay";
    case GraphClass::Caterp2: return "Caterp2";
    case GraphClass::Caterp3: return "Caterp3";
    case GraphClass::RRTrees: return "RRTrees";
    case GraphClass::RSMTrees: return "RSMTrees";
  }
  return "?";
}

inline GraphClass parse_class(std::string_view name) {
  for (GraphClass c : kAllClasses) {
    if (class_name(c) == name) return c;
  }
  throw std::invalid_argument("unknown graph class '" + std::string(name) + "'");
}

/// A generated graph with its ground-truth layout.
struct LabeledGraph {
  Graph graph;
  Layout truth;
  GraphClass graph_class = GraphClass::Grids;
  std::uint64_t seed = 0;
};

using Rng = std::mt19937_64;

// ---------------------------------------------------------------- grids

namespace detail {

inline void require_grid_shape(int rows, int cols) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("grid needs rows, cols >= 2");
}

inline Layout lattice(int rows, int cols) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(rows * cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) pts.push_back({static_cast<double>(c), static_cast<double>(r)});
  }
  return Layout(std::move(pts));
}

inline std::vector<Edge> lattice_edges(int rows, int cols) {
  std::vector<Edge> edges;
  auto id = [cols](int r, int c) { return static_cast<NodeId>(r * cols + c); };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  }
  return edges;
}

// Calls add(edge) for the two diagonals of every unit cell, row-major.
template <class F>
void for_each_cell_diagonal(int rows, int cols, F&& add) {
  auto id = [cols](int r, int c) { return static_cast<NodeId>(r * cols + c); };
  for (int r = 0; r + 1 < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      add(Edge(id(r, c), id(r + 1, c + 1)));
      add(Edge(id(r, c + 1), id(r + 1, c)));
    }
  }
}

}  // namespace detail

/// Rectangular lattice; node r*cols + c sits at (c, r).
inline LabeledGraph gen_grid(int rows, int cols) {
  detail::require_grid_shape(rows, cols);
  return {Graph(static_cast<std::size_t>(rows * cols), detail::lattice_edges(rows, cols)), detail::lattice(rows, cols),
          GraphClass::Grids, 0};
}

/// Lattice plus both diagonals of every unit cell.
inline LabeledGraph gen_grid_full_diagonals(int rows, int cols) {
  detail::require_grid_shape(rows, cols);
  auto edges = detail::lattice_edges(rows, cols);
  detail::for_each_cell_diagonal(rows, cols, [&](Edge e) { edges.push_back(e); });
  return {Graph(static_cast<std::size_t>(rows * cols), std::move(edges)), detail::lattice(rows, cols),
          GraphClass::GridsD, 0};
}

/// Lattice plus each candidate cell diagonal independently with probability p.
template <class R>
LabeledGraph gen_grid_random_diagonals(int rows, int cols, double p, R& rng) {
  detail::require_grid_shape(rows, cols);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("diagonal probability must be in [0, 1]");
  auto edges = detail::lattice_edges(rows, cols);
  std::bernoulli_distribution coin(p);
  detail::for_each_cell_diagonal(rows, cols, [&](Edge e) {
    if (coin(rng)) edges.push_back(e);
  });
  return {Graph(static_cast<std::size_t>(rows * cols), std::move(edges)), detail::lattice(rows, cols),
          GraphClass::GridsRD, 0};
}

// ------------------------------------------------------------- delaunay

inline constexpr int kDelaunayRetries = 16;

/// n uniform points in the unit square joined by their Delaunay triangulation.
/// Degenerate draws are resampled up to kDelaunayRetries times.
template <class R>
LabeledGraph gen_delaunay(int n, R& rng) {
  if (n < 3) throw std::invalid_argument("Delaunay generator needs n >= 3");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < kDelaunayRetries; ++attempt) {
    std::vector<Point> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) {
      p.x = u(rng);
      p.y = u(rng);
    }
    try {
      auto tris = bowyer_watson(pts);
      return {Graph(pts.size(), triangulation_edges(tris)), Layout(std::move(pts)), GraphClass::Delaunay, 0};
    } catch (const DegenerateInputError&) {
      continue;
    }
  }
  throw DegenerateInputError("Delaunay generator: degenerate point sets on every retry");
}

// ---------------------------------------------------------- caterpillars

struct CaterpillarConfig {
  int stars = 2;
  double lb = 0.5;        // tip length lower bound
  double ub = 1.5;        // tip length upper bound
  double spacing = 3.0;   // distance between consecutive star centers
  int tip_min = 8;        // per-star tip count range when total_nodes == 0
  int tip_max = 57;
  int total_nodes = 0;    // fixed node count (tips split randomly, >= 3 per star) when > 0

  friend bool operator==(const CaterpillarConfig&, const CaterpillarConfig&) = default;
};

/// Chain of stars: centers on the x-axis joined by single edges, tips at
/// random angles and lengths in (lb, ub). Node i < stars is the i-th center.
template <class R>
LabeledGraph gen_caterpillar(const CaterpillarConfig& cfg, R& rng) {
  if (cfg.stars < 1) throw std::invalid_argument("caterpillar needs at least one star");
  if (!(cfg.lb < cfg.ub) || cfg.lb <= 0.0) throw std::invalid_argument("caterpillar needs 0 < lb < ub");
  if (cfg.tip_min < 1 || cfg.tip_max < cfg.tip_min) throw std::invalid_argument("caterpillar tip range invalid");
  const auto stars = static_cast<std::size_t>(cfg.stars);
  std::vector<int> tips(stars, 0);
  if (cfg.total_nodes > 0) {
    const int free_tips = cfg.total_nodes - 4 * cfg.stars;
    if (free_tips < 0) throw std::invalid_argument("caterpillar total_nodes too small for 3 tips per star");
    std::fill(tips.begin(), tips.end(), 3);
    std::uniform_int_distribution<std::size_t> which(0, stars - 1);
    for (int t = 0; t < free_tips; ++t) ++tips[which(rng)];
  } else {
    std::uniform_int_distribution<int> count(cfg.tip_min, cfg.tip_max);
    for (auto& t : tips) t = count(rng);
  }

  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> length(cfg.lb, cfg.ub);
  std::vector<Point> pts;
  std::vector<Edge> edges;
  for (std::size_t s = 0; s < stars; ++s) {
    pts.push_back({cfg.spacing * static_cast<double>(s), 0.0});
    if (s > 0) edges.emplace_back(s - 1, s);
  }
  for (std::size_t s = 0; s < stars; ++s) {
    for (int t = 0; t < tips[s]; ++t) {
      const double a = angle(rng);
      const double r = length(rng);
      edges.emplace_back(s, pts.size());
      pts.push_back({pts[s].x + r * std::cos(a), r * std::sin(a)});
    }
  }
  const std::size_t n = pts.size();
  return {Graph(n, std::move(edges)), Layout(std::move(pts)),
          cfg.stars == 3 ? GraphClass::Caterp3 : GraphClass::Caterp2, 0};
}

// ----------------------------------------------------------------- trees

struct TreeConfig {
  int children = 4;        // default child count c
  double p_extra = 0.10;   // probability of a random child count instead
  int ub_children = 8;     // random child counts are uniform in [2, ub_children]
  int levels = 4;          // number of levels including the root
  int target_nodes = 0;    // when > 0, keep exactly this many nodes (BFS prefix)

  friend bool operator==(const TreeConfig&, const TreeConfig&) = default;
};

/// Random rooted tree grown level by level; nodes are numbered in BFS order
/// with the root at 0.
template <class R>
Graph gen_random_tree(const TreeConfig& cfg, R& rng) {
  if (cfg.children < 2) throw std::invalid_argument("tree: c must be >= 2");
  if (!(cfg.p_extra >= 0.0 && cfg.p_extra <= 1.0)) throw std::invalid_argument("tree: p must be in [0, 1]");
  if (cfg.ub_children < 2) throw std::invalid_argument("tree: ub_children must be >= 2");
  if (cfg.levels < 1) throw std::invalid_argument("tree: levels must be >= 1");
  std::bernoulli_distribution random_count(cfg.p_extra);
  std::uniform_int_distribution<int> count(2, cfg.ub_children);

  std::vector<Edge> edges;
  std::size_t n = 1;
  std::size_t level_begin = 0, level_end = 1;
  const std::size_t cap = cfg.target_nodes > 0 ? static_cast<std::size_t>(cfg.target_nodes) : SIZE_MAX;
  int levels = 1;
  // with a target size, growth continues past `levels` until the target is met
  auto more = [&] { return cfg.target_nodes > 0 ? n < cap : levels < cfg.levels; };
  while (more()) {
    for (std::size_t parent = level_begin; parent < level_end && n < cap; ++parent) {
      const int kids = random_count(rng) ? count(rng) : cfg.children;
      for (int c = 0; c < kids && n < cap; ++c) edges.emplace_back(parent, n++);
    }
    level_begin = level_end;
    level_end = n;
    ++levels;
  }
  return Graph(n, std::move(edges));
}

inline LabeledGraph label_tree_radial(const Graph& t) {
  if (!is_tree(t)) throw std::invalid_argument("label_tree_radial: input is not a tree");
  return {t, radial_tree_layout(t, 0), GraphClass::RRTrees, 0};
}

template <class R>
LabeledGraph label_tree_sm(const Graph& t, R& rng, const SMConfig& cfg = {}) {
  if (!is_tree(t)) throw std::invalid_argument("label_tree_sm: input is not a tree");
  return {t, stress_majorization(t, cfg, rng), GraphClass::RSMTrees, 0};
}

}  // namespace gdlab
