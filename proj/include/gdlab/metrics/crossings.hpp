#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"

namespace gdlab {

/// Orientation values with magnitude at or below this are treated as collinear.
inline constexpr double kOrientationTolerance = 1e-12;

namespace detail {

inline int orientation(Point a, Point b, Point c) {
  const double o = cross(b - a, c - a);
  if (o > kOrientationTolerance) return 1;
  if (o < -kOrientationTolerance) return -1;
  return 0;
}

// Length of the overlap of two collinear segments, measured along their
// dominant axis.
inline double collinear_overlap(Point p1, Point p2, Point q1, Point q2) {
  const bool use_x = std::abs(p2.x - p1.x) + std::abs(q2.x - q1.x) >= std::abs(p2.y - p1.y) + std::abs(q2.y - q1.y);
  auto coord = [use_x](Point p) { return use_x ? p.x : p.y; };
  const double lo = std::max(std::min(coord(p1), coord(p2)), std::min(coord(q1), coord(q2)));
  const double hi = std::min(std::max(coord(p1), coord(p2)), std::max(coord(q1), coord(q2)));
  return hi - lo;
}

}  // namespace detail

/// True when the two segments cross in their interiors, or are collinear and
/// overlap along a stretch of positive length. Touching at an endpoint does
/// not count.
inline bool segments_cross(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = detail::orientation(p1, p2, q1);
  const int o2 = detail::orientation(p1, p2, q2);
  const int o3 = detail::orientation(q1, q2, p1);
  const int o4 = detail::orientation(q1, q2, p2);
  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    return detail::collinear_overlap(p1, p2, q1, q2) > kOrientationTolerance;
  }
  return o1 * o2 < 0 && o3 * o4 < 0;
}

/// Number of unordered edge pairs that cross. Pairs sharing an endpoint
/// never count. Candidate pairs come from a sweep over the edges' x-extents,
/// so the exact predicate only runs on pairs whose bounding boxes overlap.
inline std::uint64_t count_crossings(const Graph& g, const Layout& l) {
  require_matching(g, l);
  const auto& edges = g.edges();
  const std::size_t m = edges.size();
  struct Box {
    double xmin, xmax, ymin, ymax;
  };
  std::vector<Box> boxes(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Point a = l[edges[i].u], b = l[edges[i].v];
    boxes[i] = {std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y)};
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return boxes[a].xmin < boxes[b].xmin || (boxes[a].xmin == boxes[b].xmin && a < b);
  });

  std::uint64_t count = 0;
  for (std::size_t oi = 0; oi < m; ++oi) {
    const std::size_t i = order[oi];
    const Edge& ei = edges[i];
    for (std::size_t oj = oi + 1; oj < m; ++oj) {
      const std::size_t j = order[oj];
      if (boxes[j].xmin > boxes[i].xmax) break;
      if (boxes[j].ymin > boxes[i].ymax || boxes[j].ymax < boxes[i].ymin) continue;
      const Edge& ej = edges[j];
      if (ei.u == ej.u || ei.u == ej.v || ei.v == ej.u || ei.v == ej.v) continue;
      if (segments_cross(l[ei.u], l[ei.v], l[ej.u], l[ej.v])) ++count;
    }
  }
  return count;
}

}  // namespace gdlab
