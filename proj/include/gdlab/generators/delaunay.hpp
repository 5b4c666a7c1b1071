#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "gdlab/error.hpp"
#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"

namespace gdlab {

struct Triangle {
  std::array<std::size_t, 3> v;
};

namespace detail {

// Positive when d lies inside the circumcircle of the counter-clockwise triangle abc.
inline double in_circle(Point a, Point b, Point c, Point d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

inline std::size_t convex_hull_size(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (pts.size() < 3) return pts.size();
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  return k - 1;
}

}  // namespace detail

/// In-circle determinants at or below this magnitude are treated as cocircular.
inline constexpr double kInCircleTolerance = 1e-12;

/// Incremental Bowyer-Watson triangulation of points inside a super-triangle.
/// Throws DegenerateInputError on (near-)cocircular or collinear input, or if
/// the result does not triangulate the full convex hull.
inline std::vector<Triangle> bowyer_watson(const std::vector<Point>& points) {
  const std::size_t n = points.size();
  if (n < 3) throw std::invalid_argument("triangulation needs at least three points");
  BoundingBox box = bounding_box(Layout(points));
  const double span = std::max({box.width(), box.height(), 1e-9});
  const Point mid{0.5 * (box.min.x + box.max.x), 0.5 * (box.min.y + box.max.y)};
  std::vector<Point> pts = points;
  const double big = 1e3 * span;
  pts.push_back({mid.x - 2.0 * big, mid.y - big});
  pts.push_back({mid.x + 2.0 * big, mid.y - big});
  pts.push_back({mid.x, mid.y + 2.0 * big});

  std::vector<Triangle> tris{{{n, n + 1, n + 2}}};
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<Triangle> keep;
    std::map<std::pair<std::size_t, std::size_t>, int> boundary;  // directed edges of the cavity
    for (const Triangle& t : tris) {
      const double det = detail::in_circle(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], pts[p]);
      if (std::abs(det) <= kInCircleTolerance) throw DegenerateInputError("cocircular points in triangulation");
      if (det > 0.0) {
        for (int e = 0; e < 3; ++e) boundary[{t.v[e], t.v[(e + 1) % 3]}] += 1;
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [edge, count] : boundary) {
      if (boundary.contains({edge.second, edge.first})) continue;  // interior to the cavity
      const double orient = cross(pts[edge.second] - pts[edge.first], pts[p] - pts[edge.first]);
      if (std::abs(orient) <= kInCircleTolerance) throw DegenerateInputError("collinear points in triangulation");
      keep.push_back({{edge.first, edge.second, p}});
    }
    tris = std::move(keep);
  }
  std::erase_if(tris, [n](const Triangle& t) { return t.v[0] >= n || t.v[1] >= n || t.v[2] >= n; });

  // A triangulation of the hull has 2n - 2 - h triangles.
  const std::size_t h = detail::convex_hull_size(points);
  if (tris.size() + h + 2 != 2 * n) throw DegenerateInputError("triangulation does not cover the convex hull");
  return tris;
}

/// Undirected edge set of a triangulation, sorted.
inline std::vector<Edge> triangulation_edges(const std::vector<Triangle>& tris) {
  std::vector<Edge> edges;
  for (const Triangle& t : tris) {
    for (int e = 0; e < 3; ++e) edges.emplace_back(t.v[e], t.v[(e + 1) % 3]);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace gdlab
