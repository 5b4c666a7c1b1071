#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdlab/graph.hpp"

namespace gdlab {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
  Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  Point operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Per-node 2D coordinates. Coordinates are always finite.
class Layout {
 public:
  Layout() = default;
  explicit Layout(std::size_t n) : pts_(n) {}
  explicit Layout(std::vector<Point> pts) : pts_(std::move(pts)) {
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (!std::isfinite(pts_[i].x) || !std::isfinite(pts_[i].y)) {
        throw std::invalid_argument("non-finite coordinate at node " + std::to_string(i));
      }
    }
  }

  std::size_t size() const noexcept { return pts_.size(); }
  const Point& operator[](std::size_t i) const { return pts_[i]; }
  Point& operator[](std::size_t i) { return pts_[i]; }
  const std::vector<Point>& points() const noexcept { return pts_; }
  auto begin() const { return pts_.begin(); }
  auto end() const { return pts_.end(); }

  friend bool operator==(const Layout&, const Layout&) = default;

 private:
  std::vector<Point> pts_;
};

inline void require_matching(const Graph& g, const Layout& l) {
  if (g.size() != l.size()) {
    throw std::invalid_argument("layout has " + std::to_string(l.size()) + " points but graph has " +
                                std::to_string(g.size()) + " nodes");
  }
}

struct BoundingBox {
  Point min;
  Point max;
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

inline BoundingBox bounding_box(const Layout& l) {
  if (l.size() == 0) return {};
  BoundingBox b{l[0], l[0]};
  for (const Point& p : l) {
    b.min.x = std::min(b.min.x, p.x);
    b.min.y = std::min(b.min.y, p.y);
    b.max.x = std::max(b.max.x, p.x);
    b.max.y = std::max(b.max.y, p.y);
  }
  return b;
}

/// Translate to the origin corner and scale so the larger side equals `side`
/// (aspect preserved). A layout with all points coincident maps to the origin.
inline Layout fit_to_canvas(const Layout& l, double side = 1000.0) {
  const BoundingBox b = bounding_box(l);
  const double extent = std::max(b.width(), b.height());
  const double s = extent > 0.0 ? side / extent : 0.0;
  std::vector<Point> out(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) out[i] = (l[i] - b.min) * s;
  return Layout(std::move(out));
}

inline Layout centered(const Layout& l) {
  Point c{};
  for (const Point& p : l) c = c + p;
  c = c * (1.0 / static_cast<double>(std::max<std::size_t>(l.size(), 1)));
  std::vector<Point> out(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) out[i] = l[i] - c;
  return Layout(std::move(out));
}

template <class Rng>
Layout random_layout(std::size_t n, Rng& rng, double side = 1.0) {
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = u(rng);
    p.y = u(rng);
  }
  return Layout(std::move(pts));
}

}  // namespace gdlab
