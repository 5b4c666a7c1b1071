#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gdlab/error.hpp"
#include "gdlab/layout.hpp"

namespace gdlab {

/// Similarity transform x -> scale * R(rotation) * x + translation that maps
/// the prediction onto the target, plus the residual statistic.
struct ProcrustesResult {
  double statistic = 0.0;
  double rotation = 0.0;  // radians, counter-clockwise
  double scale = 1.0;
  Point translation{};
};

namespace detail {

// A point set centered on its mean and scaled to unit root-mean-square radius.
struct NormalizedShape {
  std::vector<Point> points;
  Point mean{};
  double rms = 0.0;
};

inline NormalizedShape normalize_shape(const Layout& l) {
  NormalizedShape s;
  const std::size_t n = l.size();
  for (const Point& p : l) s.mean = s.mean + p;
  s.mean = s.mean * (1.0 / static_cast<double>(n));
  double sq = 0.0;
  s.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.points[i] = l[i] - s.mean;
    sq += dot(s.points[i], s.points[i]);
  }
  s.rms = std::sqrt(sq / static_cast<double>(n));
  if (s.rms > 0.0) {
    for (Point& p : s.points) p = p * (1.0 / s.rms);
  }
  return s;
}

inline bool is_degenerate(const NormalizedShape& s, double reference = 1.0) {
  return !(s.rms > 1e-12 * reference);
}

// Sums of dot and cross products between target and prediction points; the
// best rotation of the prediction is atan2(cross, dot).
struct Covariance {
  double dot = 0.0;
  double cross = 0.0;
};

inline Covariance covariance(const NormalizedShape& target, const NormalizedShape& pred) {
  Covariance c;
  for (std::size_t i = 0; i < target.points.size(); ++i) {
    c.dot += gdlab::dot(pred.points[i], target.points[i]);
    c.cross += gdlab::cross(pred.points[i], target.points[i]);
  }
  return c;
}

inline double shape_scale(const Layout& l) {
  double m = 0.0;
  for (const Point& p : l) m = std::max({m, std::abs(p.x), std::abs(p.y)});
  return std::max(m, 1.0);
}

}  // namespace detail

/// Aligns `pred` to `target` after centering both and scaling each to unit
/// root-mean-square radius; the best rotation (no reflection) and uniform
/// scale are found in closed form. The statistic is the residual sum of
/// squared point distances in the normalized frame, n * (1 - rho^2) where rho
/// is the normalized rotational correlation. It is symmetric in its arguments.
inline ProcrustesResult procrustes_align(const Layout& target, const Layout& pred) {
  const std::size_t n = target.size();
  if (n != pred.size()) throw std::invalid_argument("procrustes: point sets differ in size");
  if (n < 2) throw std::invalid_argument("procrustes: need at least two points");
  const auto a = detail::normalize_shape(target);
  if (detail::is_degenerate(a, detail::shape_scale(target))) {
    throw DegenerateInputError("procrustes: all target points coincide");
  }
  const auto b = detail::normalize_shape(pred);
  if (detail::is_degenerate(b, detail::shape_scale(pred))) {
    throw DegenerateInputError("procrustes: all predicted points coincide");
  }
  const auto cov = detail::covariance(a, b);
  const double nn = static_cast<double>(n);
  const double corr_sq = cov.dot * cov.dot + cov.cross * cov.cross;
  ProcrustesResult r;
  r.statistic = std::max(0.0, nn - corr_sq / nn);
  r.rotation = std::atan2(cov.cross, cov.dot);
  const double fit = std::sqrt(corr_sq) / nn;  // optimal scale in the normalized frame
  r.scale = fit * a.rms / b.rms;
  const double c = std::cos(r.rotation), s = std::sin(r.rotation);
  const Point rotated_mean{c * b.mean.x - s * b.mean.y, s * b.mean.x + c * b.mean.y};
  r.translation = a.mean - rotated_mean * r.scale;
  return r;
}

inline Layout apply_similarity(const Layout& l, const ProcrustesResult& t) {
  const double c = std::cos(t.rotation), s = std::sin(t.rotation);
  std::vector<Point> out(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) {
    const Point p = l[i];
    out[i] = Point{c * p.x - s * p.y, s * p.x + c * p.y} * t.scale + t.translation;
  }
  return Layout(std::move(out));
}

}  // namespace gdlab
