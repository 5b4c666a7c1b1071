#pragma once

// Brute-force Procrustes statistic: normalizes the target (centered, unit
// RMS radius) and grid-searches the similarity transform of the prediction,
// zooming in on the best cell at every level. Translation is searched as an
// offset from the prediction's centroid so the box does not grow with the
// raw coordinates.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "gdlab/layout.hpp"

namespace gdlab::testing_support {

inline double grid_search_procrustes(const Layout& target, const Layout& pred) {
  const std::size_t n = target.size();
  std::vector<Point> a(n);
  Point mean{};
  for (std::size_t i = 0; i < n; ++i) mean = mean + target[i];
  mean = mean * (1.0 / static_cast<double>(n));
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = target[i] - mean;
    ss += a[i].x * a[i].x + a[i].y * a[i].y;
  }
  const double rms = std::sqrt(ss / static_cast<double>(n));
  for (auto& p : a) p = p * (1.0 / rms);

  Point pm{};
  for (const Point& p : pred) pm = pm + p;
  pm = pm * (1.0 / static_cast<double>(n));
  std::vector<Point> b(n);
  double pred_ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = pred[i] - pm;
    pred_ss += b[i].x * b[i].x + b[i].y * b[i].y;
  }
  const double pred_rms = std::sqrt(pred_ss / static_cast<double>(n));

  auto residual = [&](double angle, double scale, double tx, double ty) {
    const double c = std::cos(angle), s = std::sin(angle);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = scale * (c * b[i].x - s * b[i].y) + tx;
      const double y = scale * (s * b[i].x + c * b[i].y) + ty;
      sum += (a[i].x - x) * (a[i].x - x) + (a[i].y - y) * (a[i].y - y);
    }
    return sum;
  };

  // parameter box: angle, scale, tx, ty
  std::array<double, 4> center{0.0, 1.0 / pred_rms, 0.0, 0.0};
  std::array<double, 4> half{std::numbers::pi, 1.0 / pred_rms, 2.0, 2.0};
  double best = std::numeric_limits<double>::infinity();
  std::array<double, 4> arg = center;
  for (int level = 0; level < 60; ++level) {
    const int steps = level == 0 ? 16 : 6;
    for (int i0 = -steps; i0 <= steps; ++i0) {
      const double angle = center[0] + half[0] * i0 / steps;
      for (int i1 = -steps; i1 <= steps; ++i1) {
        const double scale = center[1] + half[1] * i1 / steps;
        if (scale < 0.0) continue;
        for (int i2 = -steps; i2 <= steps; ++i2) {
          const double tx = center[2] + half[2] * i2 / steps;
          for (int i3 = -steps; i3 <= steps; ++i3) {
            const double ty = center[3] + half[3] * i3 / steps;
            const double r = residual(angle, scale, tx, ty);
            if (r < best) {
              best = r;
              arg = {angle, scale, tx, ty};
            }
          }
        }
      }
    }
    center = arg;
    for (int d = 0; d < 4; ++d) half[d] *= level == 0 ? 1.5 / 16.0 : 0.6;
  }
  return best;
}

}  // namespace gdlab::testing_support
