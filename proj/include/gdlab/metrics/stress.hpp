#pragma once

#include <cmath>
#include <stdexcept>

#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"

namespace gdlab {

/// Sum over unordered pairs of d^-2 * (|x_i - x_j| - d)^2.
inline double stress_value(const DistanceMatrix& d, const Layout& l) {
  const std::size_t n = d.size();
  if (l.size() != n) throw std::invalid_argument("layout size does not match distance matrix");
  if (!d.connected()) throw std::invalid_argument("stress needs finite graph distances");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = d(i, j);
      const double r = distance(l[i], l[j]) - dij;
      total += r * r / (dij * dij);
    }
  }
  return total;
}

/// Uniform scale factor minimizing stress_value(d, alpha * l).
inline double optimal_stress_scale(const DistanceMatrix& d, const Layout& l) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      const double dij = d(i, j);
      const double e = distance(l[i], l[j]);
      num += e / dij;
      den += e * e / (dij * dij);
    }
  }
  return den > 0.0 ? num / den : 1.0;
}

}  // namespace gdlab
