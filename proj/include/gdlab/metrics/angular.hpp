#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gdlab/error.hpp"
#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"

namespace gdlab {

/// Mean, over nodes of degree >= 2, of the smallest angle between
/// consecutive incident edges divided by the ideal angle 2*pi/deg.
/// Returns 1 when no node has degree >= 2.
inline double angular_resolution(const Graph& g, const Layout& l) {
  require_matching(g, l);
  double sum = 0.0;
  std::size_t counted = 0;
  std::vector<double> angles;
  for (NodeId v = 0; v < g.size(); ++v) {
    const auto nb = g.neighbors(v);
    for (NodeId w : nb) {
      if (l[v] == l[w]) {
        throw DegenerateInputError("zero-length edge between nodes " + std::to_string(v) + " and " +
                                   std::to_string(w));
      }
    }
    if (nb.size() < 2) continue;
    angles.clear();
    for (NodeId w : nb) {
      const Point d = l[w] - l[v];
      angles.push_back(std::atan2(d.y, d.x));
    }
    std::sort(angles.begin(), angles.end());
    double smallest = angles.front() + 2.0 * std::numbers::pi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) smallest = std::min(smallest, angles[i] - angles[i - 1]);
    const double ideal = 2.0 * std::numbers::pi / static_cast<double>(nb.size());
    sum += std::clamp(smallest / ideal, 0.0, 1.0);
    ++counted;
  }
  return counted == 0 ? 1.0 : sum / static_cast<double>(counted);
}

}  // namespace gdlab
