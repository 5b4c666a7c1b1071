#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"

namespace gdlab {

/// ForceAtlas2 parameters. Defaults are fixed and written into every report.
struct FDConfig {
  int iterations = 1000;
  double scaling_ratio = 2.0;
  double gravity = 1.0;
  double jitter_tolerance = 1.0;
  bool strong_gravity = false;
  bool barnes_hut = false;  // accepted for completeness; exact O(n^2) repulsion is always used
  std::uint64_t seed = 0;

  void validate() const {
    if (iterations < 1) throw std::invalid_argument("FDConfig: iterations must be >= 1");
    if (!(scaling_ratio > 0.0)) throw std::invalid_argument("FDConfig: scaling ratio must be > 0");
    if (barnes_hut) throw std::invalid_argument("FDConfig: Barnes-Hut approximation is not supported");
  }
};

inline nlohmann::json to_json(const FDConfig& c) {
  return {{"iterations", c.iterations},
          {"scaling_ratio", c.scaling_ratio},
          {"gravity", c.gravity},
          {"jitter_tolerance", c.jitter_tolerance},
          {"strong_gravity", c.strong_gravity},
          {"barnes_hut", c.barnes_hut},
          {"lin_log", false},
          {"prevent_overlap", false}};
}

/// ForceAtlas2: linear attraction along edges, repulsion k_r (deg_i+1)(deg_j+1)/dist,
/// gravity k_g (deg+1) toward the origin, and the adaptive global/local
/// speed scheme driven by swinging and traction.
template <class Rng>
Layout forceatlas2(const Graph& g, const FDConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n = g.size();
  if (n < 2) throw std::invalid_argument("forceatlas2 needs at least two nodes");

  std::vector<double> mass(n);
  for (NodeId v = 0; v < n; ++v) mass[v] = static_cast<double>(g.degree(v)) + 1.0;
  std::vector<Point> pos = random_layout(n, rng).points();
  std::vector<Point> force(n), old_force(n);

  double speed = 1.0;
  double speed_efficiency = 1.0;

  for (int it = 0; it < cfg.iterations; ++it) {
    std::swap(force, old_force);
    std::fill(force.begin(), force.end(), Point{});

    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        const Point delta = pos[i] - pos[j];
        const double dist2 = dot(delta, delta);
        if (dist2 <= 0.0) continue;
        const double factor = cfg.scaling_ratio * mass[i] * mass[j] / dist2;
        force[i] = force[i] + delta * factor;
        force[j] = force[j] - delta * factor;
      }
    }
    for (NodeId i = 0; i < n; ++i) {
      const double dist = norm(pos[i]);
      if (cfg.strong_gravity) {
        force[i] = force[i] - pos[i] * (cfg.gravity * mass[i]);
      } else if (dist > 0.0) {
        force[i] = force[i] - pos[i] * (cfg.gravity * mass[i] / dist);
      }
    }
    for (const Edge& e : g.edges()) {
      const Point delta = pos[e.u] - pos[e.v];
      force[e.u] = force[e.u] - delta;
      force[e.v] = force[e.v] + delta;
    }

    double total_swinging = 0.0, total_traction = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      total_swinging += mass[i] * norm(old_force[i] - force[i]);
      total_traction += 0.5 * mass[i] * norm(old_force[i] + force[i]);
    }

    // Global speed adaptation.
    const double estimated_jitter = 0.05 * std::sqrt(static_cast<double>(n));
    const double min_jitter = std::sqrt(estimated_jitter);
    const double max_jitter = 10.0;
    const double nd = static_cast<double>(n);
    double jitter = cfg.jitter_tolerance *
                    std::max(min_jitter, std::min(max_jitter, estimated_jitter * total_traction / (nd * nd)));
    const double min_speed_efficiency = 0.05;
    if (total_traction > 0.0 && total_swinging / total_traction > 2.0) {
      if (speed_efficiency > min_speed_efficiency) speed_efficiency *= 0.5;
      jitter = std::max(jitter, cfg.jitter_tolerance);
    }
    if (total_swinging > 0.0) {
      const double target_speed = jitter * speed_efficiency * total_traction / total_swinging;
      if (total_swinging > jitter * total_traction) {
        if (speed_efficiency > min_speed_efficiency) speed_efficiency *= 0.7;
      } else if (speed < 1000.0) {
        speed_efficiency *= 1.3;
      }
      const double max_rise = 0.5;
      speed = speed + std::min(target_speed - speed, max_rise * speed);
    }

    for (NodeId i = 0; i < n; ++i) {
      const double swinging = mass[i] * norm(old_force[i] - force[i]);
      const double factor = speed / (1.0 + std::sqrt(speed * swinging));
      pos[i] = pos[i] + force[i] * factor;
    }
  }
  return Layout(std::move(pos));
}

}  // namespace gdlab
