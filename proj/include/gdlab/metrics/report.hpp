#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gdlab/graph.hpp"
#include "gdlab/io.hpp"
#include "gdlab/layout.hpp"
#include "gdlab/metrics/angular.hpp"
#include "gdlab/metrics/crossings.hpp"
#include "gdlab/metrics/stress.hpp"

namespace gdlab {

struct MetricReport {
  std::uint64_t nc = 0;
  double s = 0.0;
  double ar = 1.0;
  std::optional<double> loss;
  std::string loss_kind;
};

/// Metrics of `l` exactly as given; callers fit to the canvas first when
/// comparing techniques.
inline MetricReport measure(const Graph& g, const DistanceMatrix& d, const Layout& l) {
  require_matching(g, l);
  return {count_crossings(g, l), stress_value(d, l), angular_resolution(g, l), std::nullopt, {}};
}

inline MetricReport measure(const Graph& g, const Layout& l) { return measure(g, shortest_path_matrix(g), l); }

inline json to_json(const MetricReport& r) {
  json j{{"nc", r.nc}, {"s", r.s}, {"ar", r.ar}};
  if (r.loss) {
    j["loss"] = *r.loss;
    j["loss_kind"] = r.loss_kind;
  }
  return j;
}

}  // namespace gdlab
