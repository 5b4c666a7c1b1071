#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"
#include "gdlab/metrics/stress.hpp"

namespace gdlab {

enum class SMInit {
  ClassicalScaling,  // Torgerson MDS of the hop distances, plus a 1e-6 seeded jitter
  Random,            // uniform in the unit square
};

struct SMConfig {
  int max_iters = 300;
  double tolerance = 1e-7;  // on relative stress decrease
  SMInit init = SMInit::ClassicalScaling;
  std::optional<Layout> initial;  // overrides `init` when set

  void validate() const {
    if (max_iters < 1) throw std::invalid_argument("SMConfig: max_iters must be >= 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("SMConfig: tolerance must be > 0");
  }
};

struct SMResult {
  Layout layout;
  /// history[0] is the stress of the initial layout, history[t] after t updates.
  std::vector<double> history;
  int iterations = 0;
};

/// Classical (Torgerson) scaling of a distance matrix into the plane.
inline Layout classical_scaling(const DistanceMatrix& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = -0.5 * double(d(i, j)) * double(d(i, j));
  const Eigen::VectorXd row_mean = b.rowwise().mean();
  const double total_mean = row_mean.mean();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) += total_mean - row_mean(i) - row_mean(j);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  std::vector<Point> pts(d.size());
  // eigenvalues ascend; take the two largest
  for (int axis = 0; axis < 2 && axis < n; ++axis) {
    const Eigen::Index col = n - 1 - axis;
    const double scale = std::sqrt(std::max(0.0, eig.eigenvalues()(col)));
    for (Eigen::Index i = 0; i < n; ++i) {
      (axis == 0 ? pts[i].x : pts[i].y) = scale * eig.eigenvectors()(i, col);
    }
  }
  return Layout(std::move(pts));
}

/// SMACOF stress majorization with weights d^-2. Each step is the Guttman
/// transform X <- V^+ B(X) X, which never increases stress. The returned
/// layout is centered on the origin and keeps graph-distance units.
template <class Rng>
SMResult stress_majorization_run(const Graph& g, const SMConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n = g.size();
  if (n < 2) throw std::invalid_argument("stress majorization needs at least two nodes");
  const DistanceMatrix d = shortest_path_matrix(g);

  Layout start;
  if (cfg.initial) {
    start = *cfg.initial;
  } else if (cfg.init == SMInit::Random) {
    start = random_layout(n, rng);
  } else {
    // the jitter separates nodes that classical scaling puts on the same spot
    start = classical_scaling(d);
    const Layout jitter = random_layout(n, rng, 1e-6);
    for (std::size_t i = 0; i < n; ++i) start[i] = start[i] + jitter[i];
  }
  require_matching(g, start);

  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(nn, nn);
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) {
      if (i == j) continue;
      const double dij = d(i, j);
      weight(i, j) = 1.0 / (dij * dij);
      target(i, j) = dij;
    }
  }
  // Weighted Laplacian shifted by the all-ones projector; its inverse acts as
  // V^+ on zero-sum right-hand sides.
  Eigen::MatrixXd v = -weight;
  v.diagonal() = weight.rowwise().sum();
  v.array() += 1.0 / static_cast<double>(n);
  const Eigen::LDLT<Eigen::MatrixXd> solver(v);

  Eigen::MatrixXd x(nn, 2);
  for (Eigen::Index i = 0; i < nn; ++i) {
    x(i, 0) = start[i].x;
    x(i, 1) = start[i].y;
  }
  auto to_layout = [&](const Eigen::MatrixXd& m) {
    std::vector<Point> pts(n);
    for (Eigen::Index i = 0; i < nn; ++i) pts[i] = {m(i, 0), m(i, 1)};
    return Layout(std::move(pts));
  };

  SMResult result;
  result.history.push_back(stress_value(d, to_layout(x)));
  Eigen::MatrixXd b(nn, nn);
  for (int it = 0; it < cfg.max_iters; ++it) {
    for (Eigen::Index i = 0; i < nn; ++i) {
      double diag = 0.0;
      for (Eigen::Index j = 0; j < nn; ++j) {
        if (i == j) continue;
        const double e = (x.row(i) - x.row(j)).norm();
        const double bij = e > 0.0 ? -weight(i, j) * target(i, j) / e : 0.0;
        b(i, j) = bij;
        diag -= bij;
      }
      b(i, i) = diag;
    }
    x = solver.solve(b * x);
    const double prev = result.history.back();
    const double cur = stress_value(d, to_layout(x));
    result.history.push_back(cur);
    result.iterations = it + 1;
    if (prev - cur <= cfg.tolerance * prev) break;
  }
  result.layout = centered(to_layout(x));
  return result;
}

template <class Rng>
Layout stress_majorization(const Graph& g, const SMConfig& cfg, Rng& rng) {
  return stress_majorization_run(g, cfg, rng).layout;
}

}  // namespace gdlab
