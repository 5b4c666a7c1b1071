#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"
#include "gdlab/metrics/procrustes.hpp"

namespace gdlab::nn {

enum class LossKind { PS, SuS };

inline std::string_view loss_name(LossKind k) { return k == LossKind::PS ? "ps" : "sus"; }

inline LossKind parse_loss(std::string_view s) {
  if (s == "ps" || s == "PS") return LossKind::PS;
  if (s == "sus" || s == "SuS" || s == "SUS") return LossKind::SuS;
  throw std::invalid_argument("unknown loss kind '" + std::string(s) + "' (expected ps or sus)");
}

/// Loss value and its gradient with respect to each predicted node position.
struct LossResult {
  double value = 0.0;
  std::vector<Point> grad;
};

/// Procrustes statistic of pred against target, differentiated through
/// centering, RMS scaling and the optimal rotation and scale.
inline LossResult ps_loss(const Layout& target, const Layout& pred) {
  const ProcrustesResult r = procrustes_align(target, pred);  // validates inputs
  const std::size_t n = pred.size();
  const double nn = static_cast<double>(n);
  const auto a = gdlab::detail::normalize_shape(target);
  const auto b = gdlab::detail::normalize_shape(pred);
  const auto cov = gdlab::detail::covariance(a, b);

  // gradient w.r.t. the normalized prediction points
  std::vector<Point> gb(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& t = a.points[i];
    gb[i] = Point{cov.dot * t.x + cov.cross * t.y, cov.dot * t.y - cov.cross * t.x} * (-2.0 / nn);
  }
  // back through b = c / rms, rms = sqrt(sum |c|^2 / n)
  double gc_dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) gc_dot += dot(gb[i], b.points[i]);
  LossResult out;
  out.value = r.statistic;
  out.grad.resize(n);
  Point mean{};
  for (std::size_t i = 0; i < n; ++i) {
    out.grad[i] = (gb[i] - b.points[i] * (gc_dot / nn)) * (1.0 / b.rms);
    mean = mean + out.grad[i];
  }
  // back through centering
  mean = mean * (1.0 / nn);
  for (Point& g : out.grad) g = g - mean;
  return out;
}

/// Precomputed supervision for the stress loss: hop distances D, weights
/// W = D^-2 (zero diagonal) and the ground-truth stress terms S = W (E - D)^2.
struct StressTargets {
  Eigen::MatrixXd d;
  Eigen::MatrixXd w;
  Eigen::MatrixXd s;

  std::size_t size() const { return static_cast<std::size_t>(d.rows()); }
};

inline StressTargets make_stress_targets(const DistanceMatrix& dist, const Layout& truth) {
  const std::size_t n = dist.size();
  if (truth.size() != n) throw std::invalid_argument("stress targets: layout size differs from graph size");
  const auto nn = static_cast<Eigen::Index>(n);
  StressTargets t{Eigen::MatrixXd::Zero(nn, nn), Eigen::MatrixXd::Zero(nn, nn), Eigen::MatrixXd::Zero(nn, nn)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dij = dist(i, j);
      const double e = distance(truth[i], truth[j]);
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      t.d(ii, jj) = dij;
      t.w(ii, jj) = 1.0 / (dij * dij);
      t.s(ii, jj) = t.w(ii, jj) * (e - dij) * (e - dij);
    }
  }
  return t;
}

inline StressTargets make_stress_targets(const Graph& g, const Layout& truth) {
  return make_stress_targets(shortest_path_matrix(g), truth);
}

/// Half the squared difference between S and the predicted stress terms
/// W (E - D)^2, summed over all ordered pairs.
inline LossResult sus_loss(const StressTargets& t, const Layout& pred) {
  const std::size_t n = t.size();
  if (pred.size() != n) throw std::invalid_argument("sus_loss: layout size differs from targets");
  LossResult out;
  out.grad.assign(n, Point{});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      const Point diff = pred[i] - pred[j];
      const double e = norm(diff);
      const double gap = e - t.d(ii, jj);
      const double resid = t.s(ii, jj) - t.w(ii, jj) * gap * gap;
      out.value += resid * resid;  // ordered pairs (i,j) and (j,i) halve to one term
      if (e > 0.0) {
        const double coeff = -4.0 * resid * t.w(ii, jj) * gap / e;
        out.grad[i] = out.grad[i] + diff * coeff;
        out.grad[j] = out.grad[j] - diff * coeff;
      }
    }
  }
  return out;
}

}  // namespace gdlab::nn
