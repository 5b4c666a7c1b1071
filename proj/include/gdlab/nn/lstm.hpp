#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"
#include "gdlab/nn/params.hpp"

namespace gdlab::nn {

/// Sequences of different lengths packed column-wise. Position t of sequence
/// b lives in column b of x[t]; positions at or past lengths[b] are zero
/// vectors with mask 0.
struct PackedBatch {
  std::size_t k = 0;
  std::size_t steps = 0;
  std::size_t batch = 0;
  std::vector<Matrix> x;                    // steps entries, each k x batch
  Matrix mask;                              // steps x batch, 1 valid, 0 padding
  std::vector<std::size_t> lengths;         // per sequence
  std::vector<std::vector<NodeId>> orders;  // BFS order per sequence

  bool valid(std::size_t t, std::size_t b) const { return mask(Eigen::Index(t), Eigen::Index(b)) != 0.0; }
};

inline PackedBatch batch_pack(const std::vector<const EncodedSequence*>& seqs) {
  if (seqs.empty()) throw std::invalid_argument("batch_pack: empty batch");
  PackedBatch p;
  p.k = seqs.front()->width();
  p.batch = seqs.size();
  for (const auto* s : seqs) {
    if (s->width() != p.k) throw std::invalid_argument("batch_pack: sequences have different feature widths");
    if (s->length() == 0) throw std::invalid_argument("batch_pack: empty sequence");
    p.steps = std::max(p.steps, s->length());
    p.lengths.push_back(s->length());
    p.orders.push_back(s->order());
  }
  const auto kk = Eigen::Index(p.k), bb = Eigen::Index(p.batch);
  p.x.assign(p.steps, Matrix::Zero(kk, bb));
  p.mask = Matrix::Zero(Eigen::Index(p.steps), bb);
  for (std::size_t b = 0; b < p.batch; ++b) {
    for (std::size_t t = 0; t < seqs[b]->length(); ++t) {
      p.mask(Eigen::Index(t), Eigen::Index(b)) = 1.0;
      for (std::size_t j = 0; j < p.k; ++j) p.x[t](Eigen::Index(j), Eigen::Index(b)) = seqs[b]->feature(t, j);
    }
  }
  return p;
}

inline PackedBatch batch_pack(const std::vector<EncodedSequence>& seqs) {
  std::vector<const EncodedSequence*> ptrs;
  for (const auto& s : seqs) ptrs.push_back(&s);
  return batch_pack(ptrs);
}

/// Activations of one direction, indexed by sequence position.
struct DirectionCache {
  std::vector<Matrix> gates;   // 4H x B: sigmoid(i), sigmoid(f), tanh(g), sigmoid(o)
  std::vector<Matrix> cell;    // H x B, state after the position
  std::vector<Matrix> tanh_c;  // H x B, tanh of the freshly computed cell
  std::vector<Matrix> hidden;  // H x B, state after the position
};

struct ForwardCache {
  DirectionCache fwd;
  DirectionCache bwd;
  std::vector<Matrix> y;  // 2 x B per position
};

namespace detail {

inline Matrix sigmoid(const Matrix& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

// Position processed before t in this direction, or -1 for the zero state.
inline long prev_position(long t, long steps, bool reverse) {
  const long p = reverse ? t + 1 : t - 1;
  return (p < 0 || p >= steps) ? -1 : p;
}

inline DirectionCache run_direction(const LstmWeights& w, const PackedBatch& batch, Eigen::Index h, bool reverse) {
  const long steps = long(batch.steps);
  const auto bb = Eigen::Index(batch.batch);
  DirectionCache c;
  c.gates.resize(batch.steps);
  c.cell.resize(batch.steps);
  c.tanh_c.resize(batch.steps);
  c.hidden.resize(batch.steps);
  const Matrix zero = Matrix::Zero(h, bb);
  for (long s = 0; s < steps; ++s) {
    const long t = reverse ? steps - 1 - s : s;
    const long p = prev_position(t, steps, reverse);
    const Matrix& hp = p < 0 ? zero : c.hidden[p];
    const Matrix& cp = p < 0 ? zero : c.cell[p];
    Matrix z = w.w_input * batch.x[t] + w.w_hidden * hp;
    z.colwise() += w.bias;
    Matrix gates(4 * h, bb);
    gates.topRows(2 * h) = sigmoid(z.topRows(2 * h));
    gates.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
    gates.bottomRows(h) = sigmoid(z.bottomRows(h));
    Matrix cn = gates.middleRows(h, h).cwiseProduct(cp) + gates.topRows(h).cwiseProduct(gates.middleRows(2 * h, h));
    Matrix tc = cn.array().tanh().matrix();
    Matrix hn = gates.bottomRows(h).cwiseProduct(tc);
    // padded positions carry the previous state through unchanged
    for (Eigen::Index b = 0; b < bb; ++b) {
      if (!batch.valid(std::size_t(t), std::size_t(b))) {
        cn.col(b) = cp.col(b);
        hn.col(b) = hp.col(b);
      }
    }
    c.gates[t] = std::move(gates);
    c.cell[t] = std::move(cn);
    c.tanh_c[t] = std::move(tc);
    c.hidden[t] = std::move(hn);
  }
  return c;
}

// Backpropagation through time for one direction. d_hidden[t] is the loss
// gradient arriving at the hidden state of position t from the output head.
inline void backprop_direction(const LstmWeights& w, const PackedBatch& batch, const DirectionCache& c,
                               const std::vector<Matrix>& d_hidden, Eigen::Index h, bool reverse, LstmWeights& grad) {
  const long steps = long(batch.steps);
  const auto bb = Eigen::Index(batch.batch);
  const Matrix zero = Matrix::Zero(h, bb);
  Matrix dh_next = zero, dc_next = zero;
  for (long s = steps - 1; s >= 0; --s) {
    const long t = reverse ? steps - 1 - s : s;
    const long p = prev_position(t, steps, reverse);
    const Matrix& hp = p < 0 ? zero : c.hidden[p];
    const Matrix& cp = p < 0 ? zero : c.cell[p];
    const Eigen::RowVectorXd m = batch.mask.row(t);
    const Eigen::RowVectorXd unmasked = Eigen::RowVectorXd::Ones(bb) - m;

    const Matrix dh = d_hidden[t] + dh_next;
    const auto& g = c.gates[t];
    const auto ig = g.topRows(h).array(), fg = g.middleRows(h, h).array();
    const auto cg = g.middleRows(2 * h, h).array(), og = g.bottomRows(h).array();
    const auto tc = c.tanh_c[t].array();

    const Eigen::ArrayXXd dc = dc_next.array() + dh.array() * og * (1.0 - tc * tc);
    Matrix dz(4 * h, bb);
    dz.topRows(h) = (dc * cg * ig * (1.0 - ig)).matrix();
    dz.middleRows(h, h) = (dc * cp.array() * fg * (1.0 - fg)).matrix();
    dz.middleRows(2 * h, h) = (dc * ig * (1.0 - cg * cg)).matrix();
    dz.bottomRows(h) = (dh.array() * tc * og * (1.0 - og)).matrix();
    dz.array().rowwise() *= m.array();

    grad.w_input.noalias() += dz * batch.x[t].transpose();
    grad.w_hidden.noalias() += dz * hp.transpose();
    grad.bias += dz.rowwise().sum();

    Matrix dc_prev = (dc * fg).matrix();
    dc_prev.array().rowwise() *= m.array();
    dc_prev += (dc_next.array().rowwise() * unmasked.array()).matrix();
    Matrix dh_prev = w.w_hidden.transpose() * dz;
    dh_prev += (dh.array().rowwise() * unmasked.array()).matrix();
    dh_next = std::move(dh_prev);
    dc_next = std::move(dc_prev);
  }
}

}  // namespace detail

inline ForwardCache forward_batch(const ModelParams& params, const PackedBatch& batch) {
  if (batch.k != params.k) {
    throw std::invalid_argument("feature width " + std::to_string(batch.k) + " does not match model width " +
                                std::to_string(params.k));
  }
  const auto h = Eigen::Index(params.hidden);
  ForwardCache c;
  c.fwd = detail::run_direction(params.fwd, batch, h, false);
  c.bwd = detail::run_direction(params.bwd, batch, h, true);
  c.y.resize(batch.steps);
  for (std::size_t t = 0; t < batch.steps; ++t) {
    Matrix y = params.out_weight.leftCols(h) * c.fwd.hidden[t] + params.out_weight.rightCols(h) * c.bwd.hidden[t];
    y.colwise() += params.out_bias;
    c.y[t] = std::move(y);
  }
  return c;
}

/// Parameter gradients given dy[t] = dLoss/dy at each position (2 x B).
/// Entries at padded positions must be zero.
inline ModelParams backward_batch(const ModelParams& params, const PackedBatch& batch, const ForwardCache& c,
                                  const std::vector<Matrix>& dy) {
  const auto h = Eigen::Index(params.hidden);
  ModelParams grad = params.zeros_like();
  std::vector<Matrix> dh_fwd(batch.steps), dh_bwd(batch.steps);
  for (std::size_t t = 0; t < batch.steps; ++t) {
    grad.out_weight.leftCols(h).noalias() += dy[t] * c.fwd.hidden[t].transpose();
    grad.out_weight.rightCols(h).noalias() += dy[t] * c.bwd.hidden[t].transpose();
    grad.out_bias += dy[t].rowwise().sum();
    dh_fwd[t] = params.out_weight.leftCols(h).transpose() * dy[t];
    dh_bwd[t] = params.out_weight.rightCols(h).transpose() * dy[t];
  }
  detail::backprop_direction(params.fwd, batch, c.fwd, dh_fwd, h, false, grad.fwd);
  detail::backprop_direction(params.bwd, batch, c.bwd, dh_bwd, h, true, grad.bwd);
  return grad;
}

/// Predicted layout of sequence b, indexed by node.
inline Layout output_layout(const PackedBatch& batch, const ForwardCache& c, std::size_t b) {
  std::vector<Point> pts(batch.lengths[b]);
  for (std::size_t t = 0; t < batch.lengths[b]; ++t) {
    pts[batch.orders[b][t]] = {c.y[t](0, Eigen::Index(b)), c.y[t](1, Eigen::Index(b))};
  }
  return Layout(std::move(pts));
}

/// Writes a node-indexed coordinate gradient of sequence b into dy, scaled by `weight`.
inline void scatter_gradient(const PackedBatch& batch, std::size_t b, const std::vector<Point>& node_grad,
                             double weight, std::vector<Matrix>& dy) {
  if (dy.size() != batch.steps) dy.assign(batch.steps, Matrix::Zero(2, Eigen::Index(batch.batch)));
  for (std::size_t t = 0; t < batch.lengths[b]; ++t) {
    const Point& g = node_grad[batch.orders[b][t]];
    dy[t](0, Eigen::Index(b)) = weight * g.x;
    dy[t](1, Eigen::Index(b)) = weight * g.y;
  }
}

struct ForwardPass {
  PackedBatch batch;
  ForwardCache cache;
  Layout layout;
};

inline ForwardPass forward_pass(const ModelParams& params, const EncodedSequence& seq) {
  ForwardPass f;
  f.batch = batch_pack({&seq});
  f.cache = forward_batch(params, f.batch);
  f.layout = output_layout(f.batch, f.cache, 0);
  return f;
}

/// Coordinates for every node of the encoded graph.
inline Layout forward(const ModelParams& params, const EncodedSequence& seq) {
  return forward_pass(params, seq).layout;
}

/// Parameter gradients for a node-indexed upstream coordinate gradient.
inline ModelParams backward(const ModelParams& params, const ForwardPass& pass, const std::vector<Point>& upstream) {
  if (upstream.size() != pass.layout.size()) throw std::invalid_argument("backward: gradient size mismatch");
  std::vector<Matrix> dy;
  scatter_gradient(pass.batch, 0, upstream, 1.0, dy);
  return backward_batch(params, pass.batch, pass.cache, dy);
}

inline ModelParams backward(const ModelParams& params, const EncodedSequence& seq, const std::vector<Point>& upstream) {
  return backward(params, forward_pass(params, seq), upstream);
}

}  // namespace gdlab::nn
