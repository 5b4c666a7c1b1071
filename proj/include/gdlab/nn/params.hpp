#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gdlab/io.hpp"

namespace gdlab::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Weights of one LSTM direction. Gate blocks are stacked in the order
/// input, forget, cell, output (each H rows).
struct LstmWeights {
  Matrix w_input;   // 4H x k
  Matrix w_hidden;  // 4H x H
  Vector bias;      // 4H
};

/// All trainable weights of the bidirectional layout model: one LSTM per
/// direction and a linear head from the concatenated hidden states to 2D.
struct ModelParams {
  std::size_t k = 0;
  std::size_t hidden = 0;
  LstmWeights fwd;
  LstmWeights bwd;
  Matrix out_weight;  // 2 x 2H
  Vector out_bias;    // 2

  static constexpr std::array<std::string_view, 8> kTensorNames = {
      "fwd.w_input", "fwd.w_hidden", "fwd.bias", "bwd.w_input", "bwd.w_hidden", "bwd.bias", "out.weight", "out.bias"};

  /// Calls f(name, tensor) for every tensor in kTensorNames order.
  template <class F>
  void for_each_tensor(F&& f) {
    f(kTensorNames[0], static_cast<Eigen::Ref<Matrix>>(fwd.w_input));
    f(kTensorNames[1], static_cast<Eigen::Ref<Matrix>>(fwd.w_hidden));
    f(kTensorNames[2], static_cast<Eigen::Ref<Matrix>>(fwd.bias));
    f(kTensorNames[3], static_cast<Eigen::Ref<Matrix>>(bwd.w_input));
    f(kTensorNames[4], static_cast<Eigen::Ref<Matrix>>(bwd.w_hidden));
    f(kTensorNames[5], static_cast<Eigen::Ref<Matrix>>(bwd.bias));
    f(kTensorNames[6], static_cast<Eigen::Ref<Matrix>>(out_weight));
    f(kTensorNames[7], static_cast<Eigen::Ref<Matrix>>(out_bias));
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    const_cast<ModelParams*>(this)->for_each_tensor(
        [&](std::string_view name, Eigen::Ref<Matrix> t) { f(name, static_cast<const Eigen::Ref<Matrix>&>(t)); });
  }

  std::size_t parameter_count() const {
    std::size_t total = 0;
    for_each_tensor([&](std::string_view, const Eigen::Ref<Matrix>& t) { total += static_cast<std::size_t>(t.size()); });
    return total;
  }

  /// Same shapes, all zeros; used for gradients and optimizer moments.
  ModelParams zeros_like() const {
    ModelParams z = *this;
    z.for_each_tensor([](std::string_view, Eigen::Ref<Matrix> t) { t.setZero(); });
    return z;
  }

  ModelParams& operator+=(const ModelParams& o) {
    apply_pairwise(o, [](Eigen::Ref<Matrix> a, const Matrix& b) { a += b; });
    return *this;
  }
  ModelParams& operator*=(double s) {
    for_each_tensor([s](std::string_view, Eigen::Ref<Matrix> t) { t *= s; });
    return *this;
  }

  template <class F>
  void apply_pairwise(const ModelParams& o, F&& f) {
    std::array<Matrix, 8> others;
    std::size_t i = 0;
    o.for_each_tensor([&](std::string_view, const Eigen::Ref<Matrix>& t) { others[i++] = t; });
    i = 0;
    for_each_tensor([&](std::string_view, Eigen::Ref<Matrix> t) { f(t, others[i++]); });
  }

  bool all_finite() const {
    bool ok = true;
    for_each_tensor([&](std::string_view, const Eigen::Ref<Matrix>& t) { ok = ok && t.allFinite(); });
    return ok;
  }
};

/// Throws std::logic_error when tensor shapes disagree with (k, hidden).
inline void check_shapes(const ModelParams& p) {
  const auto k = static_cast<Eigen::Index>(p.k), h = static_cast<Eigen::Index>(p.hidden);
  auto expect = [](const Matrix& m, Eigen::Index r, Eigen::Index c, const char* name) {
    if (m.rows() != r || m.cols() != c) {
      throw std::logic_error(std::string("tensor ") + name + " has shape " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected " + std::to_string(r) + "x" + std::to_string(c));
    }
  };
  for (const auto* dir : {&p.fwd, &p.bwd}) {
    expect(dir->w_input, 4 * h, k, "w_input");
    expect(dir->w_hidden, 4 * h, h, "w_hidden");
    expect(dir->bias, 4 * h, 1, "bias");
  }
  expect(p.out_weight, 2, 2 * h, "out.weight");
  expect(p.out_bias, 2, 1, "out.bias");
}

/// Weights uniform in (-1/sqrt(H), 1/sqrt(H)); forget-gate biases 1, other biases 0.
template <class Rng>
ModelParams init_params(std::size_t k, std::size_t hidden, Rng& rng) {
  if (k < 1 || hidden < 1) throw std::invalid_argument("init_params: k and H must be >= 1");
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> u(-bound, bound);
  const auto kk = static_cast<Eigen::Index>(k), h = static_cast<Eigen::Index>(hidden);
  auto uniform = [&](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
    return m;
  };
  auto direction = [&] {
    LstmWeights w{uniform(4 * h, kk), uniform(4 * h, h), Vector::Zero(4 * h)};
    w.bias.segment(h, h).setOnes();
    return w;
  };
  ModelParams p;
  p.k = k;
  p.hidden = hidden;
  p.fwd = direction();
  p.bwd = direction();
  p.out_weight = uniform(2, 2 * h);
  p.out_bias = Vector::Zero(2);
  return p;
}

// ------------------------------------------------------------- checkpoints

inline constexpr int kCheckpointVersion = 1;

/// Checkpoint JSON:
///   {"format": "gdlab-checkpoint", "version": 1, "k": K, "H": H,
///    "tensors": {name: {"rows": r, "cols": c, "data": [row-major doubles]}},
///    "meta": {...}}
/// Doubles are written in shortest round-trip form, so load(save(p)) == p bitwise.
inline nlohmann::json checkpoint_json(const ModelParams& p, const nlohmann::json& meta = nlohmann::json::object()) {
  nlohmann::json tensors = nlohmann::json::object();
  p.for_each_tensor([&](std::string_view name, const Eigen::Ref<Matrix>& t) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      for (Eigen::Index j = 0; j < t.cols(); ++j) data.push_back(t(i, j));
    tensors[std::string(name)] = {{"rows", t.rows()}, {"cols", t.cols()}, {"data", std::move(data)}};
  });
  return {{"format", "gdlab-checkpoint"}, {"version", kCheckpointVersion}, {"k", p.k}, {"H", p.hidden},
          {"tensors", std::move(tensors)}, {"meta", meta}};
}

inline ModelParams params_from_checkpoint(const nlohmann::json& j) {
  if (j.value("format", "") != "gdlab-checkpoint") throw Error("not a gdlab checkpoint");
  if (j.at("version").get<int>() != kCheckpointVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(j.at("version").get<int>()));
  }
  ModelParams p;
  p.k = j.at("k").get<std::size_t>();
  p.hidden = j.at("H").get<std::size_t>();
  const auto& tensors = j.at("tensors");
  auto load = [&](std::string_view name) {
    const auto& t = tensors.at(std::string(name));
    const auto r = t.at("rows").get<Eigen::Index>(), c = t.at("cols").get<Eigen::Index>();
    const auto& data = t.at("data");
    if (static_cast<Eigen::Index>(data.size()) != r * c) throw Error("tensor " + std::string(name) + " has wrong size");
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index jj = 0; jj < c; ++jj) m(i, jj) = data[static_cast<std::size_t>(i * c + jj)].get<double>();
    return m;
  };
  p.fwd = {load("fwd.w_input"), load("fwd.w_hidden"), load("fwd.bias")};
  p.bwd = {load("bwd.w_input"), load("bwd.w_hidden"), load("bwd.bias")};
  p.out_weight = load("out.weight");
  p.out_bias = load("out.bias");
  check_shapes(p);
  return p;
}

inline void save_checkpoint(const std::filesystem::path& path, const ModelParams& p,
                            const nlohmann::json& meta = nlohmann::json::object()) {
  write_json(path, checkpoint_json(p, meta));
}

inline ModelParams load_checkpoint(const std::filesystem::path& path) {
  try {
    return params_from_checkpoint(read_json(path));
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(path, e.what());
  }
}

}  // namespace gdlab::nn
