#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gdlab/csv.hpp"
#include "gdlab/nn/losses.hpp"
#include "gdlab/nn/lstm.hpp"
#include "gdlab/nn/params.hpp"
#include "gdlab/training/data.hpp"

namespace gdlab::training {

using nn::LossKind;
using nn::ModelParams;

class TrainingError : public Error {
 public:
  using Error::Error;
};

struct TrainConfig {
  LossKind loss = LossKind::SuS;
  double lr = 0.0015;
  int batch = 24;
  int epochs = 200;
  std::uint64_t seed = 0;
  int patience = 10;  // epochs without validation improvement before stopping
  std::size_t hidden = 64;
  std::optional<std::filesystem::path> checkpoint;

  void validate() const {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw std::invalid_argument("TrainConfig: lr must be finite and >= 0");
    if (batch < 1) throw std::invalid_argument("TrainConfig: batch must be >= 1");
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
    if (hidden < 1) throw std::invalid_argument("TrainConfig: hidden size must be >= 1");
  }
};

inline json to_json(const TrainConfig& c) {
  return {{"loss", std::string(nn::loss_name(c.loss))}, {"lr", c.lr}, {"batch", c.batch}, {"epochs", c.epochs},
          {"seed", c.seed}, {"patience", c.patience}, {"hidden", c.hidden}};
}

inline TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.loss = nn::parse_loss(j.value("loss", std::string("sus")));
  c.lr = j.value("lr", c.lr);
  c.batch = j.value("batch", c.batch);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.patience = j.value("patience", c.patience);
  c.hidden = j.value("hidden", c.hidden);
  c.validate();
  return c;
}

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double seconds = 0.0;
};

struct TrainLog {
  double initial_train_loss = 0.0;
  double initial_val_loss = 0.0;
  std::vector<EpochRecord> epochs;  // one per completed epoch
  int best_epoch = 0;               // 0 means the initial parameters were never beaten

  double best_val_loss() const {
    return best_epoch == 0 ? initial_val_loss : epochs[static_cast<std::size_t>(best_epoch - 1)].val_loss;
  }

  /// Columns epoch,train_loss,val_loss,seconds; epoch 0 holds the losses at initialization.
  std::string csv() const {
    std::string out = "epoch,train_loss,val_loss,seconds\n";
    out += csv::join({"0", csv::num(initial_train_loss), csv::num(initial_val_loss), "0"});
    for (const auto& e : epochs) {
      out += csv::join({std::to_string(e.epoch), csv::num(e.train_loss), csv::num(e.val_loss), csv::num(e.seconds)});
    }
    return out;
  }
};

/// Adam with bias correction; one moment pair per parameter tensor.
class Adam {
 public:
  Adam(const ModelParams& shape, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
    std::size_t i = 0;
    shape.for_each_tensor([&](std::string_view, const Eigen::Ref<nn::Matrix>& t) {
      m_[i] = nn::Matrix::Zero(t.rows(), t.cols());
      v_[i++] = nn::Matrix::Zero(t.rows(), t.cols());
    });
  }

  void step(ModelParams& params, const ModelParams& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, double(t_)), c2 = 1.0 - std::pow(b2_, double(t_));
    std::array<nn::Matrix, 8> g;
    std::size_t i = 0;
    grad.for_each_tensor([&](std::string_view, const Eigen::Ref<nn::Matrix>& t) { g[i++] = t; });
    i = 0;
    params.for_each_tensor([&](std::string_view, Eigen::Ref<nn::Matrix> p) {
      m_[i] = b1_ * m_[i] + (1.0 - b1_) * g[i];
      v_[i] = b2_ * v_[i] + (1.0 - b2_) * g[i].cwiseProduct(g[i]);
      p.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
      ++i;
    });
  }

 private:
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
  std::array<nn::Matrix, 8> m_, v_;
};

// ------------------------------------------------------------ batch losses

struct BatchOutcome {
  double loss = 0.0;                // mean over the batch
  std::vector<double> per_graph;    // in batch order
  std::optional<ModelParams> grad;  // gradient of the mean
};

inline nn::LossResult example_loss(LossKind kind, const Example& e, const Layout& pred) {
  if (kind == LossKind::PS) return nn::ps_loss(e.truth, pred);
  if (e.targets) return nn::sus_loss(*e.targets, pred);
  return nn::sus_loss(nn::make_stress_targets(e.dist, e.truth), pred);
}

/// Packs the examples (each encoded by BFS from its start node), runs the
/// model once and averages the per-graph losses.
inline BatchOutcome batch_loss(const ModelParams& params, const std::vector<const Example*>& batch,
                               const std::vector<NodeId>& starts, LossKind kind, bool with_grad) {
  std::vector<EncodedSequence> seqs;
  seqs.reserve(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    seqs.push_back(encode_features(batch[b]->graph, bfs_order(batch[b]->graph, starts[b]), params.k));
  }
  const auto packed = nn::batch_pack(seqs);
  const auto cache = nn::forward_batch(params, packed);
  BatchOutcome out;
  std::vector<nn::Matrix> dy;
  const double weight = 1.0 / double(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto r = example_loss(kind, *batch[b], nn::output_layout(packed, cache, b));
    out.per_graph.push_back(r.value);
    out.loss += r.value * weight;
    if (with_grad) nn::scatter_gradient(packed, b, r.grad, weight, dy);
  }
  if (with_grad) out.grad = nn::backward_batch(params, packed, cache, dy);
  return out;
}

/// Mean per-graph loss over a whole split, evaluated in chunks of `batch`.
inline double mean_loss(const ModelParams& params, const std::vector<Example>& examples,
                        const std::vector<NodeId>& starts, LossKind kind, int batch) {
  double total = 0.0;
  for (std::size_t lo = 0; lo < examples.size(); lo += std::size_t(batch)) {
    const std::size_t hi = std::min(examples.size(), lo + std::size_t(batch));
    std::vector<const Example*> chunk;
    for (std::size_t i = lo; i < hi; ++i) chunk.push_back(&examples[i]);
    const auto r = batch_loss(params, chunk, {starts.begin() + long(lo), starts.begin() + long(hi)}, kind, false);
    for (double v : r.per_graph) total += v;
  }
  return total / double(examples.size());
}

template <class Rng>
std::vector<NodeId> draw_starts(const std::vector<Example>& examples, Rng& rng) {
  std::vector<NodeId> starts;
  for (const auto& e : examples) starts.push_back(std::uniform_int_distribution<NodeId>(0, e.graph.size() - 1)(rng));
  return starts;
}

// ------------------------------------------------------------------- train

struct TrainResult {
  ModelParams params;  // best-validation parameters
  TrainLog log;
};

/// Seed of the stream that fixes BFS starts for loss reporting.
inline constexpr std::uint64_t kReportStream = 0x9e3779b97f4a7c15ULL;

inline TrainResult train(Split& train_set, Split& val_set, const TrainConfig& cfg,
                         const std::function<void(const EpochRecord&)>& on_epoch = {}) {
  cfg.validate();
  if (train_set.examples.empty()) throw TrainingError("training split is empty");
  if (val_set.examples.empty()) throw TrainingError("validation split is empty");
  if (train_set.k != val_set.k) {
    throw TrainingError("mixed feature widths: train k=" + std::to_string(train_set.k) +
                        ", val k=" + std::to_string(val_set.k));
  }
  if (cfg.loss == LossKind::SuS) {
    prepare_targets(train_set);
    prepare_targets(val_set);
  }
  using clock = std::chrono::steady_clock;
  std::mt19937_64 rng(cfg.seed);
  ModelParams params = nn::init_params(train_set.k, cfg.hidden, rng);
  std::mt19937_64 report_rng(cfg.seed ^ kReportStream);
  const auto train_report_starts = draw_starts(train_set.examples, report_rng);
  const auto val_starts = draw_starts(val_set.examples, report_rng);

  TrainResult result{params, {}};
  TrainLog& log = result.log;
  auto guarded = [&](int epoch, const char* what, auto&& f) {
    try {
      return f();
    } catch (const DegenerateInputError& e) {
      throw TrainingError("epoch " + std::to_string(epoch) + ", " + what + ": " + e.what());
    }
  };
  log.initial_train_loss =
      guarded(0, "initial train loss", [&] { return mean_loss(params, train_set.examples, train_report_starts, cfg.loss, cfg.batch); });
  log.initial_val_loss =
      guarded(0, "initial validation loss", [&] { return mean_loss(params, val_set.examples, val_starts, cfg.loss, cfg.batch); });
  if (!std::isfinite(log.initial_val_loss) || !std::isfinite(log.initial_train_loss)) {
    throw TrainingError("non-finite loss at initialization");
  }

  Adam adam(params, cfg.lr);
  double best = log.initial_val_loss;
  int since_best = 0;
  std::vector<std::size_t> order(train_set.examples.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    const auto starts = draw_starts(train_set.examples, rng);
    double epoch_total = 0.0;
    int batch_index = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += std::size_t(cfg.batch), ++batch_index) {
      const std::size_t hi = std::min(order.size(), lo + std::size_t(cfg.batch));
      std::vector<const Example*> batch;
      std::vector<NodeId> batch_starts;
      for (std::size_t i = lo; i < hi; ++i) {
        batch.push_back(&train_set.examples[order[i]]);
        batch_starts.push_back(starts[order[i]]);
      }
      const std::string where = "batch " + std::to_string(batch_index);
      auto r = guarded(epoch, where.c_str(), [&] { return batch_loss(params, batch, batch_starts, cfg.loss, true); });
      if (!std::isfinite(r.loss) || !r.grad->all_finite()) {
        throw TrainingError("non-finite loss or gradient at epoch " + std::to_string(epoch) + ", " + where);
      }
      for (double v : r.per_graph) epoch_total += v;
      adam.step(params, *r.grad);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_total / double(order.size());
    rec.val_loss =
        guarded(epoch, "validation", [&] { return mean_loss(params, val_set.examples, val_starts, cfg.loss, cfg.batch); });
    if (!std::isfinite(rec.val_loss)) throw TrainingError("non-finite validation loss at epoch " + std::to_string(epoch));
    rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.val_loss < best) {
      best = rec.val_loss;
      log.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  if (cfg.checkpoint) {
    nn::save_checkpoint(*cfg.checkpoint, result.params,
                        {{"train_config", to_json(cfg)}, {"best_epoch", log.best_epoch}, {"best_val_loss", best},
                         {"graph_class", train_set.graph_class}});
  }
  return result;
}

inline TrainResult train(const std::filesystem::path& dataset_dir, const TrainConfig& cfg,
                         const std::function<void(const EpochRecord&)>& on_epoch = {}) {
  Split tr = load_split(dataset_dir, "train");
  Split va = load_split(dataset_dir, "val");
  return train(tr, va, cfg, on_epoch);
}

}  // namespace gdlab::training
