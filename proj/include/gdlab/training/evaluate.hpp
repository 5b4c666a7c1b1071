#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gdlab/csv.hpp"
#include "gdlab/io.hpp"
#include "gdlab/layouts/forceatlas2.hpp"
#include "gdlab/layouts/stress_majorization.hpp"
#include "gdlab/metrics/report.hpp"
#include "gdlab/nn/lstm.hpp"
#include "gdlab/training/trainer.hpp"

namespace gdlab::training {

struct EvalConfig {
  LossKind loss = LossKind::SuS;  // loss reported in the LF column
  bool fd = true;
  bool sm = true;
  FDConfig fd_config;
  SMConfig sm_config;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> layout_dir;  // canvas layouts per technique when set
};

struct GraphEval {
  std::string id;
  std::string bucket;
  std::size_t n = 0;
  std::size_t m = 0;
  double loss = 0.0;
  MetricReport model;
  std::optional<MetricReport> fd;
  std::optional<MetricReport> sm;
};

struct MetricMeans {
  double nc = 0.0, s = 0.0, ar = 0.0;
};

struct BucketSummary {
  std::string bucket;
  std::size_t graphs = 0;
  double loss = 0.0;
  MetricMeans model;
  std::optional<MetricMeans> fd;
  std::optional<MetricMeans> sm;
};

struct EvalResult {
  std::vector<GraphEval> graphs;
  std::vector<BucketSummary> buckets;  // buckets in first-seen order, then "all"
};

inline constexpr const char* kTechniques[] = {"model", "fd", "sm"};

namespace detail {

inline void store_layout(const std::filesystem::path& root, const std::string& technique, const Example& e,
                         const Layout& l) {
  GraphRecord rec{e.graph, l, e.graph_class, 0, {{"id", e.id}, {"bucket", e.bucket}, {"technique", technique}}};
  write_graph(root / technique / (e.id + ".json"), rec);
}

inline BucketSummary summarize(const std::string& name, const std::vector<const GraphEval*>& rows) {
  BucketSummary b;
  b.bucket = name;
  b.graphs = rows.size();
  const double inv = 1.0 / double(rows.size());
  auto add = [inv](MetricMeans& m, const MetricReport& r) {
    m.nc += double(r.nc) * inv;
    m.s += r.s * inv;
    m.ar += r.ar * inv;
  };
  for (const auto* r : rows) {
    b.loss += r->loss * inv;
    add(b.model, r->model);
    if (r->fd) add(b.fd ? *b.fd : b.fd.emplace(), *r->fd);
    if (r->sm) add(b.sm ? *b.sm : b.sm.emplace(), *r->sm);
  }
  return b;
}

}  // namespace detail

/// Lays out every test graph with the model and the requested baselines,
/// fits each layout to the 1000x1000 canvas and measures nc, s and ar.
inline EvalResult evaluate(const ModelParams& params, const Split& test, const EvalConfig& cfg) {
  if (test.k != params.k) {
    throw Error("test data has feature width k=" + std::to_string(test.k) + " but the model expects k=" +
                std::to_string(params.k));
  }
  if (test.examples.empty()) throw Error("test split is empty");
  std::mt19937_64 start_rng(cfg.seed ^ kReportStream);
  const auto starts = draw_starts(test.examples, start_rng);
  EvalResult result;
  for (std::size_t i = 0; i < test.examples.size(); ++i) {
    const Example& e = test.examples[i];
    GraphEval row;
    row.id = e.id;
    row.bucket = e.bucket;
    row.n = e.graph.size();
    row.m = e.graph.edge_count();
    try {
      const Layout raw = nn::forward(params, encode_features(e.graph, bfs_order(e.graph, starts[i]), params.k));
      row.loss = example_loss(cfg.loss, e, raw).value;
      const Layout model = fit_to_canvas(raw);
      row.model = measure(e.graph, e.dist, model);
      if (cfg.layout_dir) detail::store_layout(*cfg.layout_dir, "model", e, model);
      if (cfg.fd) {
        std::mt19937_64 rng(cfg.seed ^ (i * 2 + 1));
        const Layout fd = fit_to_canvas(forceatlas2(e.graph, cfg.fd_config, rng));
        row.fd = measure(e.graph, e.dist, fd);
        if (cfg.layout_dir) detail::store_layout(*cfg.layout_dir, "fd", e, fd);
      }
      if (cfg.sm) {
        std::mt19937_64 rng(cfg.seed ^ (i * 2 + 2));
        const Layout sm = fit_to_canvas(stress_majorization(e.graph, cfg.sm_config, rng));
        row.sm = measure(e.graph, e.dist, sm);
        if (cfg.layout_dir) detail::store_layout(*cfg.layout_dir, "sm", e, sm);
      }
    } catch (const Error& err) {
      throw Error("evaluating " + e.id + ": " + err.what());
    }
    result.graphs.push_back(std::move(row));
  }

  std::vector<std::string> names;
  std::map<std::string, std::vector<const GraphEval*>> by_bucket;
  std::vector<const GraphEval*> all;
  for (const auto& g : result.graphs) {
    if (!by_bucket.count(g.bucket)) names.push_back(g.bucket);
    by_bucket[g.bucket].push_back(&g);
    all.push_back(&g);
  }
  for (const auto& name : names) {
    if (name != "all") result.buckets.push_back(detail::summarize(name, by_bucket[name]));
  }
  result.buckets.push_back(detail::summarize("all", all));
  return result;
}

inline const std::vector<std::string>& results_header() {
  static const std::vector<std::string> h = {"train_class", "test_class", "bucket", "graphs", "loss_kind",
                                             "loss_value",  "model_nc",   "model_s", "model_ar", "fd_nc",
                                             "fd_s",        "fd_ar",      "sm_nc",   "sm_s",     "sm_ar",
                                             "spec_hash"};
  return h;
}

/// One row per bucket: the loss value, then nc/s/ar for model, FD and SM.
inline std::string results_csv(const EvalResult& r, const std::string& train_class, const std::string& test_class,
                               LossKind loss, const std::string& spec_hash) {
  std::string out = csv::join(results_header());
  auto means = [](const std::optional<MetricMeans>& m, std::vector<std::string>& row) {
    if (m) {
      row.insert(row.end(), {csv::num(m->nc), csv::num(m->s), csv::num(m->ar)});
    } else {
      row.insert(row.end(), {"", "", ""});
    }
  };
  for (const auto& b : r.buckets) {
    std::vector<std::string> row = {train_class, test_class, b.bucket, std::to_string(b.graphs),
                                    std::string(nn::loss_name(loss)), csv::num(b.loss)};
    means(b.model, row);
    means(b.fd, row);
    means(b.sm, row);
    row.push_back(spec_hash);
    out += csv::join(row);
  }
  return out;
}

/// One row per graph and technique, recomputable from the stored layouts.
inline std::string per_graph_csv(const EvalResult& r, const std::string& graph_class) {
  std::string out = csv::join({"id", "class", "bucket", "technique", "n", "m", "nc", "s", "ar"});
  for (const auto& g : r.graphs) {
    auto row = [&](const char* technique, const MetricReport& m) {
      out += csv::join({g.id, graph_class, g.bucket, technique, std::to_string(g.n), std::to_string(g.m),
                        std::to_string(m.nc), csv::num(m.s), csv::num(m.ar)});
    };
    row("model", g.model);
    if (g.fd) row("fd", *g.fd);
    if (g.sm) row("sm", *g.sm);
  }
  return out;
}

}  // namespace gdlab::training
