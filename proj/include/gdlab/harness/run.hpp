#pragma once

#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

#include "gdlab/generators/dataset.hpp"
#include "gdlab/harness/spec.hpp"
#include "gdlab/harness/svg.hpp"
#include "gdlab/io.hpp"
#include "gdlab/training/evaluate.hpp"
#include "gdlab/training/trainer.hpp"

namespace gdlab::harness {

namespace fs = std::filesystem;

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

/// gen -> train -> eval -> render for one spec. Output directory contents:
///   spec.json          materialized spec (defaults filled in, hash included)
///   data/train/        generated dataset of the training class
///   data/test/         cross-class test dataset, when the spec has one
///   model.json         best-validation checkpoint
///   train_log.csv      epoch,train_loss,val_loss,seconds
///   results.csv        one row per test bucket plus "all"
///   per_graph.csv      per graph and technique metrics
///   layouts/<tech>/    canvas layouts behind the metrics
///   svg/               truth and technique drawings of the first test graphs
inline fs::path run_experiment(ExperimentSpec spec, std::ostream& log) {
  if (auto seed = apply_seed_override(spec)) log << "LAB_SEED overrides spec seed: " << *seed << "\n";
  spec.train.seed = spec.seed;  // the global seed drives training too
  const std::string hash = spec_hash(spec);
  const fs::path out = spec.output_dir;
  stage("parse", [&] {
    fs::create_directories(out);
    json stored = to_json(spec);
    stored["spec_hash"] = hash;
    write_json(out / "spec.json", stored);
    return 0;
  });
  log << "experiment " << spec.name << " (spec " << hash << ") -> " << out.string() << "\n";

  const fs::path train_dir = out / "data" / "train";
  const fs::path test_dir = spec.test ? out / "data" / "test" : train_dir;
  stage("gen", [&] {
    fs::remove_all(out / "data");
    build_dataset(spec.generator, spec.seed, train_dir);
    if (spec.test) build_dataset(*spec.test, spec.seed ^ 0x7e57ULL, test_dir);
    return 0;
  });
  log << "gen: datasets written\n";

  training::TrainConfig tc = spec.train;
  const auto trained = stage("train", [&] {
    training::Split tr = training::load_split(train_dir, "train");
    training::Split va = training::load_split(train_dir, "val");
    auto r = training::train(tr, va, tc, [&](const training::EpochRecord& e) {
      if (e.epoch % 10 == 0) log << "train: epoch " << e.epoch << " val " << e.val_loss << "\n";
    });
    nn::save_checkpoint(out / "model.json", r.params,
                        {{"spec_hash", hash}, {"best_epoch", r.log.best_epoch}, {"loss", std::string(nn::loss_name(tc.loss))}});
    write_text(out / "train_log.csv", r.log.csv());
    return r;
  });
  log << "train: best epoch " << trained.log.best_epoch << ", val loss " << trained.log.initial_val_loss << " -> "
      << trained.log.best_val_loss() << "\n";

  const training::Split test = stage("eval", [&] { return training::load_split(test_dir, "test"); });
  const auto result = stage("eval", [&] {
    training::EvalConfig ec;
    ec.loss = tc.loss;
    ec.fd = spec.fd;
    ec.fd_config = spec.fd_config;
    ec.sm = spec.sm;
    ec.sm_config = spec.sm_config;
    ec.seed = spec.seed;
    ec.layout_dir = out / "layouts";
    fs::remove_all(out / "layouts");
    auto r = training::evaluate(trained.params, test, ec);
    const std::string train_class(class_name(spec.generator.graph_class));
    const std::string test_class(class_name(spec.test ? spec.test->graph_class : spec.generator.graph_class));
    write_text(out / "results.csv", training::results_csv(r, train_class, test_class, tc.loss, hash));
    write_text(out / "per_graph.csv", training::per_graph_csv(r, test_class));
    return r;
  });
  log << "eval: " << result.graphs.size() << " test graphs\n";

  stage("render", [&] {
    fs::remove_all(out / "svg");
    const std::size_t count = std::min<std::size_t>(std::size_t(spec.render_count), test.examples.size());
    for (std::size_t i = 0; i < count; ++i) {
      const auto& e = test.examples[i];
      const std::string stem = fs::path(e.id).filename().string();
      SvgStyle style;
      style.comment = "spec " + hash + " graph " + e.id + " truth";
      write_text(out / "svg" / (stem + "_truth.svg"), render_svg(e.graph, e.truth, style));
      for (const char* tech : training::kTechniques) {
        const fs::path lp = out / "layouts" / tech / (e.id + ".json");
        if (!fs::exists(lp)) continue;
        style.comment = "spec " + hash + " graph " + e.id + " " + tech;
        write_text(out / "svg" / (stem + "_" + tech + ".svg"), render_svg(e.graph, *read_graph(lp).coords, style));
      }
    }
    return 0;
  });
  log << "render: done\n";
  return out;
}

inline fs::path run_experiment(const fs::path& spec_path, std::ostream& log) {
  return run_experiment(load_spec(spec_path), log);
}

}  // namespace gdlab::harness
