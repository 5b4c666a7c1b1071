#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gdlab/csv.hpp"
#include "gdlab/generators/dataset.hpp"
#include "gdlab/harness/compare.hpp"
#include "gdlab/harness/run.hpp"
#include "gdlab/harness/svg.hpp"
#include "gdlab/io.hpp"
#include "gdlab/layouts/forceatlas2.hpp"
#include "gdlab/layouts/radial.hpp"
#include "gdlab/layouts/stress_majorization.hpp"
#include "gdlab/metrics/report.hpp"
#include "gdlab/training/evaluate.hpp"
#include "gdlab/training/trainer.hpp"

namespace fs = std::filesystem;
using namespace gdlab;

namespace {

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text(out, text);
}

std::vector<fs::path> graph_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    const auto& p = e.path();
    if (!e.is_regular_file() || p.extension() != ".json") continue;
    if (p.filename() == "dataset.json") continue;
    files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string graph_class = "Grids";
  std::string plan_file;
  std::string out;
  std::uint64_t seed = 0;
  int train = -1, val = -1, test = -1, k = -1;
  bool desk = false;
};

int cmd_gen(const GenArgs& a) {
  DatasetPlan plan;
  if (a.desk) plan = desk_grid_plan();
  else if (!a.plan_file.empty()) plan = plan_from_json(read_json(a.plan_file));
  else plan = standard_plan(parse_class(a.graph_class));
  if (a.train >= 0) plan.train = a.train;
  if (a.val >= 0) plan.val = a.val;
  if (a.test >= 0) {
    plan.test = a.test;
    plan.instances.clear();
  }
  if (a.k >= 0) plan.k = a.k;
  const auto jobs = build_dataset(plan, a.seed, a.out);
  std::cout << "wrote " << jobs.size() << " " << class_name(plan.graph_class) << " graphs to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- layout

struct LayoutArgs {
  std::string engine = "sm";
  std::string in, out;
  std::uint64_t seed = 0;
  int iters = 0;
  int root = 0;
};

int cmd_layout(const LayoutArgs& a) {
  GraphRecord rec = read_graph(a.in);
  std::mt19937_64 rng(a.seed);
  if (a.engine == "sm") {
    SMConfig c;
    if (a.iters > 0) c.max_iters = a.iters;
    rec.coords = stress_majorization(rec.graph, c, rng);
  } else if (a.engine == "fd") {
    FDConfig c;
    if (a.iters > 0) c.iterations = a.iters;
    rec.coords = forceatlas2(rec.graph, c, rng);
  } else {
    if (!is_tree(rec.graph)) throw Error("radial engine needs a tree");
    rec.coords = radial_tree_layout(rec.graph, NodeId(a.root));
  }
  rec.extra_meta["engine"] = a.engine;
  rec.extra_meta["layout_seed"] = a.seed;
  write_graph(a.out, rec);
  return 0;
}

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string in, out;
  bool canvas = false;
};

int cmd_metrics(const MetricsArgs& a) {
  auto measure_record = [&](const GraphRecord& r) {
    if (!r.coords) throw Error("graph record has no coordinates");
    return measure(r.graph, a.canvas ? fit_to_canvas(*r.coords) : *r.coords);
  };
  if (!fs::is_directory(a.in)) {
    emit(to_json(measure_record(read_graph(a.in))).dump(2) + "\n", a.out);
    return 0;
  }
  std::string text = csv::join({"id", "class", "n", "nc", "s", "ar"});
  for (const auto& p : graph_files(a.in)) {
    const GraphRecord r = read_graph(p);
    const auto m = measure_record(r);
    const std::string id = fs::relative(p, a.in).replace_extension().generic_string();
    text += csv::join({id, r.graph_class, std::to_string(r.graph.size()), std::to_string(m.nc), csv::num(m.s),
                       csv::num(m.ar)});
  }
  emit(text, a.out);
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data, out, loss = "sus";
  training::TrainConfig cfg;
};

int cmd_train(TrainArgs a) {
  a.cfg.loss = nn::parse_loss(a.loss);
  auto r = training::train(a.data, a.cfg, [](const training::EpochRecord& e) {
    std::cout << "epoch " << e.epoch << " train " << e.train_loss << " val " << e.val_loss << "\n";
  });
  const fs::path out(a.out);
  nn::save_checkpoint(out, r.params,
                      {{"best_epoch", r.log.best_epoch}, {"loss", a.loss}, {"train", training::to_json(a.cfg)}});
  fs::path log = out;
  log.replace_extension(".log.csv");
  write_text(log, r.log.csv());
  std::cout << "best epoch " << r.log.best_epoch << ", val " << r.log.best_val_loss() << "; checkpoint " << out.string()
            << ", log " << log.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string ckpt, test, out, loss = "sus", baselines = "fd,sm";
  std::uint64_t seed = 0;
  int fd_iters = 0;
};

int cmd_eval(const EvalArgs& a) {
  const auto params = nn::load_checkpoint(a.ckpt);
  const auto test = training::load_split(a.test, "test");
  training::EvalConfig ec;
  ec.loss = nn::parse_loss(a.loss);
  ec.fd = a.baselines.find("fd") != std::string::npos;
  ec.sm = a.baselines.find("sm") != std::string::npos;
  if (a.fd_iters > 0) ec.fd_config.iterations = a.fd_iters;
  ec.seed = a.seed;
  const fs::path out(a.out);
  ec.layout_dir = out / "layouts";
  const auto r = training::evaluate(params, test, ec);
  write_text(out / "results.csv", training::results_csv(r, test.graph_class, test.graph_class, ec.loss, ""));
  write_text(out / "per_graph.csv", training::per_graph_csv(r, test.graph_class));
  std::cout << read_text(out / "results.csv");
  return 0;
}

// ---------------------------------------------------------------- render

struct RenderArgs {
  std::string in, out, comment;
  double size = 800.0;
};

int cmd_render(const RenderArgs& a) {
  const GraphRecord r = read_graph(a.in);
  if (!r.coords) throw Error("graph record has no coordinates");
  harness::SvgStyle style;
  style.size = a.size;
  style.comment = a.comment;
  emit(harness::render_svg(r.graph, *r.coords, style), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gdlab: graph drawing experiments"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a dataset directory");
  g->add_option("--class", gen.graph_class, "graph class (Grids, GridsD, GridsRD, Delaunay, Caterp2, Caterp3, RRTrees, RSMTrees)");
  g->add_option("--plan", gen.plan_file, "dataset plan JSON; overrides --class");
  g->add_flag("--desk-grids", gen.desk, "small 3x3 to 5x5 grids");
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_option("--seed", gen.seed);
  g->add_option("--train", gen.train);
  g->add_option("--val", gen.val);
  g->add_option("--test", gen.test);
  g->add_option("--k", gen.k, "feature width");

  LayoutArgs lay;
  auto* l = app.add_subcommand("layout", "lay out one graph record");
  l->add_option("--engine", lay.engine)->check(CLI::IsMember({"sm", "fd", "radial"}));
  l->add_option("--in", lay.in)->required()->check(CLI::ExistingFile);
  l->add_option("--out", lay.out)->required();
  l->add_option("--seed", lay.seed);
  l->add_option("--iters", lay.iters, "iteration cap (0 keeps the engine default)");
  l->add_option("--root", lay.root, "root node for the radial engine");

  MetricsArgs met;
  auto* m = app.add_subcommand("metrics", "nc, s, ar of one record (JSON) or a directory (CSV)");
  m->add_option("--in", met.in)->required()->check(CLI::ExistingPath);
  m->add_option("--out", met.out, "output file, stdout by default");
  m->add_flag("--canvas", met.canvas, "fit to the 1000x1000 canvas first");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train the model on a dataset directory");
  t->add_option("--data", tr.data)->required()->check(CLI::ExistingDirectory);
  t->add_option("--loss", tr.loss)->check(CLI::IsMember({"ps", "sus"}));
  t->add_option("--lr", tr.cfg.lr);
  t->add_option("--batch", tr.cfg.batch);
  t->add_option("--epochs", tr.cfg.epochs);
  t->add_option("--patience", tr.cfg.patience);
  t->add_option("--hidden", tr.cfg.hidden);
  t->add_option("--seed", tr.cfg.seed);
  t->add_option("--out", tr.out, "checkpoint path")->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "evaluate a checkpoint against the baselines");
  e->add_option("--ckpt", ev.ckpt)->required()->check(CLI::ExistingFile);
  e->add_option("--test", ev.test, "dataset directory with a test split")->required()->check(CLI::ExistingDirectory);
  e->add_option("--loss", ev.loss, "loss reported per graph")->check(CLI::IsMember({"ps", "sus"}));
  e->add_option("--baselines", ev.baselines, "comma list of fd, sm; empty for none");
  e->add_option("--fd-iters", ev.fd_iters);
  e->add_option("--seed", ev.seed);
  e->add_option("--out", ev.out)->required();

  RenderArgs ren;
  auto* r = app.add_subcommand("render", "draw a graph record as SVG");
  r->add_option("--in", ren.in)->required()->check(CLI::ExistingFile);
  r->add_option("--out", ren.out, "SVG file, stdout by default");
  r->add_option("--size", ren.size);
  r->add_option("--comment", ren.comment);

  std::string spec;
  auto* run = app.add_subcommand("run", "run an experiment spec end to end");
  run->add_option("spec", spec)->required();

  std::vector<std::string> dirs;
  std::string cmp_out = "compare";
  auto* c = app.add_subcommand("compare", "compare results.csv of several runs");
  c->add_option("runs", dirs)->required()->expected(2, -1);
  c->add_option("--out", cmp_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*l) return cmd_layout(lay);
    if (*m) return cmd_metrics(met);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*r) return cmd_render(ren);
    if (*run) {
      harness::run_experiment(fs::path(spec), std::cerr);
      return 0;
    }
    if (*c) {
      std::vector<fs::path> paths(dirs.begin(), dirs.end());
      std::cout << harness::compare_report(paths, cmp_out).summary;
      return 0;
    }
  } catch (const harness::StageError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
