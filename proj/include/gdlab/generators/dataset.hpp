#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gdlab/generators/generators.hpp"
#include "gdlab/io.hpp"

namespace gdlab {

struct SizeRange {
  int min = 0;
  int max = 0;
  friend bool operator==(const SizeRange&, const SizeRange&) = default;
};

/// One bucket of the test split: `count` graphs of (roughly) `nodes` nodes.
/// Grid classes use rows x cols; the other classes use `nodes` directly.
struct InstanceBucket {
  int count = 0;
  int nodes = 0;
  int rows = 0;
  int cols = 0;
  friend bool operator==(const InstanceBucket&, const InstanceBucket&) = default;
};

/// Everything needed to regenerate a dataset: class, split sizes, the size
/// distribution of random graphs, the fixed-size test buckets, and the
/// class parameters.
struct DatasetPlan {
  GraphClass graph_class = GraphClass::Grids;
  int train = 0;
  int val = 0;
  int test = 0;  // used only when `instances` is empty
  int k = 49;    // feature width recorded for training

  SizeRange rows{10, 24};
  SizeRange cols{10, 24};
  SizeRange points{25, 100};
  SizeRange levels{4, 5};
  SizeRange tree_nodes{50, 625};
  std::vector<InstanceBucket> instances;

  double p_diag = 0.05;
  CaterpillarConfig caterpillar{};
  TreeConfig tree{};

  friend bool operator==(const DatasetPlan&, const DatasetPlan&) = default;
};

/// Default split sizes, size ranges and test buckets for each class.
inline DatasetPlan standard_plan(GraphClass c) {
  DatasetPlan p;
  p.graph_class = c;
  auto buckets = [](std::initializer_list<int> sizes) {
    std::vector<InstanceBucket> out;
    for (int s : sizes) out.push_back({50, s, 0, 0});
    return out;
  };
  switch (c) {
    case GraphClass::Grids:
      p.train = 72, p.val = 24, p.test = 24, p.k = 49;
      break;
    case GraphClass::GridsD:
      // 21 x 21 keeps the full-diagonal edge count under the table's 1680
      p.train = 72, p.val = 24, p.test = 24, p.k = 49;
      p.rows = {10, 21}, p.cols = {10, 21};
      break;
    case GraphClass::GridsRD:
      p.train = 72, p.val = 24, p.k = 49;
      p.instances = {{50, 120, 10, 12}, {50, 208, 13, 16}, {50, 240, 15, 16}, {50, 360, 18, 20}};
      break;
    case GraphClass::Delaunay:
      p.train = 1000, p.val = 200, p.k = 30;
      p.instances = buckets({25, 50, 75, 100});
      break;
    case GraphClass::Caterp2:
      p.train = 400, p.val = 50, p.k = 113;
      p.caterpillar.stars = 2;
      p.instances = buckets({18, 38, 58, 78});
      break;
    case GraphClass::Caterp3:
      p.train = 400, p.val = 50, p.k = 113;
      p.caterpillar.stars = 3;
      p.instances = buckets({26, 44, 62, 80});
      break;
    case GraphClass::RRTrees:
    case GraphClass::RSMTrees:
      p.train = 500, p.val = 50, p.k = 397;
      p.instances = buckets({50, 100, 150, 200});
      break;
  }
  return p;
}

/// Small grids for CPU-scale experiments: 3x3 to 5x5.
inline DatasetPlan desk_grid_plan(int train = 40, int val = 10, int test = 20) {
  DatasetPlan p;
  p.graph_class = GraphClass::Grids;
  p.train = train, p.val = val, p.test = test;
  p.rows = {3, 5}, p.cols = {3, 5};
  p.k = 10;
  return p;
}

/// A fully determined recipe for one graph of a dataset.
struct GraphJob {
  std::string split;  // "train", "val" or "test"
  std::size_t index = 0;  // global index across splits
  std::uint64_t seed = 0;
  std::string bucket = "all";
  InstanceBucket size{};  // fixed size, or all-zero for a random size
};

inline std::uint64_t graph_seed(std::uint64_t dataset_seed, std::size_t index) {
  return dataset_seed ^ static_cast<std::uint64_t>(index);
}

inline std::vector<GraphJob> plan_jobs(const DatasetPlan& plan, std::uint64_t seed) {
  std::vector<GraphJob> jobs;
  std::size_t index = 0;
  auto add = [&](const std::string& split, int count, std::string bucket, InstanceBucket size) {
    for (int i = 0; i < count; ++i, ++index) jobs.push_back({split, index, graph_seed(seed, index), bucket, size});
  };
  add("train", plan.train, "all", {});
  add("val", plan.val, "all", {});
  if (plan.instances.empty()) {
    add("test", plan.test, "all", {});
  } else {
    for (const auto& b : plan.instances) add("test", b.count, std::to_string(b.nodes), b);
  }
  return jobs;
}

/// Generates one graph of the plan. Fixed-size jobs use the bucket's size;
/// others draw their size from the plan's ranges using the job's own RNG.
inline LabeledGraph generate_job(const DatasetPlan& plan, const GraphJob& job) {
  Rng rng(job.seed);
  auto draw = [&rng](SizeRange r) { return std::uniform_int_distribution<int>(r.min, r.max)(rng); };
  const bool fixed = job.size.count > 0;
  LabeledGraph lg;
  switch (plan.graph_class) {
    case GraphClass::Grids:
    case GraphClass::GridsD:
    case GraphClass::GridsRD: {
      const int rows = fixed ? job.size.rows : draw(plan.rows);
      const int cols = fixed ? job.size.cols : draw(plan.cols);
      if (plan.graph_class == GraphClass::Grids) lg = gen_grid(rows, cols);
      else if (plan.graph_class == GraphClass::GridsD) lg = gen_grid_full_diagonals(rows, cols);
      else lg = gen_grid_random_diagonals(rows, cols, plan.p_diag, rng);
      break;
    }
    case GraphClass::Delaunay:
      lg = gen_delaunay(fixed ? job.size.nodes : draw(plan.points), rng);
      break;
    case GraphClass::Caterp2:
    case GraphClass::Caterp3: {
      CaterpillarConfig cfg = plan.caterpillar;
      cfg.stars = plan.graph_class == GraphClass::Caterp3 ? 3 : 2;
      if (fixed) cfg.total_nodes = job.size.nodes;
      lg = gen_caterpillar(cfg, rng);
      break;
    }
    case GraphClass::RRTrees:
    case GraphClass::RSMTrees: {
      TreeConfig cfg = plan.tree;
      if (fixed) {
        cfg.target_nodes = job.size.nodes;
      } else {
        cfg.levels = draw(plan.levels);
      }
      Graph t = gen_random_tree(cfg, rng);
      // random-size trees are clamped into the plan's node range
      if (!fixed && (static_cast<int>(t.size()) < plan.tree_nodes.min ||
                     static_cast<int>(t.size()) > plan.tree_nodes.max)) {
        cfg.target_nodes = std::clamp(static_cast<int>(t.size()), plan.tree_nodes.min, plan.tree_nodes.max);
        t = gen_random_tree(cfg, rng);
      }
      lg = plan.graph_class == GraphClass::RRTrees ? label_tree_radial(t) : label_tree_sm(t, rng);
      break;
    }
  }
  lg.graph_class = plan.graph_class;
  lg.seed = job.seed;
  return lg;
}

inline void validate(const DatasetPlan& p) {
  if (p.train < 0 || p.val < 0 || p.test < 0) throw std::invalid_argument("dataset counts must be non-negative");
  if (p.train + p.val + p.test + static_cast<int>(p.instances.size()) < 1) {
    throw std::invalid_argument("dataset plan generates no graphs");
  }
  if (p.k < 1) throw std::invalid_argument("feature width k must be >= 1");
  if (!(p.p_diag >= 0.0 && p.p_diag <= 1.0)) throw std::invalid_argument("p_diag must be in [0, 1]");
  if (!(p.tree.p_extra >= 0.0 && p.tree.p_extra <= 1.0)) throw std::invalid_argument("tree p must be in [0, 1]");
  if (!(p.caterpillar.lb < p.caterpillar.ub)) throw std::invalid_argument("caterpillar needs lb < ub");
  if (p.rows.min < 2 || p.cols.min < 2) throw std::invalid_argument("grid rows, cols must be >= 2");
  if (p.tree.children < 2) throw std::invalid_argument("tree c must be >= 2");
}

// ------------------------------------------------------------ serialization

inline nlohmann::json to_json(const DatasetPlan& p) {
  nlohmann::json inst = nlohmann::json::array();
  for (const auto& b : p.instances) inst.push_back({{"count", b.count}, {"nodes", b.nodes}, {"rows", b.rows}, {"cols", b.cols}});
  return {{"class", std::string(class_name(p.graph_class))},
          {"train", p.train},
          {"val", p.val},
          {"test", p.test},
          {"k", p.k},
          {"rows", {p.rows.min, p.rows.max}},
          {"cols", {p.cols.min, p.cols.max}},
          {"points", {p.points.min, p.points.max}},
          {"levels", {p.levels.min, p.levels.max}},
          {"tree_nodes", {p.tree_nodes.min, p.tree_nodes.max}},
          {"instances", inst},
          {"p_diag", p.p_diag},
          {"caterpillar",
           {{"lb", p.caterpillar.lb},
            {"ub", p.caterpillar.ub},
            {"spacing", p.caterpillar.spacing},
            {"tip_min", p.caterpillar.tip_min},
            {"tip_max", p.caterpillar.tip_max}}},
          {"tree",
           {{"c", p.tree.children}, {"p", p.tree.p_extra}, {"ub_children", p.tree.ub_children}}}};
}

/// Reads a plan; missing keys fall back to the class's standard plan.
inline DatasetPlan plan_from_json(const nlohmann::json& j) {
  DatasetPlan p = standard_plan(parse_class(j.at("class").get<std::string>()));
  auto range = [&](const char* key, SizeRange& r) {
    if (j.contains(key)) r = {j.at(key).at(0).get<int>(), j.at(key).at(1).get<int>()};
  };
  if (j.contains("train")) p.train = j.at("train").get<int>();
  if (j.contains("val")) p.val = j.at("val").get<int>();
  if (j.contains("test")) p.test = j.at("test").get<int>();
  if (j.contains("k")) p.k = j.at("k").get<int>();
  range("rows", p.rows);
  range("cols", p.cols);
  range("points", p.points);
  range("levels", p.levels);
  range("tree_nodes", p.tree_nodes);
  if (j.contains("instances")) {
    p.instances.clear();
    for (const auto& b : j.at("instances")) {
      p.instances.push_back({b.at("count").get<int>(), b.value("nodes", 0), b.value("rows", 0), b.value("cols", 0)});
    }
  }
  if (j.contains("p_diag")) p.p_diag = j.at("p_diag").get<double>();
  if (j.contains("caterpillar")) {
    const auto& c = j.at("caterpillar");
    p.caterpillar.lb = c.value("lb", p.caterpillar.lb);
    p.caterpillar.ub = c.value("ub", p.caterpillar.ub);
    p.caterpillar.spacing = c.value("spacing", p.caterpillar.spacing);
    p.caterpillar.tip_min = c.value("tip_min", p.caterpillar.tip_min);
    p.caterpillar.tip_max = c.value("tip_max", p.caterpillar.tip_max);
  }
  if (j.contains("tree")) {
    const auto& t = j.at("tree");
    p.tree.children = t.value("c", p.tree.children);
    p.tree.p_extra = t.value("p", p.tree.p_extra);
    p.tree.ub_children = t.value("ub_children", p.tree.ub_children);
  }
  validate(p);
  return p;
}

/// Dataset directory layout:
///   <dir>/dataset.json           plan, seed, k
///   <dir>/manifest.csv           id,class,n,m,seed
///   <dir>/{train,val,test}/gNNNNN.json
/// Returns the jobs that were written.
inline std::vector<GraphJob> build_dataset(const DatasetPlan& plan, std::uint64_t seed,
                                           const std::filesystem::path& dir) {
  validate(plan);
  const auto jobs = plan_jobs(plan, seed);
  std::ostringstream manifest;
  manifest << "id,class,n,m,seed\n";
  for (const auto& job : jobs) {
    const LabeledGraph lg = generate_job(plan, job);
    char name[32];
    std::snprintf(name, sizeof name, "g%05zu", job.index);
    const std::string id = job.split + "/" + name;
    GraphRecord rec{lg.graph, lg.truth, std::string(class_name(plan.graph_class)), job.seed,
                    {{"bucket", job.bucket}, {"split", job.split}, {"id", id}}};
    write_graph(dir / (id + ".json"), rec);
    manifest << id << ',' << class_name(plan.graph_class) << ',' << lg.graph.size() << ','
             << lg.graph.edge_count() << ',' << job.seed << '\n';
  }
  write_text(dir / "manifest.csv", manifest.str());
  write_json(dir / "dataset.json", {{"plan", to_json(plan)}, {"seed", seed}, {"k", plan.k}});
  return jobs;
}

}  // namespace gdlab
