#include <gtest/gtest.h>

#include <cstdlib>
#include <regex>
#include <sstream>

#include "gdlab/generators/generators.hpp"
#include "gdlab/harness/compare.hpp"
#include "gdlab/harness/run.hpp"
#include "gdlab/harness/spec.hpp"
#include "gdlab/harness/svg.hpp"
#include "gdlab/metrics/crossings.hpp"
#include "test_support.hpp"

namespace gdlab::harness {
namespace {

namespace fs = std::filesystem;

json tiny_spec(const fs::path& out) {
  json j = json::parse(R"({
    "schema_version": 1,
    "name": "tiny",
    "seed": 3,
    "generator": {"class": "Grids", "train": 6, "val": 2, "test": 3, "rows": [3, 4], "cols": [3, 4], "k": 6},
    "train": {"loss": "sus", "epochs": 3, "hidden": 6, "batch": 4},
    "baselines": {"fd": {"iterations": 100}, "sm": {"max_iters": 50}},
    "render": {"count": 1}
  })");
  j["output_dir"] = out.generic_string();
  return j;
}

// ---------------------------------------------------------------------- spec

TEST(Spec, RoundTripsWithMaterializedDefaults) {
  const auto s = spec_from_json(tiny_spec("x"));
  const json j = to_json(s);
  EXPECT_EQ(to_json(spec_from_json(j)), j);
  EXPECT_EQ(j.at("train").at("lr"), 0.0015);
  EXPECT_EQ(j.at("baselines").at("fd").at("scaling_ratio"), 2.0);
  EXPECT_EQ(j.at("baselines").at("sm").at("tolerance"), 1e-7);
  EXPECT_TRUE(j.at("test").is_null());
}

TEST(Spec, HashDependsOnContentNotOutputDir) {
  auto a = spec_from_json(tiny_spec("x"));
  auto b = spec_from_json(tiny_spec("y"));
  EXPECT_EQ(spec_hash(a), spec_hash(b));
  EXPECT_EQ(spec_hash(a).size(), 16u);
  b.seed = 4;
  EXPECT_NE(spec_hash(a), spec_hash(b));
}

TEST(Spec, MalformedSpecsFailInParseStage) {
  const fs::path dir = fs::temp_directory_path() / "gdlab_test_spec";
  fs::create_directories(dir);
  write_text(dir / "bad.json", "{ not json");
  write_json(dir / "noversion.json", {{"generator", {{"class", "Grids"}}}});
  write_json(dir / "badclass.json", {{"schema_version", 1}, {"generator", {{"class", "hexagons"}}}});
  for (const char* f : {"bad.json", "noversion.json", "badclass.json", "missing.json"}) {
    try {
      load_spec(dir / f);
      ADD_FAILURE() << f;
    } catch (const StageError& e) {
      EXPECT_EQ(e.stage(), "parse") << f;
    }
  }
  fs::remove_all(dir);
}

TEST(Spec, SeedOverrideFromEnvironment) {
  auto s = spec_from_json(tiny_spec("x"));
  ::setenv("LAB_SEED", "77", 1);
  EXPECT_EQ(apply_seed_override(s), std::optional<std::uint64_t>(77));
  EXPECT_EQ(s.seed, 77u);
  ::setenv("LAB_SEED", "abc", 1);
  EXPECT_THROW(apply_seed_override(s), StageError);
  ::unsetenv("LAB_SEED");
  EXPECT_EQ(apply_seed_override(s), std::nullopt);
}

// ----------------------------------------------------------------------- svg

struct ParsedSvg {
  std::vector<Point> circles;
  std::vector<std::pair<Point, Point>> lines;
};

ParsedSvg parse_svg(const std::string& svg) {
  ParsedSvg p;
  const std::regex circle(R"re(<circle cx="([-0-9.]+)" cy="([-0-9.]+)")re");
  const std::regex line(R"re(<line x1="([-0-9.]+)" y1="([-0-9.]+)" x2="([-0-9.]+)" y2="([-0-9.]+)")re");
  for (std::sregex_iterator it(svg.begin(), svg.end(), circle), end; it != end; ++it) {
    p.circles.push_back({std::stod((*it)[1]), std::stod((*it)[2])});
  }
  for (std::sregex_iterator it(svg.begin(), svg.end(), line), end; it != end; ++it) {
    p.lines.push_back({{std::stod((*it)[1]), std::stod((*it)[2])}, {std::stod((*it)[3]), std::stod((*it)[4])}});
  }
  return p;
}

TEST(Svg, CountsAndDeterminism) {
  const Graph edge(2, {{0, 1}});
  const Layout l({{0, 0}, {3, 1}});
  const std::string a = render_svg(edge, l);
  EXPECT_EQ(a, render_svg(edge, l));
  auto p = parse_svg(a);
  EXPECT_EQ(p.circles.size(), 2u);
  EXPECT_EQ(p.lines.size(), 1u);
  // wider axis spans the viewbox minus 5% margins
  EXPECT_DOUBLE_EQ(p.circles[0].x, 40.0);
  EXPECT_DOUBLE_EQ(p.circles[1].x, 760.0);

  p = parse_svg(render_svg(Graph(1, {}), Layout({{5, 5}})));
  EXPECT_EQ(p.circles.size(), 1u);
  EXPECT_EQ(p.lines.size(), 0u);
  EXPECT_DOUBLE_EQ(p.circles[0].x, 400.0);
}

TEST(Svg, GridTruthDrawsPlanar) {
  const auto grid = gen_grid(3, 3);
  const auto p = parse_svg(render_svg(grid.graph, grid.truth));
  ASSERT_EQ(p.circles.size(), 9u);
  ASSERT_EQ(p.lines.size(), 12u);
  EXPECT_EQ(count_crossings(grid.graph, Layout(p.circles)), 0u);
  std::uint64_t proper = 0;
  for (std::size_t i = 0; i < p.lines.size(); ++i) {
    for (std::size_t j = i + 1; j < p.lines.size(); ++j) {
      proper += testing_support::naive_segments_cross(p.lines[i].first, p.lines[i].second, p.lines[j].first,
                                                      p.lines[j].second);
    }
  }
  EXPECT_EQ(proper, 0u);
}

// ------------------------------------------------------------------- compare

std::string results_text(const std::string& loss, const std::vector<std::array<double, 3>>& model_by_bucket,
                         const std::vector<std::string>& buckets) {
  csv::Table t;
  t.header = training::results_header();
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    const auto& m = model_by_bucket[i];
    t.rows.push_back({"grids", "grids", buckets[i], "10", loss, "1", csv::num(m[0]), csv::num(m[1]), csv::num(m[2]),
                      "5", "50", "0.5", "", "", "", "h"});
  }
  return t.str();
}

TEST(Compare, TallyOnSyntheticTables) {
  const std::vector<std::string> buckets = {"25", "50", "75", "all"};
  // sus better stress in buckets 25 and 75, tied nc in 50, worse ar everywhere
  const auto ps = csv::parse(results_text("ps", {{{4, 100, 0.6}}, {{6, 200, 0.6}}, {{8, 300, 0.6}}, {{6, 200, 0.6}}}, buckets));
  const auto sus = csv::parse(results_text("sus", {{{3, 90, 0.5}}, {{6, 250, 0.5}}, {{9, 10, 0.5}}, {{6, 116, 0.5}}}, buckets));
  const auto r = compare_tables({{"ps_run", ps}, {"sus_run", sus}});
  ASSERT_EQ(r.tallies.size(), 3u);
  const auto& nc = r.tallies[0];
  const auto& s = r.tallies[1];
  const auto& ar = r.tallies[2];
  EXPECT_EQ(nc.metric, "nc");
  EXPECT_EQ(nc.a_wins, 1);  // bucket 75
  EXPECT_EQ(nc.b_wins, 1);  // bucket 25
  EXPECT_EQ(nc.ties, 1);    // bucket 50
  EXPECT_EQ(s.a_wins, 1);
  EXPECT_EQ(s.b_wins, 2);
  EXPECT_EQ(ar.a_wins, 3);
  EXPECT_EQ(ar.b_wins, 0);
  EXPECT_EQ(s.loss_b, "sus");

  // deltas are b - a for each shared cell; baselines included
  const auto d = csv::parse(r.deltas_csv);
  EXPECT_EQ(d.rows.size(), 8u);  // 4 buckets x {model, fd}
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    if (d.at(i, "technique") == "model" && d.at(i, "bucket") == "75") {
      EXPECT_EQ(d.at(i, "d_s"), csv::num(-290));
    }
    if (d.at(i, "technique") == "fd") {
      EXPECT_EQ(d.at(i, "d_s"), "0");
    }
  }
}

TEST(Compare, IdenticalInputsGiveZeroDeltasAndPairsPerRun) {
  const auto t = csv::parse(results_text("sus", {{{1, 2, 0.3}}}, {"all"}));
  const auto r = compare_tables({{"a", t}, {"b", t}, {"c", t}});
  const auto d = csv::parse(r.deltas_csv);
  EXPECT_EQ(d.rows.size(), 6u);  // 3 pairs x {model, fd}
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    for (const char* c : {"d_nc", "d_s", "d_ar"}) EXPECT_EQ(d.at(i, c), "0");
  }
  EXPECT_EQ(r.tallies.size(), 9u);
  for (const auto& x : r.tallies) EXPECT_EQ(x.ties, 1);
}

TEST(Compare, SchemaMismatchIsRejected) {
  auto t = csv::parse(results_text("sus", {{{1, 2, 0.3}}}, {"all"}));
  auto bad = t;
  bad.header[3] = "count";
  EXPECT_THROW(compare_tables({{"a", t}, {"b", bad}}), Error);
  EXPECT_THROW(compare_tables({{"a", t}}), Error);
}

// ---------------------------------------------------------------------- runs

class RunTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / "gdlab_test_run";
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  fs::path root_;
};

TEST_F(RunTest, ReproducibleAndRecomputable) {
  std::ostringstream log;
  const auto a = run_experiment(spec_from_json(tiny_spec(root_ / "a")), log);
  const auto b = run_experiment(spec_from_json(tiny_spec(root_ / "b")), log);
  for (const char* f : {"results.csv", "per_graph.csv", "spec.json"}) {
    if (std::string(f) == "spec.json") continue;  // differs by output_dir
    EXPECT_EQ(read_text(a / f), read_text(b / f)) << f;
  }
  for (const char* f : {"model.json", "train_log.csv", "svg/g00008_truth.svg", "svg/g00008_model.svg"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
  }

  const auto results = csv::parse(read_text(a / "results.csv"));
  ASSERT_EQ(results.rows.size(), 1u);
  EXPECT_EQ(results.at(0, "loss_kind"), "sus");
  EXPECT_EQ(results.at(0, "spec_hash"), read_json(a / "spec.json").at("spec_hash").get<std::string>());

  // every per-graph row is recomputable from the stored layout
  const auto per = csv::parse(read_text(a / "per_graph.csv"));
  ASSERT_EQ(per.rows.size(), 9u);
  for (std::size_t i = 0; i < per.rows.size(); ++i) {
    const auto rec = read_graph(a / "layouts" / per.at(i, "technique") / (per.at(i, "id") + ".json"));
    const auto m = measure(rec.graph, *rec.coords);
    EXPECT_EQ(std::to_string(m.nc), per.at(i, "nc"));
    EXPECT_EQ(csv::num(m.s), per.at(i, "s"));
    EXPECT_EQ(csv::num(m.ar), per.at(i, "ar"));
  }
  EXPECT_NE(log.str().find("render: done"), std::string::npos);
}

TEST_F(RunTest, CrossClassRow) {
  auto j = tiny_spec(root_ / "x");
  j["test"] = {{"class", "GridsRD"}, {"train", 0}, {"val", 0}, {"instances", {{{"count", 2}, {"nodes", 12}, {"rows", 3}, {"cols", 4}}}}, {"k", 6}};
  std::ostringstream log;
  const auto out = run_experiment(spec_from_json(j), log);
  const auto results = csv::parse(read_text(out / "results.csv"));
  ASSERT_EQ(results.rows.size(), 2u);  // size bucket plus "all"
  EXPECT_EQ(results.at(0, "train_class"), "Grids");
  EXPECT_EQ(results.at(0, "test_class"), "GridsRD");
}

TEST_F(RunTest, StageFailuresNameTheStage) {
  auto j = tiny_spec(root_ / "y");
  j["test"] = {{"class", "GridsRD"}, {"train", 0}, {"val", 0}, {"test", 2}, {"rows", {3, 3}}, {"cols", {3, 3}}, {"k", 5}};
  std::ostringstream log;
  try {
    run_experiment(spec_from_json(j), log);
    ADD_FAILURE() << "mixed k accepted";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "eval");
  }
  EXPECT_TRUE(fs::exists(root_ / "y" / "model.json"));  // partial outputs kept
}

}  // namespace
}  // namespace gdlab::harness
