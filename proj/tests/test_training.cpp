#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "gdlab/generators/dataset.hpp"
#include "gdlab/training/evaluate.hpp"
#include "gdlab/training/trainer.hpp"

namespace gdlab::training {
namespace {

namespace fs = std::filesystem;

class TrainingTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "gdlab_test_training";
    fs::remove_all(root_);
    build_dataset(desk_grid_plan(10, 4, 3), 21, root_ / "grids");
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static TrainConfig small_config() {
    TrainConfig c;
    c.hidden = 6;
    c.epochs = 3;
    c.batch = 4;
    c.seed = 5;
    return c;
  }

  static std::vector<double> flat(const ModelParams& p) {
    std::vector<double> v;
    p.for_each_tensor([&](std::string_view, const Eigen::Ref<nn::Matrix>& t) {
      for (Eigen::Index i = 0; i < t.size(); ++i) v.push_back(t.data()[i]);
    });
    return v;
  }

  static inline fs::path root_;
};

TEST_F(TrainingTest, ConfigValidation) {
  TrainConfig c;
  c.epochs = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = TrainConfig{};
  c.batch = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = TrainConfig{};
  c.lr = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  const auto j = to_json(small_config());
  EXPECT_EQ(to_json(train_config_from_json(j)), j);
}

TEST_F(TrainingTest, PaddedBatchLossIsMeanOfSingles) {
  Split s = load_split(root_ / "grids", "train");
  prepare_targets(s);
  std::mt19937_64 rng(1);
  const auto params = nn::init_params(s.k, 8, rng);
  std::vector<const Example*> batch;
  std::vector<NodeId> starts;
  for (const auto& e : s.examples) {
    batch.push_back(&e);
    starts.push_back(std::uniform_int_distribution<NodeId>(0, e.graph.size() - 1)(rng));
  }
  for (LossKind kind : {LossKind::PS, LossKind::SuS}) {
    const auto packed = batch_loss(params, batch, starts, kind, true);
    double mean = 0.0;
    ModelParams grad = params.zeros_like();
    for (std::size_t b = 0; b < batch.size(); ++b) {
      auto single = batch_loss(params, {batch[b]}, {starts[b]}, kind, true);
      mean += single.loss / double(batch.size());
      *single.grad *= 1.0 / double(batch.size());
      grad += *single.grad;
    }
    EXPECT_NEAR(packed.loss, mean, 1e-10);
    const auto a = flat(*packed.grad), b = flat(grad);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-10);
  }
}

TEST_F(TrainingTest, ZeroLearningRateLeavesParametersUnchanged) {
  auto cfg = small_config();
  cfg.lr = 0.0;
  cfg.patience = 100;
  const auto r = train(root_ / "grids", cfg);
  std::mt19937_64 rng(cfg.seed);
  EXPECT_EQ(flat(r.params), flat(nn::init_params(10, cfg.hidden, rng)));
  EXPECT_EQ(r.log.epochs.size(), 3u);
  for (const auto& e : r.log.epochs) EXPECT_EQ(e.val_loss, r.log.initial_val_loss);
}

TEST_F(TrainingTest, EarlyStoppingAfterPatience) {
  auto cfg = small_config();
  cfg.lr = 0.0;
  cfg.epochs = 50;
  cfg.patience = 2;
  const auto r = train(root_ / "grids", cfg);
  EXPECT_EQ(r.log.epochs.size(), 2u);
  EXPECT_EQ(r.log.best_epoch, 0);
}

TEST_F(TrainingTest, DeterministicAndLearns) {
  auto cfg = small_config();
  cfg.epochs = 15;
  cfg.lr = 0.01;
  const auto a = train(root_ / "grids", cfg);
  const auto b = train(root_ / "grids", cfg);
  ASSERT_EQ(a.log.epochs.size(), b.log.epochs.size());
  for (std::size_t i = 0; i < a.log.epochs.size(); ++i) {
    EXPECT_EQ(a.log.epochs[i].train_loss, b.log.epochs[i].train_loss);
    EXPECT_EQ(a.log.epochs[i].val_loss, b.log.epochs[i].val_loss);
  }
  EXPECT_EQ(flat(a.params), flat(b.params));
  EXPECT_LT(a.log.best_val_loss(), a.log.initial_val_loss);
  const std::string csv = a.log.csv();
  EXPECT_EQ(csv.rfind("epoch,train_loss,val_loss,seconds\n0,", 0), 0u);
}

TEST_F(TrainingTest, CheckpointRoundTrip) {
  auto cfg = small_config();
  cfg.checkpoint = root_ / "ckpt" / "model.json";
  const auto r = train(root_ / "grids", cfg);
  const auto loaded = nn::load_checkpoint(*cfg.checkpoint);
  EXPECT_EQ(flat(loaded), flat(r.params));
  const Split test = load_split(root_ / "grids", "test");
  const auto& e = test.examples.front();
  const auto seq = encode_features(e.graph, bfs_order(e.graph, NodeId{0}), 10);
  EXPECT_EQ(nn::forward(loaded, seq), nn::forward(r.params, seq));
}

TEST_F(TrainingTest, RejectsBadData) {
  EXPECT_THROW(load_split(root_ / "nowhere", "train"), IoError);
  const fs::path bad = root_ / "notruth";
  fs::create_directories(bad / "train");
  write_json(bad / "dataset.json", {{"k", 10}});
  write_graph(bad / "train" / "g00000.json", GraphRecord{Graph(2, {{0, 1}}), std::nullopt, "x", 0, json::object()});
  EXPECT_THROW(load_split(bad, "train"), IoError);

  Split tr = load_split(root_ / "grids", "train"), va = load_split(root_ / "grids", "val");
  va.k = 7;
  EXPECT_THROW(train(tr, va, small_config()), TrainingError);
}

TEST_F(TrainingTest, SingleGraphEvaluationAveragesEqualTheGraph) {
  std::mt19937_64 rng(2);
  Split test = load_split(root_ / "grids", "test");
  test.examples.resize(1);
  const auto params = nn::init_params(test.k, 6, rng);
  EvalConfig ec;
  ec.layout_dir = root_ / "layouts";
  const auto r = evaluate(params, test, ec);
  ASSERT_EQ(r.buckets.size(), 1u);
  const auto& b = r.buckets.front();
  const auto& g = r.graphs.front();
  EXPECT_EQ(b.bucket, "all");
  EXPECT_EQ(b.graphs, 1u);
  EXPECT_EQ(b.model.nc, double(g.model.nc));
  EXPECT_EQ(b.model.s, g.model.s);
  EXPECT_EQ(b.sm->ar, g.sm->ar);
  EXPECT_EQ(b.loss, g.loss);

  // stored layouts reproduce the reported metrics
  for (const char* technique : kTechniques) {
    const auto rec = read_graph(root_ / "layouts" / technique / (g.id + ".json"));
    const auto m = measure(rec.graph, *rec.coords);
    const MetricReport& expected = std::string(technique) == "model" ? g.model : std::string(technique) == "fd" ? *g.fd : *g.sm;
    EXPECT_EQ(m.nc, expected.nc);
    EXPECT_NEAR(m.s, expected.s, 1e-9 * expected.s);
    EXPECT_NEAR(m.ar, expected.ar, 1e-12);
  }

  const auto table = csv::parse(results_csv(r, "grids", "grids", LossKind::SuS, "abc"));
  EXPECT_EQ(table.header, results_header());
  EXPECT_EQ(table.rows.size(), 1u);
  EXPECT_EQ(table.at(0, "spec_hash"), "abc");
  EXPECT_EQ(table.at(0, "model_nc"), csv::num(double(g.model.nc)));
}

TEST_F(TrainingTest, EvaluationRejectsWidthMismatch) {
  std::mt19937_64 rng(3);
  const Split test = load_split(root_ / "grids", "test");
  EXPECT_THROW(evaluate(nn::init_params(7, 4, rng), test, EvalConfig{}), Error);
}

}  // namespace
}  // namespace gdlab::training
