#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "gdlab/generators/dataset.hpp"
#include "gdlab/generators/generators.hpp"
#include "gdlab/metrics/procrustes.hpp"
#include "gdlab/nn/losses.hpp"
#include "gdlab/nn/lstm.hpp"
#include "gdlab/nn/params.hpp"
#include "test_support.hpp"

namespace gdlab::nn {
namespace {

using testing_support::flatten;
using testing_support::gradient_error;
using testing_support::numeric_gradient;
using testing_support::random_connected_graph;
using testing_support::unflatten;

std::vector<double> flatten_params(const ModelParams& p) {
  std::vector<double> v;
  p.for_each_tensor([&](std::string_view, const Eigen::Ref<Matrix>& t) {
    for (Eigen::Index j = 0; j < t.cols(); ++j)
      for (Eigen::Index i = 0; i < t.rows(); ++i) v.push_back(t(i, j));
  });
  return v;
}

ModelParams unflatten_params(ModelParams p, const std::vector<double>& v) {
  std::size_t at = 0;
  p.for_each_tensor([&](std::string_view, Eigen::Ref<Matrix> t) {
    for (Eigen::Index j = 0; j < t.cols(); ++j)
      for (Eigen::Index i = 0; i < t.rows(); ++i) t(i, j) = v[at++];
  });
  return p;
}

double max_abs(const ModelParams& p) {
  double m = 0.0;
  for (double x : flatten_params(p)) m = std::max(m, std::abs(x));
  return m;
}

Layout random_points(std::mt19937_64& rng, std::size_t n) { return random_layout(n, rng, 4.0); }

EncodedSequence random_sequence(std::mt19937_64& rng, const Graph& g, std::size_t k) {
  return encode_features(g, bfs_order(g, rng), k);
}

// ------------------------------------------------------------------ params

TEST(Params, InitIsDeterministicAndShaped) {
  std::mt19937_64 a(1), b(1), c(2);
  const auto p = init_params(49, 64, a);
  EXPECT_NO_THROW(check_shapes(p));
  EXPECT_EQ(flatten_params(p), flatten_params(init_params(49, 64, b)));
  EXPECT_NE(flatten_params(p), flatten_params(init_params(49, 64, c)));
  const double bound = 1.0 / 8.0;
  EXPECT_LE(p.fwd.w_input.cwiseAbs().maxCoeff(), bound);
  EXPECT_LE(p.out_weight.cwiseAbs().maxCoeff(), bound);
  EXPECT_EQ(p.fwd.bias.segment(64, 64), Vector::Ones(64));
  EXPECT_EQ(p.bwd.bias.head(64), Vector::Zero(64));
  EXPECT_EQ(p.bwd.bias.tail(128), Vector::Zero(128));
  EXPECT_EQ(p.out_bias, Vector::Zero(2));
  EXPECT_EQ(p.parameter_count(), 2 * (256 * 49 + 256 * 64 + 256) + 2 * 128 + 2);
  EXPECT_THROW(init_params(0, 4, a), std::invalid_argument);
}

TEST(Params, ShapeAuditRejectsMismatch) {
  std::mt19937_64 rng(3);
  auto p = init_params(5, 4, rng);
  p.bwd.w_hidden = Matrix::Zero(16, 5);
  EXPECT_THROW(check_shapes(p), std::logic_error);
}

TEST(Params, CheckpointRoundTripIsBitwise) {
  std::mt19937_64 rng(4);
  const auto p = init_params(7, 6, rng);
  const auto dir = std::filesystem::temp_directory_path() / "gdlab_test_nn";
  const auto path = dir / "ckpt.json";
  save_checkpoint(path, p, {{"note", "unit"}});
  const auto q = load_checkpoint(path);
  EXPECT_EQ(q.k, 7u);
  EXPECT_EQ(q.hidden, 6u);
  EXPECT_EQ(flatten_params(p), flatten_params(q));
  const Graph g = random_connected_graph(rng, 6, 0.3);
  const auto seq = random_sequence(rng, g, 7);
  EXPECT_EQ(forward(p, seq), forward(q, seq));

  auto j = checkpoint_json(p);
  j["version"] = 99;
  EXPECT_THROW(params_from_checkpoint(j), Error);
  EXPECT_THROW(load_checkpoint(dir / "missing.json"), IoError);
  std::filesystem::remove_all(dir);
}

// ----------------------------------------------------------------- forward

TEST(Forward, ZeroWeightsGiveBiasEverywhere) {
  std::mt19937_64 rng(5);
  auto p = init_params(3, 4, rng).zeros_like();
  p.out_bias << 0.25, -1.5;
  const Graph g = random_connected_graph(rng, 6, 0.2);
  for (const Point& q : forward(p, random_sequence(rng, g, 3))) EXPECT_EQ(q, (Point{0.25, -1.5}));
}

TEST(Forward, DependsOnlyOnTheSequence) {
  std::mt19937_64 rng(6);
  const auto p = init_params(4, 5, rng);
  const Graph g = random_connected_graph(rng, 7, 0.3);
  std::vector<NodeId> perm(g.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> e;
  for (const Edge& x : g.edges()) e.emplace_back(perm[x.u], perm[x.v]);
  const Graph h(g.size(), e);
  const auto order = bfs_order(g, NodeId{2});
  std::vector<NodeId> order_h;
  for (NodeId v : order) order_h.push_back(perm[v]);
  const Layout a = forward(p, encode_features(g, order, 4));
  const Layout b = forward(p, encode_features(h, order_h, 4));
  for (std::size_t t = 0; t < order.size(); ++t) EXPECT_EQ(a[order[t]], b[order_h[t]]);
}

TEST(Forward, SmokeAndPurity) {
  std::mt19937_64 rng(7);
  const auto p = init_params(3, 8, rng);
  const Graph g = random_connected_graph(rng, 5, 0.3);
  const auto seq = random_sequence(rng, g, 3);
  const Layout l = forward(p, seq);
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l, forward(p, seq));
  EXPECT_THROW(forward(p, encode_features(g, bfs_order(g, NodeId{0}), 4)), std::invalid_argument);
}

// ------------------------------------------------------------------ losses

TEST(PsLoss, ZeroAtSimilarCopies) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Layout target = random_points(rng, 3 + trial);
    const double angle = std::uniform_real_distribution<double>(-3, 3)(rng);
    const double scale = std::uniform_real_distribution<double>(0.1, 10)(rng);
    std::vector<Point> moved;
    for (const Point& q : target) {
      moved.push_back(Point{std::cos(angle) * q.x - std::sin(angle) * q.y, std::sin(angle) * q.x + std::cos(angle) * q.y} *
                          scale +
                      Point{3, -7});
    }
    const auto r = ps_loss(target, Layout(moved));
    EXPECT_LE(r.value, 1e-9);
    double gn = 0.0;
    for (const Point& g : r.grad) gn += dot(g, g);
    EXPECT_LE(std::sqrt(gn), 1e-6);
  }
}

TEST(PsLoss, MatchesProcrustesAndIsInvariant) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Layout target = random_points(rng, 6), pred = random_points(rng, 6);
    const double v = ps_loss(target, pred).value;
    EXPECT_NEAR(v, procrustes_align(target, pred).statistic, 1e-12);
    std::vector<Point> moved;
    for (const Point& q : pred) moved.push_back(q * 3.5 + Point{-2, 9});
    EXPECT_NEAR(ps_loss(target, Layout(moved)).value, v, 1e-10);
  }
}

TEST(PsLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const Layout target = random_points(rng, 6), pred = random_points(rng, 6);
    const auto analytic = flatten(Layout(ps_loss(target, pred).grad));
    const auto numeric = numeric_gradient([&](const auto& x) { return ps_loss(target, unflatten(x)).value; }, flatten(pred));
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      EXPECT_LE(gradient_error(analytic[i], numeric[i]), 1e-4) << trial << ":" << i;
    }
  }
}

TEST(PsLoss, DegenerateInputsThrow) {
  const Layout same({{1, 1}, {1, 1}, {1, 1}});
  const Layout ok({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_THROW(ps_loss(same, ok), DegenerateInputError);
  EXPECT_THROW(ps_loss(ok, same), DegenerateInputError);
}

TEST(SusLoss, HandEvaluatedSingleEdge) {
  const Graph edge(2, {{0, 1}});
  const auto t = make_stress_targets(edge, Layout({{0, 0}, {1, 0}}));
  EXPECT_EQ(t.s, Matrix::Zero(2, 2));
  const auto r = sus_loss(t, Layout({{0, 0}, {2, 0}}));
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  // dL/dx1 = -(S - W(e-d)^2) * 2 W (e-d) * 2 (both ordered pairs), along +x
  EXPECT_DOUBLE_EQ(r.grad[1].x, 4.0);
  EXPECT_DOUBLE_EQ(r.grad[0].x, -4.0);
}

TEST(SusLoss, ZeroAtTruthForGeneratedGraphs) {
  std::mt19937_64 rng(11);
  std::vector<LabeledGraph> graphs{gen_grid(3, 4), gen_grid_full_diagonals(3, 3), gen_grid_random_diagonals(4, 4, 0.5, rng),
                                   gen_delaunay(20, rng)};
  CaterpillarConfig cat;
  cat.tip_min = 3;
  cat.tip_max = 6;
  graphs.push_back(gen_caterpillar(cat, rng));
  TreeConfig tree;
  tree.levels = 3;
  graphs.push_back(label_tree_radial(gen_random_tree(tree, rng)));
  graphs.push_back(label_tree_sm(gen_random_tree(tree, rng), rng));
  for (const auto& lg : graphs) {
    const auto t = make_stress_targets(lg.graph, lg.truth);
    EXPECT_TRUE(t.w.isApprox(t.w.transpose()));
    EXPECT_GE(t.s.minCoeff(), 0.0);
    const auto r = sus_loss(t, lg.truth);
    EXPECT_EQ(r.value, 0.0);
    for (const Point& g : r.grad) EXPECT_EQ(g, Point{});
  }
}

TEST(SusLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_connected_graph(rng, 6, 0.3);
    const auto t = make_stress_targets(g, random_points(rng, 6));
    const Layout pred = random_points(rng, 6);
    const auto analytic = flatten(Layout(sus_loss(t, pred).grad));
    const auto numeric = numeric_gradient([&](const auto& x) { return sus_loss(t, unflatten(x)).value; }, flatten(pred));
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      EXPECT_LE(gradient_error(analytic[i], numeric[i]), 1e-4) << trial << ":" << i;
    }
  }
}

// ---------------------------------------------------------------- backward

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(13);
  const auto p = init_params(3, 4, rng);
  const Graph g = random_connected_graph(rng, 5, 0.3);
  const auto grad = backward(p, random_sequence(rng, g, 3), std::vector<Point>(5));
  EXPECT_EQ(max_abs(grad), 0.0);
}

TEST(Backward, LinearInUpstream) {
  std::mt19937_64 rng(14);
  const auto p = init_params(3, 4, rng);
  const Graph g = random_connected_graph(rng, 5, 0.3);
  const auto seq = random_sequence(rng, g, 3);
  std::vector<Point> up;
  for (const Point& q : random_points(rng, 5)) up.push_back(q);
  std::vector<Point> twice;
  for (const Point& q : up) twice.push_back(q * 2.0);
  const auto a = flatten_params(backward(p, seq, up));
  const auto b = flatten_params(backward(p, seq, twice));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], 2.0 * a[i], 1e-12 * (1 + std::abs(a[i])));
}

TEST(Backward, TinyModelMatchesFiniteDifferences) {
  std::mt19937_64 rng(15);
  const auto p = init_params(2, 4, rng);
  const Graph g(3, {{0, 1}, {1, 2}});
  const auto seq = random_sequence(rng, g, 2);
  std::vector<Point> up;
  for (const Point& q : random_points(rng, 3)) up.push_back(q);
  // a linear functional of the output has exactly `up` as coordinate gradient
  auto objective = [&](const std::vector<double>& w) {
    const Layout l = forward(unflatten_params(p, w), seq);
    double s = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) s += dot(l[i], up[i]);
    return s;
  };
  const auto analytic = flatten_params(backward(p, seq, up));
  const auto numeric = numeric_gradient(objective, flatten_params(p));
  for (std::size_t i = 0; i < numeric.size(); ++i) EXPECT_LE(gradient_error(analytic[i], numeric[i]), 1e-3) << i;
}

TEST(Backward, EndToEndLossGradients) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + trial % 6, h = 2 + trial % 7, k = 1 + trial % 4;
    const Graph g = random_connected_graph(rng, n, 0.3);
    const auto p = init_params(k, h, rng);
    const auto seq = random_sequence(rng, g, k);
    const Layout truth = random_points(rng, n);
    const auto targets = make_stress_targets(g, truth);
    for (LossKind kind : {LossKind::PS, LossKind::SuS}) {
      auto loss = [&](const Layout& l) { return kind == LossKind::PS ? ps_loss(truth, l) : sus_loss(targets, l); };
      const auto pass = forward_pass(p, seq);
      const auto value = loss(pass.layout);
      const auto analytic = flatten_params(backward(p, pass, value.grad));
      const auto numeric = numeric_gradient(
          [&](const auto& w) { return loss(forward(unflatten_params(p, w), seq)).value; }, flatten_params(p));
      // central differences carry round-off that grows with |loss| / h
      const double noise = 1e-8 * std::max(1.0, value.value);
      for (std::size_t i = 0; i < numeric.size(); ++i) {
        const double tol = 1e-3 * std::max(std::abs(analytic[i]), std::abs(numeric[i])) + noise;
        ASSERT_LE(std::abs(analytic[i] - numeric[i]), tol)
            << "trial " << trial << " loss " << loss_name(kind) << " param " << i << " loss value " << value.value;
      }
    }
  }
}

// ----------------------------------------------------------------- batches

TEST(Batch, PackingShapesAndMask) {
  std::mt19937_64 rng(17);
  const Graph a = random_connected_graph(rng, 3, 0.0), b = random_connected_graph(rng, 5, 0.2);
  const auto sa = random_sequence(rng, a, 2), sb = random_sequence(rng, b, 2);
  const auto packed = batch_pack(std::vector<EncodedSequence>{sa, sb});
  EXPECT_EQ(packed.steps, 5u);
  EXPECT_EQ(packed.mask.col(0).sum(), 3.0);
  EXPECT_EQ(packed.mask.col(1).sum(), 5.0);
  EXPECT_FALSE(packed.valid(3, 0));
  EXPECT_EQ(packed.x[4].col(0), Vector::Zero(2));
  const auto same = batch_pack(std::vector<EncodedSequence>{sb, sb});
  EXPECT_EQ(same.mask, Matrix::Ones(5, 2));
  EXPECT_THROW(batch_pack(std::vector<EncodedSequence>{sa, random_sequence(rng, b, 3)}), std::invalid_argument);
}

TEST(Batch, PaddingIsNeutralForOutputsAndGradients) {
  std::mt19937_64 rng(18);
  const auto p = init_params(3, 5, rng);
  std::vector<EncodedSequence> seqs;
  for (std::size_t n : {4, 9, 6}) seqs.push_back(random_sequence(rng, random_connected_graph(rng, n, 0.3), 3));
  const auto packed = batch_pack(seqs);
  const auto cache = forward_batch(p, packed);
  std::vector<Matrix> dy;
  ModelParams summed = p.zeros_like();
  for (std::size_t b = 0; b < seqs.size(); ++b) {
    const auto single = forward_pass(p, seqs[b]);
    const Layout batched = output_layout(packed, cache, b);
    for (std::size_t i = 0; i < batched.size(); ++i) {
      EXPECT_NEAR(batched[i].x, single.layout[i].x, 1e-12);
      EXPECT_NEAR(batched[i].y, single.layout[i].y, 1e-12);
    }
    std::vector<Point> up;
    for (const Point& q : random_points(rng, seqs[b].length())) up.push_back(q);
    scatter_gradient(packed, b, up, 1.0, dy);
    summed += backward(p, single, up);
  }
  const auto batched = flatten_params(backward_batch(p, packed, cache, dy));
  const auto reference = flatten_params(summed);
  for (std::size_t i = 0; i < batched.size(); ++i) EXPECT_NEAR(batched[i], reference[i], 1e-10);
}

}  // namespace
}  // namespace gdlab::nn
