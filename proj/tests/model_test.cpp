//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>

#include <gtest/gtest.h>

#include "gcnx/checkpoint.h"
#include "gcnx/error.h"
#include "gcnx/model.h"
#include "gcnx/smiles.h"
#include "test_util.h"

namespace gcnx {
namespace {

using testing::central_difference;
using testing::relative_error;

// Random instance kept away from ReLU kinks so central differences are valid.
struct Instance {
  AttributedGraph graph;
  ModelParams params;
};

Instance random_instance(Rng &rng, int d_in, const std::vector<int> &sizes) {
  for (;;) {
    const int n = static_cast<int>(rng.uniform_int(3, 12));
    Instance inst{testing::random_graph(rng, n, d_in, false),
                  testing::random_params(rng, d_in, sizes, 2)};
    if (testing::min_abs_preactivation(forward(inst.graph, inst.params)) > 1e-3) return inst;
  }
}

TEST(Forward, ZeroFeaturesGiveUniformSoftmax) {
  Rng rng(1);
  AttributedGraph g(Matrix::Zero(1, 3), Matrix::Zero(1, 1), {});
  ModelParams p = testing::random_params(rng, 3, {4, 5}, 2);
  ForwardTrace t = forward(g, p);
  for (const Matrix &f : t.activations) EXPECT_EQ(f.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(t.gap.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(t.scores.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(t.probabilities(0), 0.5);
  EXPECT_DOUBLE_EQ(t.probabilities(1), 0.5);
}

TEST(Forward, IdentityMicroModel) {
  Matrix x(1, 3);
  x << 1.5, -2.0, 0.25;
  AttributedGraph g(x, Matrix::Zero(1, 1), {});
  ModelParams p;
  p.layer_weights = {Matrix::Identity(3, 3)};
  p.classifier_weights = Matrix::Ones(3, 2);
  ForwardTrace t = forward(g, p);
  EXPECT_EQ(t.activations[1], x.cwiseMax(0.0));
}

TEST(Forward, SymmetricPairCarriesEqualActivations) {
  Rng rng(2);
  Matrix x(2, 4);
  x.row(0) = testing::random_matrix(rng, 1, 4, -1, 1);
  x.row(1) = x.row(0);
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  AttributedGraph g(x, a, {});
  ForwardTrace t = forward(g, testing::random_params(rng, 4, {6, 6, 6}, 2));
  for (const Matrix &f : t.activations) EXPECT_EQ(f.row(0), f.row(1));
}

TEST(Forward, MatchesStraightLineOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    AttributedGraph g = testing::random_graph(rng, static_cast<int>(rng.uniform_int(1, 9)), 5, false);
    ModelParams p = testing::random_params(rng, 5, {7, 4, 6}, 2);
    ForwardTrace t = forward(g, p);
    std::vector<double> y = testing::oracle_scores(g.adjacency(), g.node_features(), p);
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(t.scores(c), y[c], 1e-12 * (1 + std::abs(y[c])));
  }
}

TEST(Forward, GapConsistency) {
  Rng rng(4);
  AttributedGraph g = testing::random_graph(rng, 7, 5, true);
  ForwardTrace t = forward(g, testing::random_params(rng, 5, {8, 8}, 2));
  Vector e = t.final_features().colwise().sum().transpose() / 7.0;
  EXPECT_EQ(e, t.gap);
}

TEST(Forward, PermutationEquivariance) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 10));
    AttributedGraph g = testing::random_graph(rng, n, 4, false);
    ModelParams p = testing::random_params(rng, 4, {6, 5}, 2);
    std::vector<int> perm = testing::random_permutation(rng, n);
    ForwardTrace t = forward(g, p), tp = forward(g.permuted(perm), p);
    for (int l = 0; l < static_cast<int>(t.activations.size()); ++l)
      for (int i = 0; i < n; ++i)
        EXPECT_LT((tp.activations[l].row(i) - t.activations[l].row(perm[i])).cwiseAbs().maxCoeff(),
                  1e-12);
    EXPECT_LT((tp.scores - t.scores).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((tp.probabilities - t.probabilities).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Forward, RejectsShapeMismatch) {
  Rng rng(6);
  AttributedGraph g = testing::random_graph(rng, 3, 4, true);
  EXPECT_THROW(forward(g, testing::random_params(rng, 5, {3}, 2)), ConfigError);
}

TEST(Backward, ZeroWeightsGiveZeroInputGradient) {
  Rng rng(7);
  AttributedGraph g = testing::random_graph(rng, 5, 4, false);
  ModelParams p = testing::random_params(rng, 4, {3, 3}, 2, 0.0, 0.0);
  ForwardTrace t = forward(g, p);
  EXPECT_EQ(backward(t, g, p, 1).wrt_input().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Backward, SingleNodeLinearRegime) {
  Matrix x(1, 3);
  x << 0.5, 1.0, 2.0;
  AttributedGraph g(x, Matrix::Zero(1, 1), {});
  ModelParams p;
  p.layer_weights = {Matrix(3, 2)};
  p.layer_weights[0] << 1.0, 0.5, 0.2, 1.0, 0.3, 0.1;  // XW > 0
  p.classifier_weights = Matrix(2, 2);
  p.classifier_weights << 0.7, -0.4, -1.2, 0.9;
  ForwardTrace t = forward(g, p);
  for (int c = 0; c < 2; ++c) {
    Matrix expected = (p.layer_weights[0] * p.classifier_weights.col(c)).transpose();
    EXPECT_LT((backward(t, g, p, c).wrt_input() - expected).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Backward, RejectsStaleTrace) {
  Rng rng(8);
  AttributedGraph g = testing::random_graph(rng, 5, 4, false);
  AttributedGraph other = testing::random_graph(rng, 6, 4, false);
  ModelParams p = testing::random_params(rng, 4, {3}, 2);
  EXPECT_THROW(backward(forward(other, p), g, p, 0), ConsistencyError);
}

// Finite-difference oracle over every parameter tensor and the input, for
// both a class score and the weighted loss.
TEST(Backward, FiniteDifferenceOracle) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(rng, 4, {5, 3, 4});
    AttributedGraph &g = inst.graph;
    ModelParams &p = inst.params;
    const int c = trial % 2;
    const double weight = 0.5 + trial * 0.03;
    ForwardTrace t = forward(g, p);
    Gradients gs = backward(t, g, p, c);
    Gradients gl = backward_loss(t, g, p, c, weight);

    auto score = [&] { return forward(g, p).scores(c); };
    auto loss = [&] { return cross_entropy(forward(g, p), c, weight); };
    for (int l = 0; l < p.n_layers(); ++l) {
      EXPECT_LT(relative_error(gs.layer_weights[l], central_difference(p.layer_weights[l], score)), 1e-5);
      EXPECT_LT(relative_error(gl.layer_weights[l], central_difference(p.layer_weights[l], loss)), 1e-5);
    }
    EXPECT_LT(relative_error(gs.classifier_weights, central_difference(p.classifier_weights, score)), 1e-5);
    EXPECT_LT(relative_error(gl.classifier_weights, central_difference(p.classifier_weights, loss)), 1e-5);

    Matrix x = g.node_features();
    auto score_x = [&] { return forward(g.with_features(x), p).scores(c); };
    auto loss_x = [&] { return cross_entropy(forward(g.with_features(x), p), c, weight); };
    EXPECT_LT(relative_error(gs.wrt_input(), central_difference(x, score_x)), 1e-5);
    EXPECT_LT(relative_error(gl.wrt_input(), central_difference(x, loss_x)), 1e-5);
  }
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Rng rng(10);
  ModelParams p = testing::random_params(rng, 4, {3, 2}, 2);
  ModelParams before = p;
  Gradients zero;
  for (const Matrix &w : p.layer_weights) zero.layer_weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  zero.classifier_weights = Matrix::Zero(p.classifier_weights.rows(), p.classifier_weights.cols());
  Adam adam(p, TrainConfig{});
  for (int i = 0; i < 5; ++i) adam.step(p, zero);
  EXPECT_EQ(p, before);
}

TEST(Init, GlorotBoundsAndSeeded) {
  ModelParams a = init_params(10, {20, 30}, 2, 42), b = init_params(10, {20, 30}, 2, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, init_params(10, {20, 30}, 2, 43));
  EXPECT_LE(a.layer_weights[0].cwiseAbs().maxCoeff(), std::sqrt(6.0 / 30.0));
  EXPECT_LE(a.layer_weights[1].cwiseAbs().maxCoeff(), std::sqrt(6.0 / 50.0));
  EXPECT_EQ(a.layer_sizes(), (std::vector<int>{20, 30}));
}

std::vector<LabeledGraph> toy_set() {
  Matrix a(1, 2), b(1, 2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  return {{AttributedGraph(a, Matrix::Zero(1, 1), {}), 1},
          {AttributedGraph(b, Matrix::Zero(1, 1), {}), 0}};
}

TEST(Train, SeparableToySetConverges) {
  TrainConfig cfg;
  cfg.layer_sizes = {8};
  cfg.epochs = 200;
  cfg.learning_rate = 0.01;
  cfg.seed = 3;
  TrainResult r = train(toy_set(), cfg);
  ASSERT_EQ(r.log.size(), 200u);
  EXPECT_LT(r.log.back().train_loss, 1e-2);
  EXPECT_EQ(evaluate(r.params, toy_set()).accuracy, 1.0);
}

TEST(Train, DeterministicTrajectories) {
  TrainConfig cfg;
  cfg.layer_sizes = {4, 4};
  cfg.epochs = 20;
  cfg.seed = 17;
  TrainResult a = train(toy_set(), cfg), b = train(toy_set(), cfg);
  EXPECT_EQ(a.params, b.params);
  for (std::size_t i = 0; i < a.log.size(); ++i)
    EXPECT_EQ(a.log[i].train_loss, b.log[i].train_loss);
}

TEST(Train, SingleClassIsAnError) {
  auto data = toy_set();
  data[1].label = 1;
  EXPECT_THROW(train(data, TrainConfig{}), TrainingError);
}

TEST(Train, InverseFrequencyClassWeights) {
  auto data = toy_set();
  data.push_back(data[0]);
  data.push_back(data[0]);
  std::vector<double> w = class_weights(data, 2);
  EXPECT_NEAR(w[1] / w[0], 1.0 / 3.0, 1e-15);
}

TEST(Evaluate, AucExamples) {
  EXPECT_DOUBLE_EQ(*roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(*roc_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}), 0.5);
  EXPECT_DOUBLE_EQ(*roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 0, 1, 0}), 0.75);
  EXPECT_FALSE(roc_auc({0.1, 0.2}, {1, 1}).has_value());
  EXPECT_FALSE(pr_auc({0.1, 0.2}, {0, 0}).has_value());
  EXPECT_DOUBLE_EQ(*pr_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}), 1.0);
  // Average precision: hits at ranks 1 and 3 -> (1 + 2/3) / 2.
  EXPECT_NEAR(*pr_auc({0.9, 0.8, 0.2, 0.1}, {1, 0, 1, 0}), (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
}

TEST(Evaluate, OneClassSetHasNoAuc) {
  Rng rng(12);
  auto data = toy_set();
  data.pop_back();
  EvalMetrics m = evaluate(testing::random_params(rng, 2, {3}, 2), data);
  EXPECT_FALSE(m.roc_auc.has_value());
  EXPECT_EQ(m.n, 1);
}

TEST(Occlude, Examples) {
  AttributedGraph g = featurize(parse_smiles("CCO"));
  EXPECT_EQ(occlude(g, {false, false, false}).node_features(), g.node_features());
  AttributedGraph all = occlude(g, {true, true, true});
  EXPECT_EQ(all.node_features().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(all.adjacency(), g.adjacency());
  Rng rng(13);
  ForwardTrace t = forward(all, testing::random_params(rng, g.feature_width(), {4}, 2));
  EXPECT_DOUBLE_EQ(t.probabilities(0), 0.5);
  AttributedGraph one = occlude(g, {false, true, false});
  EXPECT_EQ(one.node_features().row(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(one.node_features().row(0), g.node_features().row(0));
  EXPECT_EQ(one.node_features().row(2), g.node_features().row(2));
}

TEST(Checkpoint, ByteIdenticalRoundTrip) {
  Checkpoint ck;
  ck.params = init_params(23, {16, 32, 64}, 2, 99);
  ck.config.seed = 99;
  ck.config.layer_sizes = {16, 32, 64};
  ck.tool_version = "test";
  ck.config_hash = "0123456789abcdef";
  const std::string text = serialize_checkpoint(ck);
  Checkpoint back = parse_checkpoint(text);
  EXPECT_EQ(back.params, ck.params);
  EXPECT_EQ(back.config, ck.config);
  EXPECT_EQ(back.scheme, ck.scheme);
  EXPECT_EQ(serialize_checkpoint(back), text);
  EXPECT_THROW(parse_checkpoint("{not json"), DataError);
}

}  // namespace
}  // namespace gcnx
