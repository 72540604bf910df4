//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_MODEL_H_
#define GCNX_MODEL_H_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gcnx/graph.h"

namespace gcnx {

// Graph convolution stack -> global average pooling -> linear class scores
// -> softmax. Layers carry no bias; activation is ReLU.
struct ModelParams {
  // layer_weights[l] is d_l x d_{l+1}; d_0 is the input feature width.
  std::vector<Matrix> layer_weights;
  // K x C, column c holds w^c.
  Matrix classifier_weights;

  int n_layers() const { return static_cast<int>(layer_weights.size()); }
  int n_classes() const { return static_cast<int>(classifier_weights.cols()); }
  int input_width() const;
  std::vector<int> layer_sizes() const;

  // Throws ConfigError when the shapes do not chain.
  void validate() const;

  friend bool operator==(const ModelParams &, const ModelParams &) = default;
};

// Glorot-uniform initialization from a seeded generator.
ModelParams init_params(int input_width, const std::vector<int> &layer_sizes,
                        int n_classes, std::uint64_t seed);

struct ForwardTrace {
  int n_nodes = 0;
  // activations[0] = X, activations[l] = F^l for l = 1..L (N x d_l).
  std::vector<Matrix> activations;
  // propagated[l-1] = V F^{l-1} (N x d_{l-1}), the input of layer l's
  // per-node perceptron.
  std::vector<Matrix> propagated;
  // preactivations[l-1] = V F^{l-1} W^l (N x d_l).
  std::vector<Matrix> preactivations;
  Vector gap;            // e_k
  Vector scores;         // y^c, before softmax
  Vector probabilities;  // softmax(y)

  int n_layers() const { return static_cast<int>(preactivations.size()); }
  const Matrix &final_features() const { return activations.back(); }
};

ForwardTrace forward(const AttributedGraph &graph, const ModelParams &params);

// Class scores obtained by replacing F^layer with `features` and running the
// remaining layers. layer = 0 replaces the input.
Vector scores_from_layer(const AttributedGraph &graph,
                         const ModelParams &params, int layer,
                         const Matrix &features);

struct Gradients {
  std::vector<Matrix> layer_weights;  // same shapes as ModelParams
  Matrix classifier_weights;
  // wrt_activations[l] = d objective / d F^l; [0] is d/dX.
  std::vector<Matrix> wrt_activations;

  const Matrix &wrt_input() const { return wrt_activations.front(); }
};

// Reverse-mode gradients of sum_c score_weights[c] * y^c.
Gradients backward_scores(const ForwardTrace &trace, const AttributedGraph &graph,
                          const ModelParams &params, const Vector &score_weights);

// Gradients of the single class score y^c.
Gradients backward(const ForwardTrace &trace, const AttributedGraph &graph,
                   const ModelParams &params, int target_class);

// Weighted softmax cross-entropy, -w_label * log p_label.
double cross_entropy(const ForwardTrace &trace, int label, double class_weight = 1.0);

// Gradients of cross_entropy().
Gradients backward_loss(const ForwardTrace &trace, const AttributedGraph &graph,
                        const ModelParams &params, int label,
                        double class_weight = 1.0);

// Zeroes the feature rows of masked nodes. Adjacency and V are unchanged.
AttributedGraph occlude(const AttributedGraph &graph,
                        const std::vector<bool> &mask);

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::vector<int> layer_sizes = {128, 256, 512};
  std::uint64_t seed = 0;
  bool class_weighting = true;
  // Graphs whose gradients are summed before one optimizer step.
  int batch_size = 1;

  static std::vector<int> desk_scale_sizes() { return {16, 32, 64}; }

  // Throws ConfigError when a field is out of range.
  void validate() const;

  friend bool operator==(const TrainConfig &, const TrainConfig &) = default;
};

class Adam {
 public:
  Adam(const ModelParams &shape, const TrainConfig &cfg);

  void step(ModelParams &params, const Gradients &grads);

  long steps() const { return t_; }

 private:
  void update(Matrix &param, const Matrix &grad, Matrix &m, Matrix &v) const;

  double lr_, b1_, b2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_layers_, v_layers_;
  Matrix m_cls_, v_cls_;
};

struct LabeledGraph {
  AttributedGraph graph;
  int label = 0;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> validation_loss;
  std::optional<double> validation_accuracy;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
  int best_epoch = 0;
};

// Per-graph Adam training with seeded init and shuffling. With a
// validation set the parameters of the epoch with the lowest validation
// loss are returned, otherwise those after the final epoch.
TrainResult train(const std::vector<LabeledGraph> &train_set,
                  const TrainConfig &cfg,
                  const std::vector<LabeledGraph> &validation_set = {});

// Inverse class frequency weights n / (C * n_c).
std::vector<double> class_weights(const std::vector<LabeledGraph> &data,
                                  int n_classes);

struct EvalMetrics {
  double accuracy = 0.0;
  double mean_loss = 0.0;
  std::optional<double> roc_auc;  // absent for single-class sets
  std::optional<double> pr_auc;
  int n = 0;
};

EvalMetrics evaluate(const ModelParams &params,
                     const std::vector<LabeledGraph> &data);

// Mann-Whitney rank statistic with averaged tie ranks.
std::optional<double> roc_auc(const std::vector<double> &scores,
                              const std::vector<int> &labels);

// Average precision; tied scores are processed as one threshold.
std::optional<double> pr_auc(const std::vector<double> &scores,
                             const std::vector<int> &labels);

int predict(const ModelParams &params, const AttributedGraph &graph);

}  // namespace gcnx

#endif  // GCNX_MODEL_H_
