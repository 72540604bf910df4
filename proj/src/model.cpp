//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gcnx/error.h"
#include "gcnx/random.h"

namespace gcnx {

namespace {

Vector softmax(const Vector &y) {
  Vector p = (y.array() - y.maxCoeff()).exp();
  return p / p.sum();
}

void check_trace(const ForwardTrace &trace, const AttributedGraph &graph,
                 const ModelParams &params) {
  if (trace.n_nodes != graph.n_nodes()
      || trace.n_layers() != params.n_layers()
      || static_cast<int>(trace.activations.size()) != params.n_layers() + 1)
    throw ConsistencyError("trace does not match graph/parameters");
  for (int l = 0; l < params.n_layers(); ++l) {
    if (trace.preactivations[l].cols() != params.layer_weights[l].cols()
        || trace.propagated[l].cols() != params.layer_weights[l].rows())
      throw ConsistencyError("trace layer " + std::to_string(l + 1)
                             + " has stale shape");
  }
  if (trace.scores.size() != params.n_classes())
    throw ConsistencyError("trace class count differs from parameters");
}

}  // namespace

int ModelParams::input_width() const {
  return layer_weights.empty() ? 0 : static_cast<int>(layer_weights[0].rows());
}

std::vector<int> ModelParams::layer_sizes() const {
  std::vector<int> out;
  for (const auto &w : layer_weights) out.push_back(static_cast<int>(w.cols()));
  return out;
}

void ModelParams::validate() const {
  if (layer_weights.empty()) throw ConfigError("model has no layers");
  for (std::size_t l = 1; l < layer_weights.size(); ++l)
    if (layer_weights[l].rows() != layer_weights[l - 1].cols())
      throw ConfigError("layer " + std::to_string(l + 1) + " expects width "
                        + std::to_string(layer_weights[l].rows()) + " but layer "
                        + std::to_string(l) + " produces "
                        + std::to_string(layer_weights[l - 1].cols()));
  if (classifier_weights.rows() != layer_weights.back().cols())
    throw ConfigError("classifier rows differ from final layer width");
  if (classifier_weights.cols() < 1) throw ConfigError("no classes");
}

ModelParams init_params(int input_width, const std::vector<int> &layer_sizes,
                        int n_classes, std::uint64_t seed) {
  if (input_width <= 0 || layer_sizes.empty() || n_classes < 1)
    throw ConfigError("invalid model dimensions");
  Rng rng(seed);
  auto glorot = [&](int fan_in, int fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix m(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i)
      for (int j = 0; j < fan_out; ++j) m(i, j) = rng.uniform(-limit, limit);
    return m;
  };
  ModelParams p;
  int width = input_width;
  for (int size : layer_sizes) {
    if (size <= 0) throw ConfigError("layer widths must be positive");
    p.layer_weights.push_back(glorot(width, size));
    width = size;
  }
  p.classifier_weights = glorot(width, n_classes);
  return p;
}

ForwardTrace forward(const AttributedGraph &graph, const ModelParams &params) {
  params.validate();
  if (graph.feature_width() != params.input_width())
    throw ConfigError("graph feature width "
                      + std::to_string(graph.feature_width())
                      + " differs from model input width "
                      + std::to_string(params.input_width()));
  if (graph.n_nodes() == 0) throw ConfigError("graph has no nodes");
  const Matrix &v = graph.norm_propagation();
  ForwardTrace t;
  t.n_nodes = graph.n_nodes();
  t.activations.push_back(graph.node_features());
  for (const Matrix &w : params.layer_weights) {
    t.propagated.push_back(v * t.activations.back());
    t.preactivations.push_back(t.propagated.back() * w);
    t.activations.push_back(t.preactivations.back().cwiseMax(0.0));
  }
  t.gap = t.final_features().colwise().mean().transpose();
  t.scores = params.classifier_weights.transpose() * t.gap;
  t.probabilities = softmax(t.scores);
  return t;
}

Vector scores_from_layer(const AttributedGraph &graph,
                         const ModelParams &params, int layer,
                         const Matrix &features) {
  if (layer < 0 || layer > params.n_layers())
    throw ConfigError("layer index out of range");
  const Matrix &v = graph.norm_propagation();
  Matrix f = features;
  for (int l = layer; l < params.n_layers(); ++l)
    f = (v * f * params.layer_weights[l]).cwiseMax(0.0);
  Vector gap = f.colwise().mean().transpose();
  return params.classifier_weights.transpose() * gap;
}

Gradients backward_scores(const ForwardTrace &trace, const AttributedGraph &graph,
                          const ModelParams &params, const Vector &score_weights) {
  check_trace(trace, graph, params);
  if (score_weights.size() != params.n_classes())
    throw ConsistencyError("score weight length differs from class count");
  const int n_layers = params.n_layers();
  const double n = trace.n_nodes;
  Gradients g;
  g.layer_weights.resize(static_cast<std::size_t>(n_layers));
  g.wrt_activations.resize(static_cast<std::size_t>(n_layers) + 1);

  const Vector d_gap = params.classifier_weights * score_weights;
  g.classifier_weights = trace.gap * score_weights.transpose();
  g.wrt_activations[n_layers] =
      Vector::Ones(trace.n_nodes) * (d_gap.transpose() / n);

  const Matrix &v = graph.norm_propagation();
  for (int l = n_layers - 1; l >= 0; --l) {
    const Matrix &z = trace.preactivations[l];
    Matrix d_pre = g.wrt_activations[l + 1];
    for (Eigen::Index i = 0; i < d_pre.rows(); ++i)
      for (Eigen::Index k = 0; k < d_pre.cols(); ++k)
        if (!(z(i, k) > 0.0)) d_pre(i, k) = 0.0;
    g.layer_weights[l] = trace.propagated[l].transpose() * d_pre;
    const Matrix d_prop = d_pre * params.layer_weights[l].transpose();
    g.wrt_activations[l] = v.transpose() * d_prop;
  }
  return g;
}

Gradients backward(const ForwardTrace &trace, const AttributedGraph &graph,
                   const ModelParams &params, int target_class) {
  if (target_class < 0 || target_class >= params.n_classes())
    throw ConfigError("target class out of range");
  Vector onehot = Vector::Zero(params.n_classes());
  onehot(target_class) = 1.0;
  return backward_scores(trace, graph, params, onehot);
}

double cross_entropy(const ForwardTrace &trace, int label, double class_weight) {
  const Vector &y = trace.scores;
  const double m = y.maxCoeff();
  const double log_z = m + std::log((y.array() - m).exp().sum());
  return class_weight * (log_z - y(label));
}

Gradients backward_loss(const ForwardTrace &trace, const AttributedGraph &graph,
                        const ModelParams &params, int label,
                        double class_weight) {
  if (label < 0 || label >= params.n_classes())
    throw ConfigError("label out of range");
  Vector d_scores = trace.probabilities;
  d_scores(label) -= 1.0;
  d_scores *= class_weight;
  return backward_scores(trace, graph, params, d_scores);
}

AttributedGraph occlude(const AttributedGraph &graph,
                        const std::vector<bool> &mask) {
  if (static_cast<int>(mask.size()) != graph.n_nodes())
    throw StructuralError("occlusion mask length differs from node count");
  Matrix x = graph.node_features();
  for (int i = 0; i < graph.n_nodes(); ++i)
    if (mask[i]) x.row(i).setZero();
  return graph.with_features(std::move(x));
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be nonnegative");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)
      || !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
    throw ConfigError("Adam betas must lie in (0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (layer_sizes.empty()) throw ConfigError("at least one layer is required");
  for (int s : layer_sizes)
    if (s <= 0) throw ConfigError("layer widths must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
}

Adam::Adam(const ModelParams &shape, const TrainConfig &cfg)
    : lr_(cfg.learning_rate), b1_(cfg.adam_beta1), b2_(cfg.adam_beta2),
      eps_(cfg.adam_eps) {
  for (const auto &w : shape.layer_weights) {
    m_layers_.push_back(Matrix::Zero(w.rows(), w.cols()));
    v_layers_.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
  m_cls_ = Matrix::Zero(shape.classifier_weights.rows(),
                        shape.classifier_weights.cols());
  v_cls_ = m_cls_;
}

void Adam::update(Matrix &param, const Matrix &grad, Matrix &m,
                  Matrix &v) const {
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  m = b1_ * m + (1.0 - b1_) * grad;
  v = b2_ * v + (1.0 - b2_) * grad.cwiseProduct(grad);
  param.array() -=
      lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
}

void Adam::step(ModelParams &params, const Gradients &grads) {
  ++t_;
  for (std::size_t l = 0; l < params.layer_weights.size(); ++l)
    update(params.layer_weights[l], grads.layer_weights[l], m_layers_[l],
           v_layers_[l]);
  update(params.classifier_weights, grads.classifier_weights, m_cls_, v_cls_);
}

std::vector<double> class_weights(const std::vector<LabeledGraph> &data,
                                  int n_classes) {
  std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
  for (const auto &d : data) counts[d.label] += 1.0;
  std::vector<double> w(static_cast<std::size_t>(n_classes), 0.0);
  for (int c = 0; c < n_classes; ++c)
    w[c] = counts[c] > 0 ? static_cast<double>(data.size()) / (n_classes * counts[c])
                         : 0.0;
  return w;
}

namespace {

double mean_loss(const ModelParams &p, const std::vector<LabeledGraph> &data,
                 double *accuracy) {
  double loss = 0.0;
  int correct = 0;
  for (const auto &d : data) {
    ForwardTrace t = forward(d.graph, p);
    loss += cross_entropy(t, d.label);
    Eigen::Index arg;
    t.probabilities.maxCoeff(&arg);
    correct += static_cast<int>(arg) == d.label;
  }
  if (accuracy) *accuracy = data.empty() ? 0.0 : static_cast<double>(correct) / data.size();
  return data.empty() ? 0.0 : loss / data.size();
}

void accumulate(Gradients &into, const Gradients &g) {
  for (std::size_t l = 0; l < into.layer_weights.size(); ++l)
    into.layer_weights[l] += g.layer_weights[l];
  into.classifier_weights += g.classifier_weights;
}

}  // namespace

TrainResult train(const std::vector<LabeledGraph> &train_set,
                  const TrainConfig &cfg,
                  const std::vector<LabeledGraph> &validation_set) {
  cfg.validate();
  if (train_set.empty()) throw TrainingError("training set is empty");
  int max_label = 0;
  std::vector<bool> present;
  for (const auto &d : train_set) {
    if (d.label < 0) throw TrainingError("negative label");
    max_label = std::max(max_label, d.label);
  }
  const int n_classes = std::max(2, max_label + 1);
  present.assign(static_cast<std::size_t>(n_classes), false);
  for (const auto &d : train_set) present[d.label] = true;
  if (std::count(present.begin(), present.end(), true) < 2)
    throw TrainingError("training set contains a single class");
  const int width = train_set.front().graph.feature_width();
  for (const auto &d : train_set)
    if (d.graph.feature_width() != width)
      throw TrainingError("inconsistent feature widths in training set");

  const std::vector<double> weights =
      cfg.class_weighting ? class_weights(train_set, n_classes)
                          : std::vector<double>(static_cast<std::size_t>(n_classes), 1.0);

  TrainResult result;
  ModelParams params = init_params(width, cfg.layer_sizes, n_classes, cfg.seed);
  Adam adam(params, cfg);
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  double best_val = std::numeric_limits<double>::infinity();
  result.params = params;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    int correct = 0;
    Gradients acc;
    int in_batch = 0;
    for (std::size_t idx : order) {
      const LabeledGraph &d = train_set[idx];
      ForwardTrace t = forward(d.graph, params);
      const double w = weights[d.label];
      loss_sum += cross_entropy(t, d.label, w);
      Eigen::Index arg;
      t.probabilities.maxCoeff(&arg);
      correct += static_cast<int>(arg) == d.label;
      Gradients g = backward_loss(t, d.graph, params, d.label, w);
      if (in_batch == 0)
        acc = std::move(g);
      else
        accumulate(acc, g);
      if (++in_batch == cfg.batch_size) {
        adam.step(params, acc);
        in_batch = 0;
      }
    }
    if (in_batch > 0) adam.step(params, acc);

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / train_set.size();
    log.train_accuracy = static_cast<double>(correct) / train_set.size();
    if (!validation_set.empty()) {
      double acc_v;
      log.validation_loss = mean_loss(params, validation_set, &acc_v);
      log.validation_accuracy = acc_v;
      if (*log.validation_loss < best_val) {
        best_val = *log.validation_loss;
        result.params = params;
        result.best_epoch = epoch;
      }
    }
    result.log.push_back(log);
  }
  if (validation_set.empty() || result.best_epoch == 0) {
    result.params = params;
    result.best_epoch = cfg.epochs;
  }
  return result;
}

int predict(const ModelParams &params, const AttributedGraph &graph) {
  ForwardTrace t = forward(graph, params);
  Eigen::Index arg;
  t.probabilities.maxCoeff(&arg);
  return static_cast<int>(arg);
}

std::optional<double> roc_auc(const std::vector<double> &scores,
                              const std::vector<int> &labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = avg;
    i = j + 1;
  }
  double n_pos = 0, n_neg = 0, rank_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] == 1) {
      n_pos += 1;
      rank_sum += rank[i];
    } else {
      n_neg += 1;
    }
  }
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg);
}

std::optional<double> pr_auc(const std::vector<double> &scores,
                             const std::vector<int> &labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double n_pos = 0;
  for (int l : labels) n_pos += l == 1;
  if (n_pos == 0 || n_pos == static_cast<double>(n)) return std::nullopt;
  double tp = 0, fp = 0, ap = 0, prev_recall = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) {
      (labels[idx[j]] == 1 ? tp : fp) += 1;
      ++j;
    }
    const double recall = tp / n_pos;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
    i = j;
  }
  return ap;
}

EvalMetrics evaluate(const ModelParams &params,
                     const std::vector<LabeledGraph> &data) {
  if (data.empty()) throw DataError("cannot evaluate an empty dataset");
  EvalMetrics m;
  m.n = static_cast<int>(data.size());
  std::vector<double> scores;
  std::vector<int> labels;
  int correct = 0;
  double loss = 0.0;
  for (const auto &d : data) {
    ForwardTrace t = forward(d.graph, params);
    Eigen::Index arg;
    t.probabilities.maxCoeff(&arg);
    correct += static_cast<int>(arg) == d.label;
    loss += cross_entropy(t, d.label);
    scores.push_back(t.probabilities.size() > 1 ? t.probabilities(1) : 0.0);
    labels.push_back(d.label);
  }
  m.accuracy = static_cast<double>(correct) / m.n;
  m.mean_loss = loss / m.n;
  m.roc_auc = roc_auc(scores, labels);
  m.pr_auc = pr_auc(scores, labels);
  return m;
}

}  // namespace gcnx
