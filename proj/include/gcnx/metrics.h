//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_METRICS_H_
#define GCNX_METRICS_H_

#include <functional>
#include <string>
#include <vector>

#include "gcnx/explain.h"
#include "gcnx/model.h"

namespace gcnx {

// m0 belongs to the positive class, m1 to the negative class.
using BinaryMask = std::vector<bool>;

inline constexpr double kDefaultSaliencyThreshold = 0.01;

struct Contrastivity {
  double percent = 0.0;
  bool degenerate = false;  // empty union
};

// 100 * d_H(m0, m1) / |m0 v m1|. Throws ConfigError on a length mismatch.
Contrastivity contrastivity(const BinaryMask &m0, const BinaryMask &m1);

// 100 * (1 - |m0 v m1| / n_nodes).
double sparsity(const BinaryMask &m0, const BinaryMask &m1, int n_nodes);

using Explainer = std::function<Heatmap(const ForwardTrace &, const AttributedGraph &,
                                        const ModelParams &, int)>;

Explainer method_explainer(Method method);

// Drop in accuracy after zeroing every node whose pair-normalized saliency
// for the predicted class exceeds `threshold`. The drop is computed per
// true class and averaged over the classes present.
double fidelity(const ModelParams &params, const std::vector<LabeledGraph> &data,
                const Explainer &explainer,
                double threshold = kDefaultSaliencyThreshold);

struct MetricReport {
  std::string method;
  double fidelity = 0.0;
  double contrastivity_mean = 0.0;
  double contrastivity_std = 0.0;
  double sparsity_mean = 0.0;
  double sparsity_std = 0.0;
  int n_molecules = 0;
  int n_degenerate = 0;  // molecules excluded from the contrastivity mean
};

struct MetricOptions {
  double fidelity_threshold = kDefaultSaliencyThreshold;
  double binarize_threshold = kDefaultSaliencyThreshold;
  int positive_class = 1;
};

MetricReport evaluate_explainer(const ModelParams &params,
                                const std::vector<LabeledGraph> &data,
                                const std::string &name, const Explainer &explainer,
                                const MetricOptions &options = {});

// One report per method, in the order given. Means and population standard
// deviations are taken over molecules.
std::vector<MetricReport> metric_suite(const ModelParams &params,
                                       const std::vector<LabeledGraph> &data,
                                       const std::vector<Method> &methods,
                                       const MetricOptions &options = {});

// Table with one row per method and fidelity / contrastivity / sparsity
// columns. `header` lines are emitted as '#' comments.
std::string metrics_csv(const std::vector<MetricReport> &reports,
                        const std::vector<std::string> &header = {});
std::string metrics_json(const std::vector<MetricReport> &reports,
                         const std::string &provenance_json = "{}");

}  // namespace gcnx

#endif  // GCNX_METRICS_H_
