//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/metrics.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "gcnx/error.h"
#include "gcnx/parallel.h"

namespace gcnx {

namespace {

struct MeanStd {
  double mean = 0.0;
  double stdev = 0.0;
};

MeanStd population(const std::vector<double> &xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.stdev = std::sqrt(ss / xs.size());
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

Contrastivity contrastivity(const BinaryMask &m0, const BinaryMask &m1) {
  if (m0.size() != m1.size()) throw ConfigError("mask lengths differ");
  int hamming = 0, uni = 0;
  for (std::size_t i = 0; i < m0.size(); ++i) {
    hamming += m0[i] != m1[i];
    uni += m0[i] || m1[i];
  }
  if (uni == 0) return {0.0, true};
  return {100.0 * hamming / uni, false};
}

double sparsity(const BinaryMask &m0, const BinaryMask &m1, int n_nodes) {
  if (static_cast<int>(m0.size()) != n_nodes
      || static_cast<int>(m1.size()) != n_nodes || n_nodes <= 0)
    throw ConfigError("masks must have n_nodes > 0 entries");
  int uni = 0;
  for (int i = 0; i < n_nodes; ++i) uni += m0[i] || m1[i];
  return 100.0 * (1.0 - static_cast<double>(uni) / n_nodes);
}

Explainer method_explainer(Method method) {
  return [method](const ForwardTrace &t, const AttributedGraph &g,
                  const ModelParams &p, int c) { return explain(method, t, g, p, c); };
}

namespace {

// Pair-normalized maps (positive class first).
std::pair<Heatmap, Heatmap> class_pair(const Explainer &explainer,
                                       const ForwardTrace &t,
                                       const AttributedGraph &g,
                                       const ModelParams &p, int positive) {
  const int negative = positive == 1 ? 0 : 1;
  return normalize_pair(explainer(t, g, p, positive), explainer(t, g, p, negative));
}

}  // namespace

double fidelity(const ModelParams &params, const std::vector<LabeledGraph> &data,
                const Explainer &explainer, double threshold) {
  if (data.empty()) throw DataError("fidelity needs a nonempty dataset");
  if (params.n_classes() != 2) throw ConfigError("fidelity expects two classes");
  std::vector<int> before(data.size()), after(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    const LabeledGraph &d = data[i];
    const ForwardTrace t = forward(d.graph, params);
    Eigen::Index arg;
    t.probabilities.maxCoeff(&arg);
    const int predicted = static_cast<int>(arg);
    auto [h_pred, h_other] = class_pair(explainer, t, d.graph, params, predicted);
    before[i] = predicted;
    after[i] = predict(params, occlude(d.graph, binarize(h_pred, threshold)));
  });
  std::map<int, std::array<int, 3>> per_class;  // n, correct before, after
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto &c = per_class[data[i].label];
    c[0] += 1;
    c[1] += before[i] == data[i].label;
    c[2] += after[i] == data[i].label;
  }
  double sum = 0.0;
  for (const auto &[label, c] : per_class)
    sum += static_cast<double>(c[1] - c[2]) / c[0];
  return sum / per_class.size();
}

MetricReport evaluate_explainer(const ModelParams &params,
                                const std::vector<LabeledGraph> &data,
                                const std::string &name, const Explainer &explainer,
                                const MetricOptions &options) {
  MetricReport r;
  r.method = name;
  r.n_molecules = static_cast<int>(data.size());
  if (data.empty()) return r;
  r.fidelity = fidelity(params, data, explainer, options.fidelity_threshold);
  std::vector<Contrastivity> con(data.size());
  std::vector<double> spa(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    const LabeledGraph &d = data[i];
    const ForwardTrace t = forward(d.graph, params);
    auto [h_pos, h_neg] =
        class_pair(explainer, t, d.graph, params, options.positive_class);
    const BinaryMask m0 = binarize(h_pos, options.binarize_threshold);
    const BinaryMask m1 = binarize(h_neg, options.binarize_threshold);
    con[i] = contrastivity(m0, m1);
    spa[i] = sparsity(m0, m1, d.graph.n_nodes());
  });
  std::vector<double> con_values;
  for (const auto &c : con) {
    if (c.degenerate)
      ++r.n_degenerate;
    else
      con_values.push_back(c.percent);
  }
  const MeanStd c = population(con_values);
  const MeanStd s = population(spa);
  r.contrastivity_mean = c.mean;
  r.contrastivity_std = c.stdev;
  r.sparsity_mean = s.mean;
  r.sparsity_std = s.stdev;
  return r;
}

std::vector<MetricReport> metric_suite(const ModelParams &params,
                                       const std::vector<LabeledGraph> &data,
                                       const std::vector<Method> &methods,
                                       const MetricOptions &options) {
  std::vector<MetricReport> out;
  for (Method m : methods)
    out.push_back(evaluate_explainer(params, data, std::string(method_name(m)),
                                     method_explainer(m), options));
  return out;
}

std::string metrics_csv(const std::vector<MetricReport> &reports,
                        const std::vector<std::string> &header) {
  std::string out;
  for (const auto &h : header) out += "# " + h + "\n";
  out += "method,fidelity,contrastivity_mean,contrastivity_std,sparsity_mean,"
         "sparsity_std,n_molecules,n_degenerate\n";
  for (const auto &r : reports)
    out += r.method + "," + fmt(r.fidelity) + "," + fmt(r.contrastivity_mean) + ","
           + fmt(r.contrastivity_std) + "," + fmt(r.sparsity_mean) + ","
           + fmt(r.sparsity_std) + "," + std::to_string(r.n_molecules) + ","
           + std::to_string(r.n_degenerate) + "\n";
  return out;
}

std::string metrics_json(const std::vector<MetricReport> &reports,
                         const std::string &provenance_json) {
  nlohmann::ordered_json j;
  j["provenance"] = nlohmann::ordered_json::parse(provenance_json);
  auto rows = nlohmann::ordered_json::array();
  for (const auto &r : reports) {
    nlohmann::ordered_json row;
    row["method"] = r.method;
    row["fidelity"] = r.fidelity;
    row["contrastivity"] = {{"mean", r.contrastivity_mean}, {"std", r.contrastivity_std}};
    row["sparsity"] = {{"mean", r.sparsity_mean}, {"std", r.sparsity_std}};
    row["n_molecules"] = r.n_molecules;
    row["n_degenerate"] = r.n_degenerate;
    rows.push_back(row);
  }
  j["methods"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace gcnx
