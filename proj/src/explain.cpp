//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/explain.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "gcnx/error.h"

namespace gcnx {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 7> kNames = {{
    {Method::kGradient, "gradient"},
    {Method::kCam, "cam"},
    {Method::kGradCam, "gradcam"},
    {Method::kGradCamAvg, "gradcam_avg"},
    {Method::kEb, "eb"},
    {Method::kCeb, "ceb"},
    {Method::kNull, "null"},
}};

std::vector<double> relu_rows(const Matrix &m) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = std::max(0.0, m.row(i).sum());
  return out;
}

}  // namespace

std::string_view method_name(Method m) {
  for (const auto &[k, v] : kNames)
    if (k == m) return v;
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  std::string lower;
  for (char c : name)
    if (c != '-') lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "grad_cam") lower = "gradcam";
  if (lower == "grad_cam_avg" || lower == "gradcamavg") lower = "gradcam_avg";
  if (lower == "c_eb" || lower == "contrastive_eb") lower = "ceb";
  for (const auto &[k, v] : kNames)
    if (v == lower) return k;
  return std::nullopt;
}

std::vector<Method> default_methods() {
  return {Method::kGradient, Method::kGradCam, Method::kGradCamAvg, Method::kEb,
          Method::kCeb};
}

double Heatmap::total() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

Heatmap gradient_saliency(const ForwardTrace &trace, const AttributedGraph &graph,
                          const ModelParams &params, int class_id) {
  const Gradients g = backward(trace, graph, params, class_id);
  const Matrix clamped = g.wrt_input().cwiseMax(0.0);
  Heatmap h{Method::kGradient, class_id, std::nullopt, {}, false};
  h.values.resize(static_cast<std::size_t>(clamped.rows()));
  for (Eigen::Index n = 0; n < clamped.rows(); ++n)
    h.values[n] = clamped.row(n).norm();
  return h;
}

Heatmap cam(const ForwardTrace &trace, const ModelParams &params, int class_id) {
  if (class_id < 0 || class_id >= params.n_classes())
    throw ConfigError("class out of range");
  const Matrix weighted =
      trace.final_features() * params.classifier_weights.col(class_id);
  return Heatmap{Method::kCam, class_id, std::nullopt, relu_rows(weighted), false};
}

namespace {

Heatmap grad_cam_from(const ForwardTrace &trace, const Gradients &g,
                      int class_id, int layer) {
  const Matrix &features = trace.activations[layer];
  const Vector alpha = g.wrt_activations[layer].colwise().mean().transpose();
  return Heatmap{Method::kGradCam, class_id, layer,
                 relu_rows(features * alpha), false};
}

}  // namespace

Heatmap grad_cam(const ForwardTrace &trace, const AttributedGraph &graph,
                 const ModelParams &params, int class_id, int layer) {
  if (layer < 1 || layer > params.n_layers())
    throw ConfigError("Grad-CAM layer " + std::to_string(layer)
                      + " outside 1.." + std::to_string(params.n_layers()));
  return grad_cam_from(trace, backward(trace, graph, params, class_id), class_id,
                       layer);
}

Heatmap grad_cam_avg(const ForwardTrace &trace, const AttributedGraph &graph,
                     const ModelParams &params, int class_id) {
  const Gradients g = backward(trace, graph, params, class_id);
  const int n_layers = params.n_layers();
  std::vector<double> sum(static_cast<std::size_t>(trace.n_nodes), 0.0);
  for (int l = 1; l <= n_layers; ++l) {
    const Heatmap h = grad_cam_from(trace, g, class_id, l);
    for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += h.values[n];
  }
  for (double &v : sum) v /= n_layers;
  return Heatmap{Method::kGradCamAvg, class_id, std::nullopt, std::move(sum), false};
}

ExcitationPass excitation_pass(const ForwardTrace &trace,
                               const AttributedGraph &graph,
                               const ModelParams &params, int class_id,
                               bool negate_classifier) {
  if (class_id < 0 || class_id >= params.n_classes())
    throw ConfigError("class out of range");
  const int n_layers = params.n_layers();
  const double n = trace.n_nodes;
  ExcitationPass pass;
  auto record = [&](std::string name, double mass, bool degenerate) {
    pass.stages.push_back({std::move(name), mass, degenerate});
  };
  record("class", 1.0, false);

  // Softmax classifier: p(e_k) = e_k ReLU(w^c_k) / sum_k e_k ReLU(w^c_k).
  const Vector w = negate_classifier ? Vector(-params.classifier_weights.col(class_id))
                                     : Vector(params.classifier_weights.col(class_id));
  const Vector &e = trace.gap;
  Vector p_gap = e.cwiseProduct(w.cwiseMax(0.0));
  const double z = p_gap.sum();
  bool degenerate = false;
  if (z > 0.0) {
    p_gap /= z;
  } else {
    p_gap.setZero();
    degenerate = true;
  }
  record("gap", p_gap.sum(), degenerate);

  // GAP: p(F^L_{n,k}) = F^L_{n,k} / (N e_k) p(e_k).
  const Matrix &f_last = trace.final_features();
  Matrix p_out = Matrix::Zero(f_last.rows(), f_last.cols());
  degenerate = false;
  for (Eigen::Index k = 0; k < f_last.cols(); ++k) {
    if (e(k) > 0.0) {
      p_out.col(k) = f_last.col(k) * (p_gap(k) / (n * e(k)));
    } else if (p_gap(k) > 0.0) {
      degenerate = true;
    }
  }
  record("layer " + std::to_string(n_layers) + " output", p_out.sum(), degenerate);

  const Matrix &v = graph.norm_propagation();
  for (int l = n_layers; l >= 1; --l) {
    // Only the input layer can hold negative values; its excitation uses
    // the nonnegative part so every split is a proper distribution.
    const Matrix f_prev = l == 1 ? Matrix(trace.activations[0].cwiseMax(0.0))
                                 : trace.activations[l - 1];
    const Matrix h = l == 1 ? Matrix(v * f_prev) : trace.propagated[l - 1];
    const Matrix w_pos = params.layer_weights[l - 1].cwiseMax(0.0);

    // Per-node perceptron: split p(F^l_{n,k'}) over inputs k in proportion
    // to H_{n,k} ReLU(W_{k,k'}).
    const Matrix denom = h * w_pos;
    Matrix ratio = Matrix::Zero(p_out.rows(), p_out.cols());
    degenerate = false;
    for (Eigen::Index i = 0; i < ratio.rows(); ++i)
      for (Eigen::Index k = 0; k < ratio.cols(); ++k) {
        if (denom(i, k) > 0.0)
          ratio(i, k) = p_out(i, k) / denom(i, k);
        else if (p_out(i, k) > 0.0)
          degenerate = true;
      }
    const Matrix p_prop = h.cwiseProduct(ratio * w_pos.transpose());
    record("layer " + std::to_string(l) + " perceptron input", p_prop.sum(),
           degenerate);

    // Local averaging H = V F^{l-1}: split p(H_{n,k}) over neighbors m in
    // proportion to V_{n,m} F^{l-1}_{m,k}.
    Matrix ratio2 = Matrix::Zero(h.rows(), h.cols());
    degenerate = false;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      for (Eigen::Index k = 0; k < h.cols(); ++k) {
        if (h(i, k) > 0.0)
          ratio2(i, k) = p_prop(i, k) / h(i, k);
        else if (p_prop(i, k) > 0.0)
          degenerate = true;
      }
    p_out = f_prev.cwiseProduct(v.transpose() * ratio2);
    record(l == 1 ? std::string("input") : "layer " + std::to_string(l - 1) + " output",
           p_out.sum(), degenerate);
  }

  pass.input_probability = p_out;
  pass.node_map.resize(static_cast<std::size_t>(p_out.rows()));
  const double d_in = static_cast<double>(p_out.cols());
  for (Eigen::Index i = 0; i < p_out.rows(); ++i)
    pass.node_map[i] = p_out.row(i).sum() / d_in;
  return pass;
}

Heatmap excitation_bp(const ForwardTrace &trace, const AttributedGraph &graph,
                      const ModelParams &params, int class_id,
                      bool contrastive) {
  ExcitationPass target = excitation_pass(trace, graph, params, class_id, false);
  if (!contrastive)
    return Heatmap{Method::kEb, class_id, std::nullopt, std::move(target.node_map),
                   false};
  const ExcitationPass dual = excitation_pass(trace, graph, params, class_id, true);
  // Differences at rounding level carry no contrast; renormalizing them
  // would turn noise into a full-scale map.
  double peak = 0.0;
  for (std::size_t i = 0; i < target.node_map.size(); ++i)
    peak = std::max({peak, target.node_map[i], dual.node_map[i]});
  const double floor = kContrastNoiseFloor * peak;
  std::vector<double> diff(target.node_map.size());
  double total = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const double d = target.node_map[i] - dual.node_map[i];
    diff[i] = d > floor ? d : 0.0;
    total += diff[i];
  }
  if (total > 0.0)
    for (double &d : diff) d /= total;
  return Heatmap{Method::kCeb, class_id, std::nullopt, std::move(diff), false};
}

Heatmap explain(Method method, const ForwardTrace &trace,
                const AttributedGraph &graph, const ModelParams &params,
                int class_id, std::optional<int> layer) {
  switch (method) {
    case Method::kGradient:
      return gradient_saliency(trace, graph, params, class_id);
    case Method::kCam:
      return cam(trace, params, class_id);
    case Method::kGradCam:
      return grad_cam(trace, graph, params, class_id,
                      layer.value_or(params.n_layers()));
    case Method::kGradCamAvg:
      return grad_cam_avg(trace, graph, params, class_id);
    case Method::kEb:
      return excitation_bp(trace, graph, params, class_id, false);
    case Method::kCeb:
      return excitation_bp(trace, graph, params, class_id, true);
    case Method::kNull:
      return Heatmap{Method::kNull, class_id, std::nullopt,
                     std::vector<double>(static_cast<std::size_t>(trace.n_nodes), 0.0),
                     false};
  }
  throw ConfigError("unknown explanation method");
}

std::pair<Heatmap, Heatmap> normalize_pair(const Heatmap &h_pos,
                                           const Heatmap &h_neg) {
  if (h_pos.values.size() != h_neg.values.size())
    throw ConfigError("heatmaps of one molecule must have equal length");
  const double total = h_pos.total() + h_neg.total();
  std::pair<Heatmap, Heatmap> out{h_pos, h_neg};
  if (!(total > 0.0)) {
    out.first.normalized = out.second.normalized = false;
    return out;
  }
  for (double &v : out.first.values) v /= total;
  for (double &v : out.second.values) v /= total;
  out.first.normalized = out.second.normalized = true;
  return out;
}

std::vector<bool> binarize(const Heatmap &heatmap, double threshold) {
  std::vector<bool> bits(heatmap.values.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    bits[i] = heatmap.values[i] > threshold;
  return bits;
}

std::string heatmap_record(const Heatmap &heatmap, const std::string &molecule_id,
                           const std::string &smiles) {
  nlohmann::ordered_json j;
  j["molecule_id"] = molecule_id;
  j["smiles"] = smiles;
  j["method"] = std::string(method_name(heatmap.method));
  j["class"] = heatmap.class_id;
  if (heatmap.layer) j["layer"] = *heatmap.layer;
  std::string out = j.dump();
  out.pop_back();  // reopen the object to append values with fixed precision
  out += ",\"values\":[";
  char buf[32];
  for (std::size_t i = 0; i < heatmap.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g", heatmap.values[i]);
    if (i) out += ',';
    out += buf;
  }
  out += "],\"normalized\":";
  out += heatmap.normalized ? "true" : "false";
  out += "}";
  return out;
}

}  // namespace gcnx
