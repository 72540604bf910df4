//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_EXPLAIN_H_
#define GCNX_EXPLAIN_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gcnx/model.h"

namespace gcnx {

enum class Method {
  kGradient,
  kCam,
  kGradCam,     // final convolutional layer unless a layer is given
  kGradCamAvg,
  kEb,
  kCeb,
  kNull,        // all-zero map, a reference for the metrics
};

std::string_view method_name(Method m);
// Accepts the names produced by method_name(), case-insensitively.
std::optional<Method> parse_method(std::string_view name);

// The five methods compared by the metrics table.
std::vector<Method> default_methods();

struct Heatmap {
  Method method = Method::kGradient;
  int class_id = 0;
  std::optional<int> layer;  // Grad-CAM layer (1-based)
  std::vector<double> values;
  bool normalized = false;

  double total() const;
};

// ||ReLU(dy^c / dX_n)||_2 per node.
Heatmap gradient_saliency(const ForwardTrace &trace, const AttributedGraph &graph,
                          const ModelParams &params, int class_id);

// ReLU(sum_k w^c_k F^L_{n,k}).
Heatmap cam(const ForwardTrace &trace, const ModelParams &params, int class_id);

// ReLU(sum_k alpha_k F^l_{n,k}) with alpha_k the node-mean of dy^c/dF^l_{n,k}.
// Throws ConfigError for a layer outside 1..L.
Heatmap grad_cam(const ForwardTrace &trace, const AttributedGraph &graph,
                 const ModelParams &params, int class_id, int layer);

// Mean of grad_cam over layers 1..L.
Heatmap grad_cam_avg(const ForwardTrace &trace, const AttributedGraph &graph,
                     const ModelParams &params, int class_id);

// Per-stage view of one excitation backprop pass, used to check that
// probability mass is conserved.
struct ExcitationPass {
  struct Stage {
    std::string name;
    double mass = 0.0;
    // Some unit holding mass had a vanishing normalizer and dropped it.
    bool degenerate = false;
  };
  std::vector<Stage> stages;
  Matrix input_probability;  // p(F^0), N x d_in
  std::vector<double> node_map;  // (1/d_in) sum_k p(F^0_{n,k})
};

// Top-down pass starting from p(class_id) = 1. With negate_classifier the
// classifier weights enter as -w (the dual unit used by the contrastive map).
// A normalizer of zero transmits zero mass (0/0 = 0).
ExcitationPass excitation_pass(const ForwardTrace &trace,
                               const AttributedGraph &graph,
                               const ModelParams &params, int class_id,
                               bool negate_classifier = false);

// c-EB differences at or below this fraction of the larger map's peak are
// treated as zero.
inline constexpr double kContrastNoiseFloor = 1e-10;

// EB map; the contrastive map is ReLU(EB(w) - EB(-w)) rescaled to unit sum.
Heatmap excitation_bp(const ForwardTrace &trace, const AttributedGraph &graph,
                      const ModelParams &params, int class_id,
                      bool contrastive);

// Dispatch by method. `layer` only applies to kGradCam.
Heatmap explain(Method method, const ForwardTrace &trace,
                const AttributedGraph &graph, const ModelParams &params,
                int class_id, std::optional<int> layer = std::nullopt);

// Divides both maps by their joint sum. A zero joint sum leaves both
// untouched with normalized = false.
std::pair<Heatmap, Heatmap> normalize_pair(const Heatmap &h_pos,
                                           const Heatmap &h_neg);

// Strict threshold on a (normalized) map.
std::vector<bool> binarize(const Heatmap &heatmap, double threshold);

// One JSON-lines record: {molecule_id, smiles, method, class, layer?,
// values[], normalized}. Values are written with 10 significant digits.
std::string heatmap_record(const Heatmap &heatmap, const std::string &molecule_id,
                           const std::string &smiles);

}  // namespace gcnx

#endif  // GCNX_EXPLAIN_H_
