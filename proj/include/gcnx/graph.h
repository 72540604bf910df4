//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_GRAPH_H_
#define GCNX_GRAPH_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gcnx {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Fixed element vocabulary. Order is the featurization order.
enum class Element : std::uint8_t {
  kB = 0,
  kC,
  kN,
  kO,
  kP,
  kS,
  kF,
  kCl,
  kBr,
  kI,
  kOther,
};

inline constexpr int kElementCount = 11;

std::string_view element_symbol(Element e);

// Maps "C", "Cl", ... to the vocabulary; everything else becomes kOther.
// Lowercase aromatic spellings ("c", "n") are accepted as well.
Element element_from_symbol(std::string_view symbol);

struct ElementLabel {
  Element symbol = Element::kOther;
  int formal_charge = 0;
  bool aromatic = false;

  // Compact integer used as a node color by the miner.
  int code() const;

  friend bool operator==(const ElementLabel &, const ElementLabel &) = default;
};

std::string to_string(const ElementLabel &label);

// Symmetric binary adjacency with zero diagonal, node features and the
// normalized propagation matrix V = D^-1/2 (A + I) D^-1/2.
class AttributedGraph {
 public:
  AttributedGraph() = default;

  // Validates the adjacency and precomputes V. Throws StructuralError on a
  // malformed adjacency or mismatched row counts.
  AttributedGraph(Matrix node_features, Matrix adjacency,
                  std::vector<ElementLabel> node_elements);

  int n_nodes() const { return static_cast<int>(adjacency_.rows()); }
  int feature_width() const { return static_cast<int>(features_.cols()); }

  const Matrix &node_features() const { return features_; }
  const Matrix &adjacency() const { return adjacency_; }
  const Matrix &norm_propagation() const { return propagation_; }
  const std::vector<ElementLabel> &node_elements() const { return elements_; }

  bool has_edge(int i, int j) const { return adjacency_(i, j) != 0.0; }
  std::vector<int> neighbors(int i) const;
  int degree(int i) const;

  // Same topology and labels, replacement features.
  AttributedGraph with_features(Matrix node_features) const;

  // Node i of the result is node perm[i] of this graph.
  AttributedGraph permuted(const std::vector<int> &perm) const;

 private:
  Matrix features_;
  Matrix adjacency_;
  Matrix propagation_;
  std::vector<ElementLabel> elements_;
};

Matrix normalize_adjacency(const Matrix &adjacency);

// Maximal connected vertex sets of the subgraph induced by the masked
// vertices. Each component is sorted; components are ordered by their
// smallest vertex.
std::vector<std::vector<int>> connected_components(
    const AttributedGraph &graph, const std::vector<bool> &vertex_mask);

std::vector<std::vector<int>> connected_components(
    const Matrix &adjacency, const std::vector<bool> &vertex_mask);

}  // namespace gcnx

#endif  // GCNX_GRAPH_H_
