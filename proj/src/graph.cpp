//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/graph.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <utility>

#include "gcnx/error.h"

namespace gcnx {

namespace {

constexpr std::array<std::string_view, kElementCount> kSymbols = {
    "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "*",
};

void check_adjacency(const Matrix &a) {
  if (a.rows() != a.cols())
    throw StructuralError("adjacency must be square, got "
                          + std::to_string(a.rows()) + "x"
                          + std::to_string(a.cols()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0.0)
      throw StructuralError("adjacency diagonal must be zero at node "
                            + std::to_string(i));
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (a(i, j) != a(j, i))
        throw StructuralError("adjacency is not symmetric at ("
                              + std::to_string(i) + ", " + std::to_string(j)
                              + ")");
      if (a(i, j) != 0.0 && a(i, j) != 1.0)
        throw StructuralError("adjacency entries must be 0 or 1");
    }
  }
}

}  // namespace

std::string_view element_symbol(Element e) {
  return kSymbols[static_cast<std::size_t>(e)];
}

Element element_from_symbol(std::string_view symbol) {
  if (symbol == "c") return Element::kC;
  if (symbol == "n") return Element::kN;
  if (symbol == "o") return Element::kO;
  if (symbol == "s") return Element::kS;
  if (symbol == "p") return Element::kP;
  if (symbol == "b") return Element::kB;
  for (int i = 0; i < kElementCount - 1; ++i)
    if (kSymbols[i] == symbol) return static_cast<Element>(i);
  return Element::kOther;
}

int ElementLabel::code() const {
  // charge in [-8, 7] keeps codes unique for anything a SMILES can express
  // in practice; larger charges are folded.
  int charge = formal_charge < -8 ? -8 : (formal_charge > 7 ? 7 : formal_charge);
  return (static_cast<int>(symbol) * 16 + (charge + 8)) * 2 + (aromatic ? 1 : 0);
}

std::string to_string(const ElementLabel &label) {
  std::string s(element_symbol(label.symbol));
  if (label.aromatic && s.size() == 1 && s != "*") s[0] = static_cast<char>(s[0] - 'A' + 'a');
  if (label.formal_charge != 0) {
    s += label.formal_charge > 0 ? '+' : '-';
    int mag = std::abs(label.formal_charge);
    if (mag > 1) s += std::to_string(mag);
  }
  return s;
}

Matrix normalize_adjacency(const Matrix &adjacency) {
  check_adjacency(adjacency);
  const Eigen::Index n = adjacency.rows();
  Matrix tilde = adjacency + Matrix::Identity(n, n);
  Vector inv_sqrt_deg(n);
  for (Eigen::Index i = 0; i < n; ++i)
    inv_sqrt_deg(i) = 1.0 / std::sqrt(tilde.row(i).sum());
  Matrix v(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      v(i, j) = inv_sqrt_deg(i) * tilde(i, j) * inv_sqrt_deg(j);
  return v;
}

AttributedGraph::AttributedGraph(Matrix node_features, Matrix adjacency,
                                 std::vector<ElementLabel> node_elements)
    : features_(std::move(node_features)), adjacency_(std::move(adjacency)),
      elements_(std::move(node_elements)) {
  propagation_ = normalize_adjacency(adjacency_);
  if (features_.rows() != adjacency_.rows())
    throw StructuralError("feature rows (" + std::to_string(features_.rows())
                          + ") differ from node count ("
                          + std::to_string(adjacency_.rows()) + ")");
  if (elements_.empty())
    elements_.assign(static_cast<std::size_t>(adjacency_.rows()),
                     ElementLabel{Element::kC, 0, false});
  if (static_cast<Eigen::Index>(elements_.size()) != adjacency_.rows())
    throw StructuralError("element label count differs from node count");
}

std::vector<int> AttributedGraph::neighbors(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n_nodes(); ++j)
    if (has_edge(i, j)) out.push_back(j);
  return out;
}

int AttributedGraph::degree(int i) const {
  return static_cast<int>(adjacency_.row(i).sum());
}

AttributedGraph AttributedGraph::with_features(Matrix node_features) const {
  if (node_features.rows() != features_.rows())
    throw StructuralError("replacement features have wrong row count");
  AttributedGraph out = *this;
  out.features_ = std::move(node_features);
  return out;
}

AttributedGraph AttributedGraph::permuted(const std::vector<int> &perm) const {
  const int n = n_nodes();
  if (static_cast<int>(perm.size()) != n)
    throw StructuralError("permutation length differs from node count");
  Matrix x(n, features_.cols());
  Matrix a(n, n);
  std::vector<ElementLabel> el(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x.row(i) = features_.row(perm[i]);
    el[i] = elements_[perm[i]];
    for (int j = 0; j < n; ++j) a(i, j) = adjacency_(perm[i], perm[j]);
  }
  return AttributedGraph(std::move(x), std::move(a), std::move(el));
}

std::vector<std::vector<int>> connected_components(
    const Matrix &adjacency, const std::vector<bool> &vertex_mask) {
  const int n = static_cast<int>(adjacency.rows());
  if (static_cast<int>(vertex_mask.size()) != n)
    throw StructuralError("mask length differs from node count");
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (!vertex_mask[s] || comp[s] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::queue<int> q;
    q.push(s);
    comp[s] = id;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      out.back().push_back(u);
      for (int v = 0; v < n; ++v) {
        if (adjacency(u, v) != 0.0 && vertex_mask[v] && comp[v] < 0) {
          comp[v] = id;
          q.push(v);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

std::vector<std::vector<int>> connected_components(
    const AttributedGraph &graph, const std::vector<bool> &vertex_mask) {
  return connected_components(graph.adjacency(), vertex_mask);
}

}  // namespace gcnx
