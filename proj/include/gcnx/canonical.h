//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_CANONICAL_H_
#define GCNX_CANONICAL_H_

#include <string>
#include <vector>

#include "gcnx/error.h"
#include "gcnx/graph.h"
#include "gcnx/smiles.h"

namespace gcnx {

// Node- and edge-labeled undirected graph. bond(i, j) is the bond order or 0.
class SubstructureGraph {
 public:
  SubstructureGraph() = default;
  SubstructureGraph(std::vector<ElementLabel> labels,
                    const std::vector<Bond> &bonds);

  static SubstructureGraph from_molecule(const Molecule &molecule);
  // Subgraph induced by `vertices` (in the given order).
  static SubstructureGraph induced(const Molecule &molecule,
                                   const std::vector<int> &vertices);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<ElementLabel> &labels() const { return labels_; }
  int bond(int i, int j) const { return bonds_[i * size() + j]; }
  const std::vector<int> &neighbors(int i) const { return adj_[i]; }
  int degree(int i) const { return static_cast<int>(adj_[i].size()); }
  std::vector<Bond> bond_list() const;
  bool connected() const;

  // Node i of the result is node perm[i] of this graph.
  SubstructureGraph permuted(const std::vector<int> &perm) const;

  Molecule to_molecule() const;

 private:
  std::vector<ElementLabel> labels_;
  std::vector<int> bonds_;  // row-major size x size
  std::vector<std::vector<int>> adj_;
};

class CanonicalizationError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kMaxCanonicalNodes = 64;

struct CanonicalForm {
  std::string key;
  // order[p] = original vertex placed at canonical position p.
  std::vector<int> order;
};

// Color refinement followed by an exhaustive individualization search; the
// key is the lexicographically smallest certificate over all leaves. Equal
// keys iff the graphs are isomorphic respecting labels and bond orders.
// Throws CanonicalizationError beyond kMaxCanonicalNodes nodes or when the
// search exceeds its node budget.
CanonicalForm canonical_form(const SubstructureGraph &graph);

inline std::string canonical_key(const SubstructureGraph &graph) {
  return canonical_form(graph).key;
}

// True when `pattern` maps injectively into `target` preserving node labels
// and bond orders on every pattern edge (non-induced containment).
bool contains_subgraph(const SubstructureGraph &target,
                       const SubstructureGraph &pattern);

}  // namespace gcnx

#endif  // GCNX_CANONICAL_H_
