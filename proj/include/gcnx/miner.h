//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_MINER_H_
#define GCNX_MINER_H_

#include <optional>
#include <string>
#include <vector>

#include "gcnx/canonical.h"
#include "gcnx/explain.h"
#include "gcnx/smiles.h"

namespace gcnx {

struct CanonicalSubgraph {
  std::string key;
  int node_count = 0;
  std::vector<std::string> elements;  // sorted multiset
  std::string rendering;              // SMILES in canonical atom order
  SubstructureGraph graph;
};

// Canonicalizes a connected labeled graph.
CanonicalSubgraph make_canonical_subgraph(const SubstructureGraph &graph);

// Connected components of the atoms whose value exceeds tau; components
// of a single atom are dropped. Components over the canonicalization cap
// are skipped with a warning on stderr.
std::vector<CanonicalSubgraph> activated_subgraphs(const Molecule &molecule,
                                                   const Heatmap &heatmap,
                                                   double tau = 0.0,
                                                   int *skipped = nullptr);

struct OccurrenceCounts {
  int n_pos = 0;
  int n_neg = 0;
};

// Number of positive / negative molecules containing the substructure; a
// molecule counts at most once.
OccurrenceCounts count_dataset_occurrences(const CanonicalSubgraph &s,
                                           const std::vector<Molecule> &molecules,
                                           const std::vector<int> &labels);

struct SubstructureRecord {
  CanonicalSubgraph subgraph;
  int n_explained = 0;
  int n_pos = 0;
  int n_neg = 0;
  double r_e = 0.0;
  double r_p = 0.0;
};

struct MineOptions {
  double tau = 0.0;
  int min_occurrence = 10;  // keep only N_p + N_n > min_occurrence
  int top_k = 10;
  bool true_positives_only = true;
  int positive_class = 1;
};

struct MineReport {
  std::vector<SubstructureRecord> records;
  int qualifying_molecules = 0;
  int candidate_substructures = 0;
  int skipped_components = 0;

  std::optional<double> average_r_p() const;
};

// heatmaps[i] is the (normalized) positive-class map for molecules[i].
// predictions may be empty when true_positives_only is false.
MineReport mine(const std::vector<Molecule> &molecules,
                const std::vector<int> &labels,
                const std::vector<int> &predictions,
                const std::vector<Heatmap> &heatmaps,
                const MineOptions &options = {});

}  // namespace gcnx

#endif  // GCNX_MINER_H_
