//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/miner.h"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>

#include "gcnx/parallel.h"

namespace gcnx {

CanonicalSubgraph make_canonical_subgraph(const SubstructureGraph &graph) {
  const CanonicalForm form = canonical_form(graph);
  CanonicalSubgraph s;
  s.key = form.key;
  s.node_count = graph.size();
  s.graph = graph.permuted(form.order);
  for (const auto &l : s.graph.labels()) s.elements.push_back(to_string(l));
  std::sort(s.elements.begin(), s.elements.end());
  s.rendering = write_smiles(s.graph.to_molecule());
  return s;
}

std::vector<CanonicalSubgraph> activated_subgraphs(const Molecule &molecule,
                                                   const Heatmap &heatmap,
                                                   double tau, int *skipped) {
  if (static_cast<int>(heatmap.values.size()) != molecule.n_atoms())
    throw ConfigError("heatmap length differs from atom count");
  std::vector<bool> mask(heatmap.values.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = heatmap.values[i] > tau;
  std::vector<CanonicalSubgraph> out;
  for (const auto &comp : connected_components(molecule.graph, mask)) {
    if (comp.size() < 2) continue;
    try {
      out.push_back(make_canonical_subgraph(SubstructureGraph::induced(molecule, comp)));
    } catch (const CanonicalizationError &e) {
      if (skipped) ++*skipped;
      std::cerr << "warning: skipping component of " << comp.size()
                << " atoms: " << e.what() << '\n';
    }
  }
  return out;
}

OccurrenceCounts count_dataset_occurrences(const CanonicalSubgraph &s,
                                           const std::vector<Molecule> &molecules,
                                           const std::vector<int> &labels) {
  OccurrenceCounts c;
  for (std::size_t i = 0; i < molecules.size(); ++i) {
    if (!contains_subgraph(SubstructureGraph::from_molecule(molecules[i]), s.graph))
      continue;
    (labels[i] == 1 ? c.n_pos : c.n_neg) += 1;
  }
  return c;
}

std::optional<double> MineReport::average_r_p() const {
  if (records.empty()) return std::nullopt;
  double s = 0.0;
  for (const auto &r : records) s += r.r_p;
  return s / records.size();
}

MineReport mine(const std::vector<Molecule> &molecules,
                const std::vector<int> &labels,
                const std::vector<int> &predictions,
                const std::vector<Heatmap> &heatmaps,
                const MineOptions &options) {
  if (labels.size() != molecules.size() || heatmaps.size() != molecules.size())
    throw ConfigError("molecules, labels and heatmaps must align");
  if (options.true_positives_only && predictions.size() != molecules.size())
    throw ConfigError("true-positive filtering needs one prediction per molecule");
  if (options.tau < 0.0 || options.tau > 1.0)
    throw ConfigError("tau must lie in [0, 1]");

  MineReport report;
  std::vector<char> qualifies(molecules.size(), 0);
  for (std::size_t i = 0; i < molecules.size(); ++i) {
    qualifies[i] = !options.true_positives_only
                   || (labels[i] == options.positive_class
                       && predictions[i] == options.positive_class);
    report.qualifying_molecules += qualifies[i];
  }

  // Extraction per molecule, merged in index order.
  std::vector<std::vector<CanonicalSubgraph>> found(molecules.size());
  std::vector<int> skipped(molecules.size(), 0);
  parallel_for(molecules.size(), [&](std::size_t i) {
    if (qualifies[i])
      found[i] = activated_subgraphs(molecules[i], heatmaps[i], options.tau,
                                     &skipped[i]);
  });
  for (int s : skipped) report.skipped_components += s;

  std::map<std::string, SubstructureRecord> by_key;
  for (auto &subs : found) {
    std::set<std::string> seen;
    for (auto &s : subs) {
      if (!seen.insert(s.key).second) continue;
      auto it = by_key.find(s.key);
      if (it == by_key.end()) {
        SubstructureRecord r;
        r.subgraph = std::move(s);
        it = by_key.emplace(r.subgraph.key, std::move(r)).first;
      }
      ++it->second.n_explained;
    }
  }
  report.candidate_substructures = static_cast<int>(by_key.size());

  std::vector<SubstructureRecord> records;
  for (auto &[key, r] : by_key) records.push_back(std::move(r));

  const std::vector<SubstructureGraph> targets = [&] {
    std::vector<SubstructureGraph> t;
    for (const auto &m : molecules) t.push_back(SubstructureGraph::from_molecule(m));
    return t;
  }();
  parallel_for(records.size(), [&](std::size_t k) {
    SubstructureRecord &r = records[k];
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (!contains_subgraph(targets[i], r.subgraph.graph)) continue;
      (labels[i] == options.positive_class ? r.n_pos : r.n_neg) += 1;
    }
    const int total = r.n_pos + r.n_neg;
    r.r_e = total > 0 ? static_cast<double>(r.n_explained) / total : 0.0;
    r.r_p = total > 0 ? static_cast<double>(r.n_pos) / total : 0.0;
  });

  std::vector<SubstructureRecord> kept;
  for (auto &r : records)
    if (r.n_pos + r.n_neg > options.min_occurrence) kept.push_back(std::move(r));
  std::sort(kept.begin(), kept.end(),
            [](const SubstructureRecord &a, const SubstructureRecord &b) {
              if (a.r_e != b.r_e) return a.r_e > b.r_e;
              if (a.r_p != b.r_p) return a.r_p > b.r_p;
              if (a.subgraph.node_count != b.subgraph.node_count)
                return a.subgraph.node_count > b.subgraph.node_count;
              return a.subgraph.key < b.subgraph.key;
            });
  if (static_cast<int>(kept.size()) > options.top_k)
    kept.resize(static_cast<std::size_t>(std::max(0, options.top_k)));
  report.records = std::move(kept);
  return report;
}

}  // namespace gcnx
