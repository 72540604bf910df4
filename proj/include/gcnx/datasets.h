//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_DATASETS_H_
#define GCNX_DATASETS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gcnx/model.h"
#include "gcnx/smiles.h"

namespace gcnx {

struct LabeledEntry {
  std::string id;
  Molecule molecule;
  int label = 0;
};

struct LabeledSet {
  std::vector<LabeledEntry> entries;
  std::string provenance;
  int skipped = 0;        // rows whose SMILES or label did not parse
  int dropped_blank = 0;  // rows with an empty label cell

  std::size_t size() const { return entries.size(); }
  int count_label(int label) const;
  std::vector<Molecule> molecules() const;
  std::vector<int> labels() const;
};

struct CsvOptions {
  std::string smiles_column = "smiles";
  std::string label_column = "label";
  // Empty: ids are "row-<n>" with n the 1-based data row number.
  std::string id_column;
};

// Reads a UTF-8 CSV with a header row. Unparseable rows are skipped with a
// warning and counted; rows with a blank label are dropped and counted.
// Throws DataError for a missing file, an empty file, missing columns or
// duplicate ids.
LabeledSet load_csv(const std::filesystem::path &path, const CsvOptions &options);

// Splits one CSV line, honoring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string &line);

struct SynthOptions {
  int min_atoms = 6;
  int max_atoms = 20;
  double ring_probability = 0.3;
  // Up to this many lone atoms of the motif's elements are attached to
  // carbons in every molecule, never bonded to each other.
  int max_decoys = 2;
};

// Balanced planted-motif corpus: random carbon skeletons, with the motif
// grafted onto a random carbon of every positive (label 1). The motif must
// parse and have at most 6 atoms.
LabeledSet synth_motif_set(int n, const std::string &motif, std::uint64_t seed,
                           const SynthOptions &options = {});

struct SplitSpec {
  std::array<double, 3> ratios = {0.8, 0.1, 0.1};
  std::uint64_t seed = 0;
  bool stratified = false;
};

// Seeded train / validation / test partition. Throws DataError for fewer
// than 10 entries or ratios that do not sum to 1.
std::array<LabeledSet, 3> split(const LabeledSet &set, const SplitSpec &spec);

std::vector<LabeledGraph> to_labeled_graphs(const LabeledSet &set,
                                            const FeaturizationScheme &scheme);

}  // namespace gcnx

#endif  // GCNX_DATASETS_H_
