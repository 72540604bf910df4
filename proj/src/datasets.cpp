//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/datasets.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>

#include "gcnx/error.h"
#include "gcnx/parallel.h"
#include "gcnx/random.h"

namespace gcnx {

int LabeledSet::count_label(int label) const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(),
                                        [&](const auto &e) { return e.label == label; }));
}

std::vector<Molecule> LabeledSet::molecules() const {
  std::vector<Molecule> out;
  for (const auto &e : entries) out.push_back(e.molecule);
  return out;
}

std::vector<int> LabeledSet::labels() const {
  std::vector<int> out;
  for (const auto &e : entries) out.push_back(e.label);
  return out;
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<int> parse_label(const std::string &text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) return std::nullopt;
    if (v == 0.0) return 0;
    if (v == 1.0) return 1;
  } catch (const std::exception &) {
  }
  return std::nullopt;
}

}  // namespace

LabeledSet load_csv(const std::filesystem::path &path, const CsvOptions &options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw DataError(path.string() + " is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_csv_line(line);
  auto column = [&](const std::string &name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (trim(header[i]) == name) return static_cast<int>(i);
    throw DataError(path.string() + " has no column '" + name + "'");
  };
  const int smiles_col = column(options.smiles_column);
  const int label_col = column(options.label_column);
  const int id_col = options.id_column.empty() ? -1 : column(options.id_column);

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw DataError(path.string() + " has no data rows");

  struct Parsed {
    std::optional<LabeledEntry> entry;
    bool blank = false;
    std::string warning;
  };
  std::vector<Parsed> parsed(rows.size());
  parallel_for(rows.size(), [&](std::size_t r) {
    const auto &row = rows[r];
    Parsed &p = parsed[r];
    const int needed = std::max({smiles_col, label_col, id_col});
    if (static_cast<int>(row.size()) <= needed) {
      p.warning = "too few fields";
      return;
    }
    const std::string label_text = trim(row[label_col]);
    if (label_text.empty()) {
      p.blank = true;
      return;
    }
    const auto label = parse_label(label_text);
    if (!label) {
      p.warning = "label '" + label_text + "' is not 0 or 1";
      return;
    }
    try {
      LabeledEntry e;
      e.molecule = parse_smiles(trim(row[smiles_col]));
      e.label = *label;
      e.id = id_col >= 0 ? trim(row[id_col]) : "row-" + std::to_string(r + 1);
      p.entry = std::move(e);
    } catch (const Error &err) {
      p.warning = err.what();
    }
  });

  LabeledSet set;
  set.provenance = path.string();
  std::set<std::string> ids;
  for (std::size_t r = 0; r < parsed.size(); ++r) {
    Parsed &p = parsed[r];
    if (p.blank) {
      ++set.dropped_blank;
    } else if (!p.entry) {
      ++set.skipped;
      std::cerr << "warning: " << path.string() << " data row " << r + 1
                << " skipped: " << p.warning << '\n';
    } else {
      if (!ids.insert(p.entry->id).second)
        throw DataError("duplicate molecule id '" + p.entry->id + "' in "
                        + path.string());
      set.entries.push_back(std::move(*p.entry));
    }
  }
  return set;
}

namespace {

// Random carbon tree with an optional 5- or 6-ring closure.
void grow_skeleton(Rng &rng, int n_atoms, double ring_probability,
                   std::vector<ElementLabel> &atoms, std::vector<Bond> &bonds,
                   std::vector<int> &degree) {
  atoms.assign(static_cast<std::size_t>(n_atoms), ElementLabel{Element::kC, 0, false});
  degree.assign(static_cast<std::size_t>(n_atoms), 0);
  std::vector<int> parent(static_cast<std::size_t>(n_atoms), -1);
  for (int i = 1; i < n_atoms; ++i) {
    std::vector<int> open;
    for (int j = 0; j < i; ++j)
      if (degree[j] < 3) open.push_back(j);
    const int p = open[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(open.size()) - 1))];
    parent[i] = p;
    bonds.push_back(Bond{p, i, BondOrder::kSingle});
    ++degree[p];
    ++degree[i];
  }
  if (!rng.bernoulli(ring_probability)) return;
  // Tree distances by walking to the root.
  auto path_to_root = [&](int v) {
    std::vector<int> path{v};
    while (parent[path.back()] >= 0) path.push_back(parent[path.back()]);
    return path;
  };
  auto distance = [&](int a, int b) {
    auto pa = path_to_root(a), pb = path_to_root(b);
    while (pa.size() > 1 && pb.size() > 1 && pa[pa.size() - 2] == pb[pb.size() - 2]) {
      pa.pop_back();
      pb.pop_back();
    }
    return static_cast<int>(pa.size() + pb.size()) - 2;
  };
  std::vector<std::pair<int, int>> candidates;
  for (int a = 0; a < n_atoms; ++a)
    for (int b = a + 1; b < n_atoms; ++b) {
      const int d = distance(a, b);
      if ((d == 4 || d == 5) && degree[a] < 3 && degree[b] < 3)
        candidates.emplace_back(a, b);
    }
  if (candidates.empty()) return;
  const auto [a, b] = candidates[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<long>(candidates.size()) - 1))];
  bonds.push_back(Bond{a, b, BondOrder::kSingle});
  ++degree[a];
  ++degree[b];
}

int pick_carbon(Rng &rng, const std::vector<ElementLabel> &atoms,
                const std::vector<int> &degree, int n_skeleton) {
  std::vector<int> open;
  for (int j = 0; j < n_skeleton; ++j)
    if (atoms[j].symbol == Element::kC && degree[j] < 4) open.push_back(j);
  if (open.empty()) return -1;
  return open[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(open.size()) - 1))];
}

}  // namespace

LabeledSet synth_motif_set(int n, const std::string &motif, std::uint64_t seed,
                           const SynthOptions &options) {
  if (n < 0) throw ConfigError("synthetic set size must be nonnegative");
  const Molecule motif_mol = parse_smiles(motif);
  if (motif_mol.n_atoms() > 6) throw ConfigError("motif must have at most 6 atoms");
  if (options.min_atoms < 2 || options.max_atoms < options.min_atoms)
    throw ConfigError("invalid skeleton size range");

  std::vector<ElementLabel> decoy_labels;
  for (const auto &l : motif_mol.graph.node_elements()) {
    ElementLabel plain{l.symbol, l.formal_charge, false};
    if (plain.symbol != Element::kC
        && std::find(decoy_labels.begin(), decoy_labels.end(), plain) == decoy_labels.end())
      decoy_labels.push_back(plain);
  }

  Rng rng(seed);
  LabeledSet set;
  set.provenance = "synth:n=" + std::to_string(n) + ",motif=" + motif
                   + ",seed=" + std::to_string(seed);
  char id[32];
  for (int i = 0; i < n; ++i) {
    const bool positive = i % 2 == 0;
    const int skeleton =
        static_cast<int>(rng.uniform_int(options.min_atoms, options.max_atoms));
    std::vector<ElementLabel> atoms;
    std::vector<Bond> bonds;
    std::vector<int> degree;
    grow_skeleton(rng, skeleton, options.ring_probability, atoms, bonds, degree);

    if (positive) {
      const int anchor = pick_carbon(rng, atoms, degree, skeleton);
      const int base = static_cast<int>(atoms.size());
      for (const auto &l : motif_mol.graph.node_elements()) {
        atoms.push_back(l);
        degree.push_back(0);
      }
      for (const Bond &b : motif_mol.bonds) {
        bonds.push_back(Bond{base + b.i, base + b.j, b.order});
        ++degree[base + b.i];
        ++degree[base + b.j];
      }
      bonds.push_back(Bond{anchor, base, BondOrder::kSingle});
      ++degree[anchor];
      ++degree[base];
    }
    if (!decoy_labels.empty() && options.max_decoys > 0) {
      const int decoys = static_cast<int>(rng.uniform_int(0, options.max_decoys));
      for (int d = 0; d < decoys; ++d) {
        const int anchor = pick_carbon(rng, atoms, degree, skeleton);
        if (anchor < 0) break;
        const ElementLabel &lab = decoy_labels[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<long>(decoy_labels.size()) - 1))];
        atoms.push_back(lab);
        degree.push_back(1);
        bonds.push_back(Bond{anchor, static_cast<int>(atoms.size()) - 1,
                             BondOrder::kSingle});
        ++degree[anchor];
      }
    }

    LabeledEntry e;
    e.molecule = make_molecule(std::move(atoms), std::move(bonds));
    e.molecule.source_string = write_smiles(e.molecule);
    e.label = positive ? 1 : 0;
    std::snprintf(id, sizeof id, "synth-%05d", i);
    e.id = id;
    set.entries.push_back(std::move(e));
  }
  return set;
}

std::array<LabeledSet, 3> split(const LabeledSet &set, const SplitSpec &spec) {
  if (set.size() < 10)
    throw DataError("split needs at least 10 entries, got "
                    + std::to_string(set.size()));
  const double total = spec.ratios[0] + spec.ratios[1] + spec.ratios[2];
  if (std::abs(total - 1.0) > 1e-9)
    throw DataError("split ratios must sum to 1");
  for (double r : spec.ratios)
    if (r < 0.0) throw DataError("split ratios must be nonnegative");

  Rng rng(spec.seed);
  std::array<std::vector<std::size_t>, 3> parts;
  auto assign = [&](std::vector<std::size_t> idx) {
    rng.shuffle(idx);
    const std::size_t n = idx.size();
    const auto n_train = static_cast<std::size_t>(std::llround(spec.ratios[0] * n));
    const auto n_val = std::min(
        n - n_train, static_cast<std::size_t>(std::llround(spec.ratios[1] * n)));
    for (std::size_t k = 0; k < n; ++k)
      parts[k < n_train ? 0 : (k < n_train + n_val ? 1 : 2)].push_back(idx[k]);
  };
  if (spec.stratified) {
    std::vector<int> labels;
    for (const auto &e : set.entries)
      if (std::find(labels.begin(), labels.end(), e.label) == labels.end())
        labels.push_back(e.label);
    std::sort(labels.begin(), labels.end());
    for (int l : labels) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < set.size(); ++i)
        if (set.entries[i].label == l) idx.push_back(i);
      assign(std::move(idx));
    }
    for (auto &p : parts) rng.shuffle(p);
  } else {
    std::vector<std::size_t> idx(set.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    assign(std::move(idx));
  }

  static constexpr std::array<const char *, 3> kNames = {"train", "validation", "test"};
  std::array<LabeledSet, 3> out;
  for (int s = 0; s < 3; ++s) {
    out[s].provenance = set.provenance + " [" + kNames[s] + "]";
    for (std::size_t i : parts[s]) out[s].entries.push_back(set.entries[i]);
  }
  return out;
}

std::vector<LabeledGraph> to_labeled_graphs(const LabeledSet &set,
                                            const FeaturizationScheme &scheme) {
  std::vector<LabeledGraph> out(set.size());
  parallel_for(set.size(), [&](std::size_t i) {
    out[i] = LabeledGraph{featurize(set.entries[i].molecule, scheme),
                          set.entries[i].label};
  });
  return out;
}

}  // namespace gcnx
