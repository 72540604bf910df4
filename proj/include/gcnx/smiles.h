//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_SMILES_H_
#define GCNX_SMILES_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gcnx/graph.h"

namespace gcnx {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

struct Bond {
  int i = 0;  // always i < j
  int j = 0;
  BondOrder order = BondOrder::kSingle;

  friend bool operator==(const Bond &, const Bond &) = default;
};

// Parsed molecule. `graph` carries topology and element labels but no
// features (zero columns) until featurize() is applied.
struct Molecule {
  AttributedGraph graph;
  std::vector<Bond> bonds;
  // Element symbol as written, e.g. "Na" for atoms mapped to Element::kOther.
  std::vector<std::string> atom_symbols;
  std::string source_string;

  int n_atoms() const { return graph.n_nodes(); }

  // Bond order between two atoms, or 0 when they are not bonded.
  int bond_order(int a, int b) const;
};

// Builds a Molecule from labels and a bond list. Bonds are normalized to
// i < j and sorted; duplicate bonds or self loops throw StructuralError.
Molecule make_molecule(std::vector<ElementLabel> atoms, std::vector<Bond> bonds,
                       std::string source = {},
                       std::vector<std::string> atom_symbols = {});

// Restricted SMILES: organic-subset atoms, bracket atoms with charges and
// hydrogen counts, bonds - = # :, branches, ring closures (digits and %nn),
// lowercase aromatic atoms and '.' separated fragments. Stereo marks
// (/ \ @) and isotope numbers are read and discarded. Hydrogens are never
// materialized. Throws ParseError carrying the offending byte offset.
Molecule parse_smiles(std::string_view smiles);

// Non-canonical SMILES text for a molecule; parse_smiles() of the result
// yields a graph isomorphic to the input (labels and bond orders kept).
std::string write_smiles(const Molecule &molecule);

struct FeaturizationScheme {
  std::vector<Element> element_vocab = {
      Element::kB,  Element::kC,  Element::kN, Element::kO,
      Element::kP,  Element::kS,  Element::kF, Element::kCl,
      Element::kBr, Element::kI,  Element::kOther,
  };
  int max_degree = 5;
  int min_charge = -2;
  int max_charge = 2;

  int degree_slots() const { return max_degree + 1; }
  int charge_slots() const { return max_charge - min_charge + 1; }
  int d_in() const {
    return static_cast<int>(element_vocab.size()) + degree_slots()
           + charge_slots() + 1;
  }

  friend bool operator==(const FeaturizationScheme &,
                         const FeaturizationScheme &) = default;
};

// Row n = [element one-hot | min(degree, max) one-hot | clamped charge
// one-hot | aromatic flag].
AttributedGraph featurize(const Molecule &molecule,
                          const FeaturizationScheme &scheme = {});

}  // namespace gcnx

#endif  // GCNX_SMILES_H_
