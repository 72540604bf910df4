//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_RENDER_H_
#define GCNX_RENDER_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gcnx/explain.h"
#include "gcnx/smiles.h"

namespace gcnx {

// Seeded force-directed 2-D embedding, bond length ~1.
std::vector<std::array<double, 2>> layout_molecule(const Molecule &molecule,
                                                   std::uint64_t seed);

// One panel per heatmap; each atom gets a blue disk whose intensity follows
// its value relative to the largest value across all panels.
std::string render_svg(const Molecule &molecule,
                       const std::vector<Heatmap> &panels,
                       const std::string &title, std::uint64_t seed);

std::string render_dot(const Molecule &molecule, const Heatmap &heatmap);

}  // namespace gcnx

#endif  // GCNX_RENDER_H_
