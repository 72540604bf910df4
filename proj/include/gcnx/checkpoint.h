//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_CHECKPOINT_H_
#define GCNX_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "gcnx/model.h"
#include "gcnx/smiles.h"

namespace gcnx {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  ModelParams params;
  FeaturizationScheme scheme;
  TrainConfig config;
  // Echo of the run that produced the checkpoint.
  std::string tool_version;
  std::string config_hash;
};

// Versioned JSON with row-major weight arrays. Doubles are written in
// shortest round-trip form, so serialize(parse(serialize(c))) is
// byte-identical to serialize(c).
std::string serialize_checkpoint(const Checkpoint &checkpoint);
Checkpoint parse_checkpoint(const std::string &text);

void save_checkpoint(const Checkpoint &checkpoint,
                     const std::filesystem::path &path);
Checkpoint load_checkpoint(const std::filesystem::path &path);

}  // namespace gcnx

#endif  // GCNX_CHECKPOINT_H_
