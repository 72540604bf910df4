//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_PIPELINE_H_
#define GCNX_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gcnx/datasets.h"
#include "gcnx/explain.h"
#include "gcnx/metrics.h"
#include "gcnx/miner.h"

namespace gcnx {

inline constexpr const char *kToolVersion = "gcnx 0.1.0";

// Bad flags, out-of-range thresholds, missing input files. Exit code 2.
class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct RunConfig {
  std::string subcommand;
  // CSV path, or "synth:n=<count>,motif=<smiles>[,seed=<seed>]".
  std::string data;
  std::string smiles_column = "smiles";
  std::string task_column = "label";
  std::string id_column;
  std::filesystem::path checkpoint;
  std::vector<Method> methods;
  double tau = 0.0;
  double fidelity_threshold = kDefaultSaliencyThreshold;
  int min_occurrence = 10;
  int top_k = 10;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
  bool render = false;
  std::vector<int> layers = TrainConfig::desk_scale_sizes();
  int epochs = 100;
  double lr = 0.001;
  bool class_weighting = true;
  bool stratified = true;
  // Which split explain / metrics / mine operate on: all, train, validation
  // or test.
  std::string split = "all";

  // Throws UsageError when a value is outside its documented range.
  void validate() const;

  // Canonical JSON of every field except out_dir.
  std::string to_json() const;
  // 16 hex digits of FNV-1a over to_json().
  std::string hash() const;
};

// Data source resolution shared by every subcommand.
LabeledSet load_data(const RunConfig &config);

// Partition used by train (train / validation / test), seeded by config.seed.
std::array<LabeledSet, 3> split_data(const LabeledSet &data, const RunConfig &config);

// The subset named by config.split.
LabeledSet select_split(const LabeledSet &data, const RunConfig &config);

struct TrainSummary {
  std::filesystem::path checkpoint;
  std::filesystem::path log;
  EvalMetrics train, validation, test;
  int best_epoch = 0;
};

struct ExplainSummary {
  std::filesystem::path heatmaps;
  int records = 0;
  std::vector<std::filesystem::path> renderings;
};

struct MetricsSummary {
  std::filesystem::path csv, json;
  std::vector<MetricReport> reports;
};

struct MineSummary {
  std::filesystem::path csv, json;
  MineReport report;
};

TrainSummary cmd_train(const RunConfig &config);
ExplainSummary cmd_explain(const RunConfig &config);
MetricsSummary cmd_metrics(const RunConfig &config);
MineSummary cmd_mine(const RunConfig &config);

// Parses argv (subcommand first) and runs it. Returns the process exit code:
// 0 success, 1 runtime failure, 2 usage or configuration error.
int run_cli(int argc, char **argv);

}  // namespace gcnx

#endif  // GCNX_PIPELINE_H_
