// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "omnivq/dataset_io.hpp"
#include "omnivq/pooling.hpp"
#include "omnivq/regression.hpp"

namespace omnivq {

// Everything a run can be configured with. Loaded from the JSON file given
// by --config; command-line flags override individual values.
struct RunConfig {
  FeatureConfig features;
  PoolingConfig pooling;
  ModelKind kind = ModelKind::kRfr;
  std::uint64_t seed = 0;
  bool tune = true;  // false: train with `hyperparams` as given
  int tune_repeats = 5;
  double tune_fraction = 0.2;
  Hyperparams hyperparams;
  int cv_repeats = 1000;
  double cv_fraction = 0.2;
  int jobs = 0;  // 0 = hardware concurrency
};

// Unknown keys are rejected with parse-error.
RunConfig run_config_from_json(std::string_view text);
std::string run_config_to_json(const RunConfig& cfg);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsageError = 2;

// Runs `omnivq <args...>` (args excludes the program name). Failures print
// one line "error: <kind>: <message>" to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace omnivq
