#pragma once

#include <optional>
#include <string>

#include "gpbold/types.hpp"

namespace gpbold {

/// Command-line overrides applied on top of the JSON config.
struct CliOverrides {
  std::optional<std::string> model;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
};

/// Write simulated datasets (y.csv, z.csv, truth.json per datasetplus a
/// shared paradigm.json) under the output directory.
void cmd_simulate(const std::string& config_path, const CliOverrides& overrides);

/// Fit the chosen model to every dataset (parcel) independently, in
/// parallel. Returns the number of failed parcels; failures are recorded
/// per parcel and do not block the others.
int cmd_fit(const std::string& config_path, const CliOverrides& overrides);

/// Summarize draws into t-maps / PPMs, and ROC curves when ground truth is
/// available.
void cmd_evaluate(const std::string& config_path, const CliOverrides& overrides);

/// Jobs resolution: CLI flag, then config, then GPBOLD_JOBS, then 1.
int resolve_jobs(const std::optional<int>& flag, const std::optional<int>& config_value);

}  // namespace gpbold
