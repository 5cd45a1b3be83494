// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailor/dataset.hpp"
#include "tailor/selection.hpp"
#include "tailor/synth.hpp"

namespace tailor::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitBadConfig = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Values given on the command line; each one overrides the config file.
struct Overrides {
  std::optional<double> k;
  std::optional<double> lambda;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
};

// Parses a JSON config ({k, lambda, ward_variant, uniqueness_aggregation,
// threads, seed}); unknown keys and out-of-range values raise ConfigError.
SelectionConfig parse_config(const std::string& json_text);
SelectionConfig resolve_config(const std::optional<fs::path>& config_path, const Overrides& overrides);

SynthSpec parse_synth_spec(const std::string& json_text);

std::string scores_csv(const Scoring& scoring, const Dataset& dataset,
                       const std::vector<SampleId>* selected);
std::string selection_json(const SelectionResult& result, const Dataset& dataset,
                           const std::optional<PrincipleMetrics>& metrics);
std::string metrics_json(const PrincipleMetrics& metrics);
std::vector<SampleId> parse_subset(const std::string& text);

int cmd_select(const fs::path& container, const SelectionConfig& config, const fs::path& out_dir);
int cmd_score(const fs::path& container, const SelectionConfig& config, const fs::path& out_path);
int cmd_synth(const fs::path& spec_path, std::uint64_t seed, const fs::path& out_path);
int cmd_evaluate(const fs::path& container, const fs::path& subset_path,
                 const SelectionConfig& config, const fs::path& out_path);

// Full command-line entry point.
int run(int argc, char** argv);

}  // namespace tailor::cli
