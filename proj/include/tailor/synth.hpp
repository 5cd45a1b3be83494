// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tailor/dataset.hpp"

namespace tailor {

struct TokenRankProfile {
  std::size_t min_tokens = 8;
  std::size_t max_tokens = 16;
  std::size_t dim = 32;
  std::size_t min_rank = 1;
  std::size_t max_rank = 8;
  double token_scale = 1.0;
};

struct SynthTask {
  std::string name;
  std::size_t n_clusters = 4;
  std::size_t samples_per_cluster = 50;
  double cluster_spread = 0.5;
  double duplicate_fraction = 0.0;
  double outlier_fraction = 0.0;
  TokenRankProfile token_rank_profile;
  // Weight of r = 1, 2, ... conversation rounds.
  std::vector<double> rounds_distribution = {1.0};
  double center_scale = 1.0;      // spread of cluster centers around the task base
  double base_scale = 1.0;        // size of the component shared by all centers
  double outlier_distance = 10.0;  // in units of the mean inter-centroid distance
};

struct SynthSpec {
  std::vector<SynthTask> tasks;

  // Throws kInvalidArgument on out-of-range fields.
  void validate() const;
};

// Ground truth recorded while generating, for tests and experiments.
struct SynthLabels {
  // Cluster index within the task; n_clusters marks the outlier cluster.
  std::vector<std::size_t> cluster;
  std::vector<bool> outlier;
  // Position of the sample this one copies, or the sample's own position.
  std::vector<std::size_t> copy_of;
};

// Pinned PRNG: std::mt19937_64 (its output sequence is fixed by the C++
// standard) with uniform and normal variates derived here rather than by the
// implementation-defined std distributions.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                                // [0, 1), 53 random bits
  std::uint64_t below(std::uint64_t bound);        // uniform in [0, bound)
  double normal();                                 // Box-Muller
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Dataset generate(const SynthSpec& spec, std::uint64_t seed, SynthLabels* labels = nullptr);

}  // namespace tailor
