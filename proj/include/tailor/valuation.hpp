// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tailor/clustering.hpp"

namespace tailor {

enum class UniquenessAggregation {
  // The weighted distance sum as is. The weights already sum to one, so this
  // is a weighted mean distance and does not grow with cluster size.
  kSum,
  // Additionally divided by |C| - 1. Scales like 1/|C|, which favors members
  // of small clusters.
  kMean,
};

// Raw per-sample values, aligned with dataset order, before normalization.
struct ClusterValues {
  std::vector<double> v_inf;
  std::vector<double> v_uni;
  std::vector<double> v_rep;
};

struct NormalizedValues {
  std::vector<double> v_inf;
  std::vector<double> v_uni;
  std::vector<double> v_rep;
};

// Informativeness share of each member within its cluster. Falls back to
// 1/|C| when every member has zero informativeness.
std::vector<double> informative_weights(std::span<const std::size_t> members,
                                        std::span<const double> inf_values);

// Informativeness-weighted distance of each member to the rest of its
// cluster. `members` indexes both `distances` and `inf_values`; the result is
// aligned with `members`.
std::vector<double> unique_values(std::span<const std::size_t> members,
                                  const DistanceMatrix& distances,
                                  std::span<const double> inf_values,
                                  UniquenessAggregation aggregation = UniquenessAggregation::kSum);

// tau_c = mean over other clusters k of exp(cos(mu_k, mu_c)); 1 when K = 1.
std::vector<double> representative_coefficients(const ClusterSet& clusters);

// tau times each member's informativeness share; aligned with `members`.
std::vector<double> representative_values(std::span<const std::size_t> members, double tau,
                                          std::span<const double> inf_values);

// Min-max scaling into [0, 1]; a constant array maps to 0.5 everywhere.
std::vector<double> min_max_normalize(std::span<const double> values);

// Scales each of the three arrays independently within each task.
// task_of[i] is the task of sample i.
NormalizedValues normalize_per_task(const ClusterValues& raw, std::span<const std::size_t> task_of);

}  // namespace tailor
