// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tailor/clustering.hpp"
#include "tailor/dataset.hpp"
#include "tailor/valuation.hpp"

namespace tailor {

struct SelectionConfig {
  double k = 0.075;
  double lambda = 0.1;
  WardVariant ward_variant = WardVariant::kClassical;
  UniquenessAggregation uniqueness_aggregation = UniquenessAggregation::kSum;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 0;

  // Throws kInvalidArgument when k or lambda is outside (0, 1].
  void validate() const;
};

struct ScoredSample {
  SampleId id = 0;
  std::uint32_t task_id = 0;
  std::uint32_t rounds = 1;
  std::size_t cluster_id = 0;  // within the sample's task
  double v_inf_raw = 0.0;
  double v_inf = 0.0;  // normalized within the task
  double v_uni = 0.0;
  double v_rep = 0.0;
  double v_synergy = 0.0;
};

struct TaskBudget {
  std::size_t task = 0;
  double difficulty = 0.0;  // x_p
  std::size_t size = 0;     // |S_p|
  double share = 0.0;       // k_p, a fraction of the whole dataset
  std::size_t count = 0;
};

struct TaskPlan {
  double k = 0.0;
  std::vector<TaskBudget> tasks;

  std::size_t total_count() const noexcept;
};

// Per-task clustering state kept for evaluation.
struct TaskScores {
  std::vector<std::size_t> samples;  // dataset positions, in dataset order
  ClusterSet clusters;               // indexed by position within `samples`
  std::vector<double> tau;
};

struct Scoring {
  std::vector<ScoredSample> samples;  // dataset order
  std::vector<TaskScores> tasks;
  std::vector<double> difficulty;
};

struct PrincipleMetrics {
  double mean_informativeness = 0.0;
  double uniqueness_proxy = 0.0;
  double representativeness_proxy = 0.0;
  double cluster_coverage = 0.0;
  std::size_t subset_size = 0;
};

struct SelectionResult {
  SelectionConfig config;
  TaskPlan plan;
  std::vector<ScoredSample> scored;
  std::vector<SampleId> selected;  // ascending
};

// V = r/(r+2) * inf + 1/(r+2) * (uni + rep).
double synergistic_value(double v_inf, double v_uni, double v_rep, std::uint32_t rounds);

// Per-task budgets: share_p = x_p^2 |S_p| / sum_q x_q^2 |S_q| * k. Integer
// counts sum to round(k * |S|); tasks whose quota exceeds their size are
// capped and the surplus goes to the rest in proportion to their shares.
TaskPlan task_proportions(std::span<const double> difficulties, std::span<const std::size_t> sizes,
                          double k);

// Spectra, clustering, valuation, normalization and synergy for every sample.
Scoring score(const Dataset& dataset, const SelectionConfig& config);

SelectionResult select(const Dataset& dataset, const SelectionConfig& config);
SelectionResult select(const Dataset& dataset, const Scoring& scoring,
                       const SelectionConfig& config);

// cluster_sets[t] is indexed by position among task t's samples in dataset
// order.
PrincipleMetrics evaluate_subset(const Dataset& dataset, std::span<const SampleId> subset,
                                 std::span<const ClusterSet> cluster_sets);
PrincipleMetrics evaluate_subset(const Dataset& dataset, const Scoring& scoring,
                                 std::span<const SampleId> subset);

}  // namespace tailor
