// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailor/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tailor/error.hpp"

namespace tailor {
namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

void check_index(std::size_t index, std::size_t bound, const char* what) {
  if (index >= bound) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " index " +
                                                 std::to_string(index) + " out of range " +
                                                 std::to_string(bound));
  }
}

}  // namespace

std::vector<double> informative_weights(std::span<const std::size_t> members,
                                        std::span<const double> inf_values) {
  double total = 0.0;
  for (std::size_t m : members) {
    check_index(m, inf_values.size(), "member");
    total += inf_values[m];
  }
  std::vector<double> w(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    w[i] = total > 0.0 ? inf_values[members[i]] / total
                       : 1.0 / static_cast<double>(members.size());
  }
  return w;
}

std::vector<double> unique_values(std::span<const std::size_t> members,
                                  const DistanceMatrix& distances,
                                  std::span<const double> inf_values,
                                  UniquenessAggregation aggregation) {
  for (std::size_t m : members) check_index(m, distances.size(), "member");
  const auto w = informative_weights(members, inf_values);
  const double divisor = aggregation == UniquenessAggregation::kMean
                             ? static_cast<double>(std::max<std::size_t>(members.size(), 2) - 1)
                             : 1.0;
  std::vector<double> out(members.size(), 0.0);
  for (std::size_t i = 0; i < members.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (j == i) continue;
      s += distances(members[j], members[i]) * w[j];
    }
    out[i] = s / divisor;
  }
  return out;
}

std::vector<double> representative_coefficients(const ClusterSet& clusters) {
  const std::size_t k = clusters.count;
  if (k == 0) throw Error(ErrorKind::kInvalidArgument, "cluster set is empty");
  std::vector<double> tau(k, 1.0);
  if (k == 1) return tau;
  for (std::size_t c = 0; c < k; ++c) {
    double s = 0.0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      s += std::exp(cosine(clusters.centroids[o], clusters.centroids[c]));
    }
    tau[c] = s / static_cast<double>(k - 1);
  }
  return tau;
}

std::vector<double> representative_values(std::span<const std::size_t> members, double tau,
                                          std::span<const double> inf_values) {
  if (!(tau > 0.0)) throw Error(ErrorKind::kInvalidArgument, "tau must be positive");
  auto w = informative_weights(members, inf_values);
  for (double& v : w) v *= tau;
  return w;
}

std::vector<double> min_max_normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.5);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double low = *lo;
  const double range = *hi - low;
  if (range == 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::clamp((values[i] - low) / range, 0.0, 1.0);
  }
  return out;
}

NormalizedValues normalize_per_task(const ClusterValues& raw, std::span<const std::size_t> task_of) {
  const std::size_t n = task_of.size();
  if (raw.v_inf.size() != n || raw.v_uni.size() != n || raw.v_rep.size() != n) {
    throw Error(ErrorKind::kInvalidArgument, "value arrays not aligned with task labels");
  }
  std::size_t n_tasks = 0;
  for (std::size_t t : task_of) n_tasks = std::max(n_tasks, t + 1);
  std::vector<std::vector<std::size_t>> by_task(n_tasks);
  for (std::size_t i = 0; i < n; ++i) by_task[task_of[i]].push_back(i);

  NormalizedValues out{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  auto scale = [&](const std::vector<double>& src, std::vector<double>& dst,
                   const std::vector<std::size_t>& idx) {
    std::vector<double> local(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) local[i] = src[idx[i]];
    const auto scaled = min_max_normalize(local);
    for (std::size_t i = 0; i < idx.size(); ++i) dst[idx[i]] = scaled[i];
  };
  for (const auto& idx : by_task) {
    scale(raw.v_inf, out.v_inf, idx);
    scale(raw.v_uni, out.v_uni, idx);
    scale(raw.v_rep, out.v_rep, idx);
  }
  return out;
}

}  // namespace tailor
