// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tailor {

// n points of dimension d, row-major doubles.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t n, std::size_t dim) : n_(n), dim_(dim), data_(n * dim, 0.0) {}
  PointSet(std::size_t n, std::size_t dim, std::vector<double> data);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Dense symmetric n x n Euclidean distances with an exact zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

enum class WardVariant {
  // Delta = n_A n_B / (n_A + n_B) * |mu_A - mu_B|^2. Monotone, reducible.
  kClassical,
  // Same with the unsquared norm. Heights may decrease along the merge
  // sequence; merges are found by a greedy global-minimum search.
  kPaperLiteral,
};

// Cluster labels follow the usual linkage convention: leaves are 0..n-1 and
// the cluster created by merge i is n + i. left < right.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t n_leaves = 0;
  std::vector<Merge> merges;
};

struct ClusterSet {
  // Clusters are numbered by their smallest member index, so cluster 0
  // always holds point 0.
  std::vector<std::size_t> assignment;
  std::size_t count = 0;
  PointSet centroids;

  std::vector<std::vector<std::size_t>> members() const;
};

// Euclidean distances via the Gram identity D^2 = S_xx + S_yy - 2 S_xy with
// S = X X^T; negative radicands clamp to zero.
DistanceMatrix pairwise_distances(const PointSet& points, std::size_t threads = 1);

// Ward agglomeration. kClassical runs the nearest-neighbor chain on a
// Lance-Williams table; merges come out sorted by height.
Dendrogram ward_dendrogram(const PointSet& points, WardVariant variant = WardVariant::kClassical);

// Applies merges in order while height <= lambda * max height, stopping at
// the first merge above the threshold.
ClusterSet cut_dendrogram(const Dendrogram& dendrogram, const PointSet& points, double lambda);

ClusterSet cluster_task(const PointSet& points, double lambda,
                        WardVariant variant = WardVariant::kClassical);

}  // namespace tailor
