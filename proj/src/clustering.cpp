// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailor/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>

#include "tailor/error.hpp"
#include "tailor/parallel.hpp"

namespace tailor {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void check_finite(const PointSet& points) {
  for (double v : points.data()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNonFinite, "point coordinate");
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

// Upper-triangular storage for a symmetric table without diagonal.
class CondensedTable {
 public:
  explicit CondensedTable(std::size_t n) : n_(n), values_(n * (n - 1) / 2) {}

  double& at(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return values_[i * n_ - i * (i + 1) / 2 + (j - i - 1)];
  }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

struct RawMerge {
  std::size_t a = 0;  // provisional labels: leaf index or n + discovery index
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

// Reorders NN-chain merges by height, never placing a merge before the
// merges that built its operands, and assigns final labels.
Dendrogram order_merges(std::size_t n, const std::vector<RawMerge>& raw) {
  const std::size_t m = raw.size();
  std::vector<std::size_t> pending(m, 0);
  std::vector<std::size_t> parent_of(m, kNone);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t child : {raw[i].a, raw[i].b}) {
      if (child >= n) {
        ++pending[i];
        parent_of[child - n] = i;
      }
    }
  }

  using Key = std::pair<double, std::size_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (std::size_t i = 0; i < m; ++i) {
    if (pending[i] == 0) ready.emplace(raw[i].height, i);
  }

  std::vector<std::size_t> final_label(m, kNone);
  Dendrogram out{n, {}};
  out.merges.reserve(m);
  while (!ready.empty()) {
    const std::size_t i = ready.top().second;
    ready.pop();
    auto relabel = [&](std::size_t id) { return id < n ? id : final_label[id - n]; };
    std::size_t left = relabel(raw[i].a);
    std::size_t right = relabel(raw[i].b);
    if (left > right) std::swap(left, right);
    final_label[i] = n + out.merges.size();
    out.merges.push_back({left, right, raw[i].height, raw[i].size});
    if (const std::size_t p = parent_of[i]; p != kNone && --pending[p] == 0) {
      ready.emplace(raw[p].height, p);
    }
  }
  return out;
}

Dendrogram nn_chain_ward(const PointSet& points) {
  const std::size_t n = points.size();
  CondensedTable delta(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      delta.at(i, j) = 0.5 * squared_distance(points[i], points[j]);
    }
  }

  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), 0);
  std::vector<std::size_t> chain;
  chain.reserve(n);
  std::vector<RawMerge> raw;
  raw.reserve(n - 1);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    if (chain.empty()) {
      std::size_t first = 0;
      while (size[first] == 0) ++first;
      chain.push_back(first);
    }

    std::size_t x = 0;
    std::size_t y = 0;
    double best = 0.0;
    while (true) {
      x = chain.back();
      const std::size_t prev = chain.size() > 1 ? chain[chain.size() - 2] : kNone;
      // Keep the previous chain element on ties so the chain cannot cycle.
      y = prev;
      best = prev == kNone ? std::numeric_limits<double>::infinity() : delta.at(x, prev);
      for (std::size_t c = 0; c < n; ++c) {
        if (c == x || size[c] == 0) continue;
        const double d = delta.at(x, c);
        if (d < best) {
          best = d;
          y = c;
        }
      }
      if (y == prev) break;
      chain.push_back(y);
    }
    chain.pop_back();
    chain.pop_back();

    const std::size_t keep = std::min(x, y);
    const std::size_t drop = std::max(x, y);
    const double nk = static_cast<double>(size[keep]);
    const double nd = static_cast<double>(size[drop]);
    for (std::size_t c = 0; c < n; ++c) {
      if (c == keep || c == drop || size[c] == 0) continue;
      const double nc = static_cast<double>(size[c]);
      const double updated =
          ((nk + nc) * delta.at(c, keep) + (nd + nc) * delta.at(c, drop) - nc * best) /
          (nk + nd + nc);
      delta.at(c, keep) = std::max(updated, 0.0);
    }
    raw.push_back({label[x], label[y], best, size[keep] + size[drop]});
    size[keep] += size[drop];
    size[drop] = 0;
    label[keep] = n + step;
  }
  return order_merges(n, raw);
}

// Greedy global-minimum agglomeration with cached nearest neighbors, for the
// unsquared criterion where the chain algorithm is not valid.
Dendrogram greedy_literal_ward(const PointSet& points) {
  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  PointSet centroid = points;
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), 0);

  auto cost = [&](std::size_t a, std::size_t b) {
    const double na = static_cast<double>(size[a]);
    const double nb = static_cast<double>(size[b]);
    return na * nb / (na + nb) * std::sqrt(squared_distance(centroid[a], centroid[b]));
  };
  std::vector<std::size_t> nn(n, kNone);
  std::vector<double> nn_cost(n, std::numeric_limits<double>::infinity());
  auto refresh = [&](std::size_t a) {
    nn[a] = kNone;
    nn_cost[a] = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a || size[b] == 0) continue;
      const double c = cost(a, b);
      if (c < nn_cost[a]) {
        nn_cost[a] = c;
        nn[a] = b;
      }
    }
  };
  for (std::size_t a = 0; a < n; ++a) refresh(a);

  Dendrogram out{n, {}};
  out.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = kNone;
    for (std::size_t c = 0; c < n; ++c) {
      if (size[c] == 0) continue;
      if (a == kNone || nn_cost[c] < nn_cost[a]) a = c;
    }
    const std::size_t b = nn[a];
    const double height = nn_cost[a];
    const std::size_t keep = std::min(a, b);
    const std::size_t drop = std::max(a, b);

    const double nk = static_cast<double>(size[keep]);
    const double nd = static_cast<double>(size[drop]);
    auto ck = centroid[keep];
    auto cd = centroid[drop];
    for (std::size_t k = 0; k < dim; ++k) ck[k] = (nk * ck[k] + nd * cd[k]) / (nk + nd);

    std::size_t left = label[keep];
    std::size_t right = label[drop];
    if (left > right) std::swap(left, right);
    out.merges.push_back({left, right, height, size[keep] + size[drop]});
    size[keep] += size[drop];
    size[drop] = 0;
    label[keep] = n + step;

    for (std::size_t c = 0; c < n; ++c) {
      if (size[c] == 0) continue;
      if (c == keep || nn[c] == keep || nn[c] == drop) {
        refresh(c);
        continue;
      }
      const double d = cost(c, keep);
      if (d < nn_cost[c] || (d == nn_cost[c] && keep < nn[c])) {
        nn_cost[c] = d;
        nn[c] = keep;
      }
    }
  }
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    return a;
  }

 private:
  std::vector<std::size_t> parent_;
};

ClusterSet build_cluster_set(const PointSet& points, std::span<const std::size_t> root) {
  const std::size_t n = points.size();
  ClusterSet out;
  out.assignment.assign(n, kNone);
  std::vector<std::size_t> cluster_of_root(n, kNone);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t& c = cluster_of_root[root[i]];
    if (c == kNone) c = out.count++;
    out.assignment[i] = c;
  }
  out.centroids = PointSet(out.count, points.dim());
  std::vector<std::size_t> counts(out.count, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = out.centroids[out.assignment[i]];
    const auto src = points[i];
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    ++counts[out.assignment[i]];
  }
  for (std::size_t c = 0; c < out.count; ++c) {
    for (double& v : out.centroids[c]) v /= static_cast<double>(counts[c]);
  }
  return out;
}

}  // namespace

PointSet::PointSet(std::size_t n, std::size_t dim, std::vector<double> data)
    : n_(n), dim_(dim), data_(std::move(data)) {
  if (data_.size() != n * dim) {
    throw Error(ErrorKind::kDimensionMismatch, "point payload length " +
                                                   std::to_string(data_.size()) + " != " +
                                                   std::to_string(n) + "x" + std::to_string(dim));
  }
}

std::vector<std::vector<std::size_t>> ClusterSet::members() const {
  std::vector<std::vector<std::size_t>> out(count);
  for (std::size_t i = 0; i < assignment.size(); ++i) out[assignment[i]].push_back(i);
  return out;
}

DistanceMatrix pairwise_distances(const PointSet& points, std::size_t threads) {
  if (points.size() == 0) throw Error(ErrorKind::kInvalidArgument, "no points");
  check_finite(points);
  const std::size_t n = points.size();
  std::vector<double> sq_norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : points[i]) s += v * v;
    sq_norm[i] = s;
  }
  DistanceMatrix out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto xi = points[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto xj = points[j];
      double gram = 0.0;
      for (std::size_t k = 0; k < xi.size(); ++k) gram += xi[k] * xj[k];
      const double radicand = sq_norm[i] + sq_norm[j] - 2.0 * gram;
      out(i, j) = std::sqrt(std::max(radicand, 0.0));
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out(j, i) = out(i, j);
  }
  return out;
}

Dendrogram ward_dendrogram(const PointSet& points, WardVariant variant) {
  if (points.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "ward_dendrogram needs at least 2 points");
  }
  check_finite(points);
  return variant == WardVariant::kClassical ? nn_chain_ward(points) : greedy_literal_ward(points);
}

ClusterSet cut_dendrogram(const Dendrogram& dendrogram, const PointSet& points, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "lambda must lie in (0, 1]");
  }
  const std::size_t n = dendrogram.n_leaves;
  if (points.size() != n || dendrogram.merges.size() + 1 != n) {
    throw Error(ErrorKind::kInvalidArgument, "dendrogram does not match the point set");
  }
  double max_height = 0.0;
  for (const Merge& m : dendrogram.merges) max_height = std::max(max_height, m.height);
  const double threshold = lambda * max_height;

  UnionFind uf(n);
  std::vector<std::size_t> leaf_of(2 * n - 1);
  std::iota(leaf_of.begin(), leaf_of.begin() + static_cast<std::ptrdiff_t>(n), 0);
  for (std::size_t i = 0; i < dendrogram.merges.size(); ++i) {
    const Merge& m = dendrogram.merges[i];
    if (m.height > threshold) break;
    leaf_of[n + i] = uf.unite(leaf_of[m.left], leaf_of[m.right]);
  }
  std::vector<std::size_t> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = uf.find(i);
  return build_cluster_set(points, root);
}

ClusterSet cluster_task(const PointSet& points, double lambda, WardVariant variant) {
  if (points.size() == 0) throw Error(ErrorKind::kInvalidArgument, "no points");
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "lambda must lie in (0, 1]");
  }
  if (points.size() == 1) {
    check_finite(points);
    const std::size_t root = 0;
    return build_cluster_set(points, std::span(&root, 1));
  }
  return cut_dendrogram(ward_dendrogram(points, variant), points, lambda);
}

}  // namespace tailor
