// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

std::vector<long double> gram_singular_values(const tailor::FeatureMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const bool row_gram = rows <= cols;
  const std::size_t n = row_gram ? rows : cols;
  const std::size_t inner = row_gram ? cols : rows;
  auto entry = [&](std::size_t i, std::size_t k) -> long double {
    return row_gram ? m(i, k) : m(k, i);
  };

  std::vector<long double> a(n * n, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      long double s = 0.0L;
      for (std::size_t k = 0; k < inner; ++k) s += entry(i, k) * entry(j, k);
      a[i * n + j] = s;
    }
  }
  auto at = [&](std::size_t i, std::size_t j) -> long double& { return a[i * n + j]; };

  long double frob = 0.0L;
  for (long double v : a) frob += v * v;
  frob = std::sqrt(frob);
  for (int sweep = 0; sweep < 100; ++sweep) {
    long double off = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) off += at(i, j) * at(i, j);
      }
    }
    if (std::sqrt(off) <= 1e-21L * frob || off == 0.0L) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const long double apq = at(p, q);
        if (apq == 0.0L) continue;
        const long double theta = (at(q, q) - at(p, p)) / (2.0L * apq);
        const long double t =
            (theta >= 0 ? 1.0L : -1.0L) / (std::fabs(theta) + std::sqrt(1.0L + theta * theta));
        const long double c = 1.0L / std::sqrt(1.0L + t * t);
        const long double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const long double akp = at(k, p);
          const long double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const long double apk = at(p, k);
          const long double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<long double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = std::sqrt(std::max(at(i, i), 0.0L));
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

long double entropy(const std::vector<long double>& sigma) {
  long double total = 0.0L;
  for (long double s : sigma) total += s;
  long double h = 0.0L;
  for (long double s : sigma) {
    if (s == 0.0L) continue;
    const long double q = s / total;
    h -= q * std::log(q);
  }
  return h;
}

long double largest_ratio(const std::vector<long double>& sigma) {
  long double total = 0.0L;
  long double top = 0.0L;
  for (long double s : sigma) {
    total += s;
    top = std::max(top, s);
  }
  return top / total;
}

namespace {

std::size_t rank_mod(const tailor::FeatureMatrix& m, std::uint64_t prime) {
  using u128 = unsigned __int128;
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::vector<std::uint64_t> a(rows * cols);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    const auto v = static_cast<std::int64_t>(m.data()[i]);
    a[i] = static_cast<std::uint64_t>((v % static_cast<std::int64_t>(prime) +
                                       static_cast<std::int64_t>(prime)) %
                                      static_cast<std::int64_t>(prime));
  }
  auto mulmod = [prime](std::uint64_t x, std::uint64_t y) {
    return static_cast<std::uint64_t>(static_cast<u128>(x) * y % prime);
  };
  auto powmod = [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mulmod(r, b);
      b = mulmod(b, b);
      e >>= 1;
    }
    return r;
  };
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot * cols + c] == 0) ++pivot;
    if (pivot == rows) continue;
    for (std::size_t k = 0; k < cols; ++k) std::swap(a[pivot * cols + k], a[rank * cols + k]);
    const std::uint64_t inv = powmod(a[rank * cols + c], prime - 2);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || a[r * cols + c] == 0) continue;
      const std::uint64_t f = mulmod(a[r * cols + c], inv);
      for (std::size_t k = 0; k < cols; ++k) {
        a[r * cols + k] = (a[r * cols + k] + prime - mulmod(f, a[rank * cols + k])) % prime;
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace

std::size_t integer_rank(const tailor::FeatureMatrix& m) {
  return std::max(rank_mod(m, 2305843009213693951ULL), rank_mod(m, 4611686018427387847ULL));
}

std::vector<Merge> naive_ward(const tailor::PointSet& points) {
  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  struct Cluster {
    std::size_t label;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back({i, {i}});

  auto centroid = [&](const Cluster& c) {
    std::vector<long double> mu(dim, 0.0L);
    for (std::size_t m : c.members) {
      for (std::size_t k = 0; k < dim; ++k) mu[k] += points[m][k];
    }
    for (auto& v : mu) v /= static_cast<long double>(c.members.size());
    return mu;
  };

  std::vector<Merge> merges;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::vector<std::vector<long double>> mu;
    for (const auto& c : active) mu.push_back(centroid(c));
    long double best = std::numeric_limits<long double>::infinity();
    std::size_t ba = 0;
    std::size_t bb = 0;
    std::pair<std::size_t, std::size_t> best_labels{SIZE_MAX, SIZE_MAX};
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        long double d2 = 0.0L;
        for (std::size_t k = 0; k < dim; ++k) d2 += (mu[a][k] - mu[b][k]) * (mu[a][k] - mu[b][k]);
        const long double na = active[a].members.size();
        const long double nb = active[b].members.size();
        const long double cost = na * nb / (na + nb) * d2;
        const std::pair<std::size_t, std::size_t> labels{
            std::min(active[a].label, active[b].label), std::max(active[a].label, active[b].label)};
        if (cost < best || (cost == best && labels < best_labels)) {
          best = cost;
          ba = a;
          bb = b;
          best_labels = labels;
        }
      }
    }
    merges.push_back({best_labels.first, best_labels.second, best});
    Cluster merged{n + step, active[ba].members};
    merged.members.insert(merged.members.end(), active[bb].members.begin(),
                          active[bb].members.end());
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bb));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(ba));
    active.push_back(std::move(merged));
  }
  return merges;
}

std::vector<double> direct_distances(const tailor::PointSet& points) {
  const std::size_t n = points.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < points.dim(); ++k) {
        const double diff = points[i][k] - points[j][k];
        s += diff * diff;
      }
      d[i * n + j] = std::sqrt(s);
    }
  }
  return d;
}

tailor::FeatureMatrix gaussian_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                      double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  tailor::FeatureMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = static_cast<float>(normal(rng));
  }
  return m;
}

tailor::FeatureMatrix integer_low_rank(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                       std::size_t rank) {
  std::uniform_int_distribution<int> small(-4, 4);
  std::vector<int> a(rows * rank);
  std::vector<int> b(rank * cols);
  for (int& v : a) v = small(rng);
  for (int& v : b) v = small(rng);
  tailor::FeatureMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      int s = 0;
      for (std::size_t k = 0; k < rank; ++k) s += a[r * rank + k] * b[k * cols + c];
      m(r, c) = static_cast<float>(s);
    }
  }
  return m;
}

tailor::PointSet gaussian_points(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                 double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  tailor::PointSet p(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : p[i]) v = normal(rng);
  }
  return p;
}

}  // namespace oracle
