// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailor/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "tailor/error.hpp"

namespace tailor {

double SynthRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t SynthRng::below(std::uint64_t bound) {
  // Rejection keeps the result exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double SynthRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 == 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void SynthSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); };
  if (tasks.empty()) fail("synth spec has no tasks");
  const std::size_t dim = tasks.front().token_rank_profile.dim;
  for (const auto& t : tasks) {
    const auto& p = t.token_rank_profile;
    const std::string where = "task '" + t.name + "': ";
    if (t.n_clusters == 0 || t.samples_per_cluster == 0) fail(where + "empty task");
    if (!(t.cluster_spread >= 0.0)) fail(where + "cluster_spread must be >= 0");
    if (!(t.duplicate_fraction >= 0.0 && t.duplicate_fraction <= 1.0)) {
      fail(where + "duplicate_fraction outside [0, 1]");
    }
    if (!(t.outlier_fraction >= 0.0 && t.outlier_fraction < 1.0)) {
      fail(where + "outlier_fraction outside [0, 1)");
    }
    if (p.dim == 0 || p.dim != dim) fail(where + "every task needs the same positive dim");
    if (p.min_tokens == 0 || p.min_tokens > p.max_tokens) fail(where + "bad token range");
    if (p.min_rank == 0 || p.min_rank > p.max_rank) fail(where + "bad rank range");
    if (p.max_rank > std::min(p.min_tokens, p.dim)) {
      fail(where + "max_rank exceeds min(min_tokens, dim)");
    }
    if (t.rounds_distribution.empty()) fail(where + "empty rounds_distribution");
    double total = 0.0;
    for (double w : t.rounds_distribution) {
      if (!(w >= 0.0)) fail(where + "negative rounds weight");
      total += w;
    }
    if (!(total > 0.0)) fail(where + "rounds_distribution sums to zero");
    if (!(t.center_scale >= 0.0 && t.base_scale >= 0.0 && t.outlier_distance >= 0.0)) {
      fail(where + "negative scale");
    }
  }
}

namespace {

std::uint32_t draw_rounds(SynthRng& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t r = 0; r < weights.size(); ++r) {
    if (u < weights[r]) return static_cast<std::uint32_t>(r + 1);
    u -= weights[r];
  }
  return static_cast<std::uint32_t>(weights.size());
}

std::size_t draw_between(SynthRng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

// Token matrix whose last row is exactly `point` and whose rank is at most
// `rank`. Rank 1 uses power-of-two multiples of the point so the rows stay
// exactly collinear in float32.
FeatureMatrix token_matrix(SynthRng& rng, std::span<const float> point, std::size_t tokens,
                           std::size_t rank, double token_scale) {
  const std::size_t dim = point.size();
  FeatureMatrix m(tokens, dim);
  if (rank == 1) {
    for (std::size_t r = 0; r + 1 < tokens; ++r) {
      const int exponent = static_cast<int>(rng.below(5)) - 2;
      const float factor = std::ldexp(rng.below(2) == 0 ? 1.0f : -1.0f, exponent);
      for (std::size_t c = 0; c < dim; ++c) m(r, c) = point[c] * factor;
    }
  } else {
    std::vector<double> basis(rank * dim);
    for (std::size_t c = 0; c < dim; ++c) basis[c] = point[c];
    for (std::size_t k = dim; k < basis.size(); ++k) basis[k] = token_scale * rng.normal();
    std::vector<double> mix(rank);
    for (std::size_t r = 0; r + 1 < tokens; ++r) {
      for (double& x : mix) x = rng.normal();
      for (std::size_t c = 0; c < dim; ++c) {
        double v = 0.0;
        for (std::size_t k = 0; k < rank; ++k) v += mix[k] * basis[k * dim + c];
        m(r, c) = static_cast<float>(v);
      }
    }
  }
  std::copy(point.begin(), point.end(), m.row(tokens - 1).begin());
  return m;
}

}  // namespace

Dataset generate(const SynthSpec& spec, std::uint64_t seed, SynthLabels* labels) {
  spec.validate();
  SynthRng rng(seed);
  Dataset out;
  if (labels) *labels = {};
  SampleId next_id = 0;

  for (std::size_t t = 0; t < spec.tasks.size(); ++t) {
    const SynthTask& task = spec.tasks[t];
    const auto& profile = task.token_rank_profile;
    const std::size_t dim = profile.dim;
    out.tasks.push_back(task.name);

    std::vector<double> base(dim);
    for (double& v : base) v = task.base_scale * rng.normal();
    std::vector<std::vector<double>> centers(task.n_clusters, base);
    for (auto& c : centers) {
      for (double& v : c) v += task.center_scale * rng.normal();
    }

    const std::size_t n_normal = task.n_clusters * task.samples_per_cluster;
    const auto n_outlier = static_cast<std::size_t>(std::llround(
        task.outlier_fraction * static_cast<double>(n_normal) / (1.0 - task.outlier_fraction)));
    if (n_outlier > 0) {
      std::vector<double> mean(dim, 0.0);
      for (const auto& c : centers) {
        for (std::size_t k = 0; k < dim; ++k) mean[k] += c[k] / static_cast<double>(centers.size());
      }
      double gap = 0.0;
      std::size_t pairs = 0;
      for (std::size_t a = 0; a < centers.size(); ++a) {
        for (std::size_t b = a + 1; b < centers.size(); ++b) {
          double s = 0.0;
          for (std::size_t k = 0; k < dim; ++k) s += (centers[a][k] - centers[b][k]) * (centers[a][k] - centers[b][k]);
          gap += std::sqrt(s);
          ++pairs;
        }
      }
      // With one cluster, use the expected gap of two independent centers.
      gap = pairs > 0 ? gap / static_cast<double>(pairs)
                      : task.center_scale * std::sqrt(2.0 * static_cast<double>(dim));
      std::vector<double> direction(dim);
      double norm = 0.0;
      for (double& v : direction) {
        v = rng.normal();
        norm += v * v;
      }
      norm = std::sqrt(norm);
      for (std::size_t k = 0; k < dim; ++k) {
        mean[k] += task.outlier_distance * gap * direction[k] / norm;
      }
      centers.push_back(std::move(mean));
    }

    const std::size_t total = n_normal + n_outlier;
    std::vector<Sample> samples;
    std::vector<std::size_t> cluster(total);
    samples.reserve(total);
    std::vector<float> point(dim);
    for (std::size_t i = 0; i < total; ++i) {
      cluster[i] = i < n_normal ? i % task.n_clusters : task.n_clusters;
      const auto& center = centers[cluster[i]];
      for (std::size_t k = 0; k < dim; ++k) {
        point[k] = static_cast<float>(center[k] + task.cluster_spread * rng.normal());
      }
      const std::size_t tokens = draw_between(rng, profile.min_tokens, profile.max_tokens);
      const std::size_t rank =
          draw_between(rng, profile.min_rank, std::min(profile.max_rank, tokens));
      Sample s;
      s.task_id = static_cast<std::uint32_t>(t);
      s.rounds = draw_rounds(rng, task.rounds_distribution);
      s.features = token_matrix(rng, point, tokens, rank, profile.token_scale);
      samples.push_back(std::move(s));
    }

    // Redundancy: overwrite a random subset with copies of the remaining
    // samples, drawn with replacement.
    const auto n_dup =
        static_cast<std::size_t>(std::floor(task.duplicate_fraction * static_cast<double>(total)));
    std::vector<std::size_t> perm(total);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i < n_dup; ++i) {
      std::swap(perm[i], perm[i + rng.below(total - i)]);
    }
    std::vector<std::size_t> copy_of(total);
    std::iota(copy_of.begin(), copy_of.end(), 0);
    if (n_dup > 0 && n_dup < total) {
      for (std::size_t i = 0; i < n_dup; ++i) {
        const std::size_t source = perm[n_dup + rng.below(total - n_dup)];
        samples[perm[i]].features = samples[source].features;
        samples[perm[i]].rounds = samples[source].rounds;
        cluster[perm[i]] = cluster[source];
        copy_of[perm[i]] = source;
      }
    }

    const std::size_t offset = out.samples.size();
    for (std::size_t i = 0; i < total; ++i) {
      samples[i].id = next_id++;
      out.samples.push_back(std::move(samples[i]));
      if (labels) {
        labels->cluster.push_back(cluster[i]);
        labels->outlier.push_back(cluster[i] == task.n_clusters);
        labels->copy_of.push_back(offset + copy_of[i]);
      }
    }
  }
  return out;
}

}  // namespace tailor
