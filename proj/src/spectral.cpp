// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailor/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tailor/error.hpp"

namespace tailor {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSweeps = 80;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Hestenes one-sided Jacobi: rotates the `count` vectors (each of length
// `len`, stored contiguously) until they are mutually orthogonal. Their norms
// are then the singular values.
std::vector<double> orthogonalize(std::vector<double>& w, std::size_t count, std::size_t len) {
  std::vector<double> norms2(count);
  auto vec = [&](std::size_t i) { return std::span<double>(w.data() + i * len, len); };
  for (std::size_t i = 0; i < count; ++i) norms2[i] = dot(vec(i), vec(i));

  const double tol = kEps * static_cast<double>(len);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) {
        const double alpha = norms2[i];
        const double beta = norms2[j];
        if (alpha == 0.0 || beta == 0.0) continue;
        auto wi = vec(i);
        auto wj = vec(j);
        const double gamma = dot(wi, wj);
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < len; ++k) {
          const double a = wi[k];
          const double b = wj[k];
          wi[k] = c * a - s * b;
          wj[k] = s * a + c * b;
        }
        // Recompute rather than update: keeps tiny norms accurate.
        norms2[i] = dot(wi, wi);
        norms2[j] = dot(wj, wj);
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sigma(count);
  for (std::size_t i = 0; i < count; ++i) sigma[i] = std::sqrt(norms2[i]);
  return sigma;
}

}  // namespace

bool is_zero(const SingularSpectrum& spectrum) noexcept {
  return std::all_of(spectrum.values.begin(), spectrum.values.end(),
                     [](double v) { return v == 0.0; });
}

SingularSpectrum singular_values(const FeatureMatrix& matrix) {
  const std::size_t rows = matrix.rows();
  const std::size_t cols = matrix.cols();
  for (float v : matrix.data()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNonFinite, "feature matrix entry");
  }

  // Orthogonalize along the smaller dimension: rows if L <= d, else columns.
  const bool by_rows = rows <= cols;
  const std::size_t count = by_rows ? rows : cols;
  const std::size_t len = by_rows ? cols : rows;
  std::vector<double> w(count * len);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = matrix(r, c);
      if (by_rows) {
        w[r * len + c] = v;
      } else {
        w[c * len + r] = v;
      }
    }
  }

  SingularSpectrum out{orthogonalize(w, count, len)};
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  if (!out.values.empty()) {
    const double floor = static_cast<double>(std::max(rows, cols)) * kEps * out.values.front();
    for (double& v : out.values) {
      if (v <= floor) v = 0.0;
    }
  }
  return out;
}

double informative_value(const SingularSpectrum& spectrum) {
  const double total = std::accumulate(spectrum.values.begin(), spectrum.values.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorKind::kZeroMatrix, "informative value undefined");
  double entropy = 0.0;
  for (double sigma : spectrum.values) {
    if (sigma <= 0.0) continue;
    const double q = sigma / total;
    entropy -= q * std::log(q);
  }
  // Rounding can push a uniform spectrum a hair past ln(n) or a rank-1 one
  // below zero.
  const double upper = std::log(static_cast<double>(spectrum.values.size()));
  return std::clamp(entropy, 0.0, upper);
}

double lsvr(const SingularSpectrum& spectrum) {
  const double total = std::accumulate(spectrum.values.begin(), spectrum.values.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorKind::kZeroMatrix, "LSVR undefined");
  const double top = *std::max_element(spectrum.values.begin(), spectrum.values.end());
  return top / total;
}

double task_difficulty(std::span<const SingularSpectrum> spectra) {
  if (spectra.empty()) throw Error(ErrorKind::kInvalidArgument, "task difficulty of empty task");
  double sum = 0.0;
  for (const auto& s : spectra) sum += lsvr(s);
  return sum / static_cast<double>(spectra.size());
}

}  // namespace tailor
