// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "tailor/dataset.hpp"

namespace tailor {

// Singular values in non-increasing order, length min(rows, cols).
struct SingularSpectrum {
  std::vector<double> values;
};

// Singular values only, via one-sided Jacobi rotations on the smaller
// orientation of the matrix. Values at or below the numerical-rank floor
// max(rows, cols) * eps * sigma_max are reported as exactly zero.
SingularSpectrum singular_values(const FeatureMatrix& matrix);

// Shannon entropy (natural log) of the normalized spectrum; the
// informativeness score of a sample. Throws kZeroMatrix on an all-zero
// spectrum.
double informative_value(const SingularSpectrum& spectrum);

// sigma_max / sum(sigma). Throws kZeroMatrix on an all-zero spectrum.
double lsvr(const SingularSpectrum& spectrum);

// Mean LSVR over a task's samples.
double task_difficulty(std::span<const SingularSpectrum> spectra);

bool is_zero(const SingularSpectrum& spectrum) noexcept;

}  // namespace tailor
