// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tailor {

using SampleId = std::uint64_t;

// Token-level feature matrix of one sample, rows = tokens, row-major.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols);
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const float> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<float> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  float operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  float& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const float> data() const noexcept { return data_; }

  bool operator==(const FeatureMatrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

struct Sample {
  SampleId id = 0;
  std::uint32_t task_id = 0;
  std::uint32_t rounds = 1;
  FeatureMatrix features;

  bool operator==(const Sample& other) const = default;
};

struct Dataset {
  std::vector<std::string> tasks;
  std::vector<Sample> samples;

  bool operator==(const Dataset& other) const = default;

  // Feature dimension shared by all samples (0 if there are none).
  std::size_t dim() const noexcept {
    return samples.empty() ? 0 : samples.front().features.cols();
  }
};

struct NonFiniteEntry {
  std::size_t sample = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const NonFiniteEntry& other) const = default;
};

struct ValidationReport {
  std::vector<std::size_t> task_counts;
  std::vector<SampleId> duplicate_ids;
  std::vector<NonFiniteEntry> non_finite;
  // Sample positions whose shape disagrees with the dataset (wrong d,
  // zero rows, or a short payload).
  std::vector<std::size_t> dimension_mismatch;
  std::vector<std::size_t> empty_tasks;
  std::vector<std::size_t> bad_task_ids;
  std::vector<std::size_t> bad_rounds;

  bool ok() const noexcept;
  std::string summary() const;
};

ValidationReport validate(const Dataset& dataset);

// Sample point p_i: the last token's feature row.
std::span<const float> last_token_feature(const Sample& sample);

// DTLR container, version 1. Throws tailor::Error with a specific kind on
// malformed input.
Dataset load_container(const std::filesystem::path& path);
Dataset decode_container(std::span<const std::byte> bytes);

void write_container(const Dataset& dataset, const std::filesystem::path& path);
std::vector<std::byte> encode_container(const Dataset& dataset);

inline constexpr char kContainerMagic[4] = {'D', 'T', 'L', 'R'};
inline constexpr std::uint32_t kContainerVersion = 1;

}  // namespace tailor
