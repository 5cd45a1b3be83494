// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailor/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>

#include "tailor/error.hpp"
#include "tailor/io.hpp"

namespace tailor {

static_assert(std::endian::native == std::endian::little,
              "container codec assumes a little-endian host");
static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kBadMagic: return "bad magic";
    case ErrorKind::kUnsupportedVersion: return "unsupported version";
    case ErrorKind::kTruncatedPayload: return "truncated payload";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kInvalidDataset: return "invalid dataset";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kNonFinite: return "non-finite input";
    case ErrorKind::kZeroMatrix: return "zero matrix";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kUnknownId: return "unknown id";
    case ErrorKind::kDataQuality: return "data quality";
  }
  return "error";
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorKind::kDimensionMismatch, "payload length " + std::to_string(data_.size()) +
                                                   " != " + std::to_string(rows) + "x" +
                                                   std::to_string(cols));
  }
}

bool FeatureMatrix::operator==(const FeatureMatrix& other) const {
  // Bitwise: NaN payloads and signed zeros must round-trip too.
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

std::span<const float> last_token_feature(const Sample& sample) {
  return sample.features.row(sample.features.rows() - 1);
}

bool ValidationReport::ok() const noexcept {
  return duplicate_ids.empty() && non_finite.empty() && dimension_mismatch.empty() &&
         empty_tasks.empty() && bad_task_ids.empty() && bad_rounds.empty();
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  auto list = [&os](const char* what, const auto& items) {
    if (items.empty()) return;
    os << what << " (" << items.size() << "):";
    std::size_t shown = 0;
    for (const auto& item : items) {
      if (shown++ == 8) {
        os << " ...";
        break;
      }
      if constexpr (std::is_same_v<std::decay_t<decltype(item)>, NonFiniteEntry>) {
        os << " (" << item.sample << "," << item.row << "," << item.col << ")";
      } else {
        os << ' ' << item;
      }
    }
    os << "; ";
  };
  list("duplicate ids", duplicate_ids);
  list("non-finite entries", non_finite);
  list("dimension mismatch at samples", dimension_mismatch);
  list("empty tasks", empty_tasks);
  list("bad task ids at samples", bad_task_ids);
  list("bad rounds at samples", bad_rounds);
  auto text = os.str();
  return text.empty() ? "ok" : text.substr(0, text.size() - 2);
}

ValidationReport validate(const Dataset& dataset) {
  ValidationReport report;
  report.task_counts.assign(dataset.tasks.size(), 0);

  std::map<SampleId, std::size_t> seen;
  const std::size_t dim = dataset.dim();
  for (std::size_t s = 0; s < dataset.samples.size(); ++s) {
    const Sample& sample = dataset.samples[s];
    if (++seen[sample.id] == 2) report.duplicate_ids.push_back(sample.id);

    if (sample.task_id < dataset.tasks.size()) {
      ++report.task_counts[sample.task_id];
    } else {
      report.bad_task_ids.push_back(s);
    }
    if (sample.rounds < 1) report.bad_rounds.push_back(s);

    const FeatureMatrix& m = sample.features;
    if (m.rows() == 0 || m.cols() == 0 || m.cols() != dim ||
        m.data().size() != m.rows() * m.cols()) {
      report.dimension_mismatch.push_back(s);
      continue;
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        if (!std::isfinite(m(r, c))) report.non_finite.push_back({s, r, c});
      }
    }
  }
  for (std::size_t t = 0; t < report.task_counts.size(); ++t) {
    if (report.task_counts[t] == 0) report.empty_tasks.push_back(t);
  }
  std::sort(report.duplicate_ids.begin(), report.duplicate_ids.end());
  return report;
}

namespace {

class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::byte*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::byte*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::vector<std::byte> take() { return std::move(bytes_); }

 private:
  std::vector<std::byte> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    T value;
    std::memcpy(&value, take(sizeof(T), what), sizeof(T));
    return value;
  }
  const std::byte* take(std::size_t n, const char* what) {
    if (n > bytes_.size() - pos_) {
      throw Error(ErrorKind::kTruncatedPayload,
                  std::string(what) + " at offset " + std::to_string(pos_) + " needs " +
                      std::to_string(n) + " bytes, " + std::to_string(bytes_.size() - pos_) +
                      " remain");
    }
    const std::byte* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::byte> encode_container(const Dataset& dataset) {
  const auto report = validate(dataset);
  if (dataset.tasks.empty() || dataset.samples.empty() || !report.ok()) {
    throw Error(ErrorKind::kInvalidDataset,
                dataset.tasks.empty() ? "no tasks" : report.summary());
  }
  Writer w;
  w.put_bytes(kContainerMagic, 4);
  w.put<std::uint32_t>(kContainerVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(dataset.tasks.size()));
  for (const auto& name : dataset.tasks) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorKind::kInvalidDataset, "task name longer than 65535 bytes");
    }
    w.put<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    w.put_bytes(name.data(), name.size());
  }
  w.put<std::uint64_t>(dataset.samples.size());
  for (const auto& s : dataset.samples) {
    w.put<std::uint64_t>(s.id);
    w.put<std::uint32_t>(s.task_id);
    w.put<std::uint32_t>(s.rounds);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.features.rows()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.features.cols()));
    w.put_bytes(s.features.data().data(), s.features.data().size_bytes());
  }
  return w.take();
}

Dataset decode_container(std::span<const std::byte> bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kContainerMagic, 4) != 0) {
    throw Error(ErrorKind::kBadMagic, "expected \"DTLR\"");
  }
  r.take(4, "magic");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kContainerVersion) {
    throw Error(ErrorKind::kUnsupportedVersion, "version " + std::to_string(version));
  }

  Dataset dataset;
  const auto n_tasks = r.get<std::uint32_t>("task count");
  for (std::uint32_t t = 0; t < n_tasks; ++t) {
    const auto len = r.get<std::uint16_t>("task name length");
    const auto* p = r.take(len, "task name");
    dataset.tasks.emplace_back(reinterpret_cast<const char*>(p), len);
  }

  const auto n_samples = r.get<std::uint64_t>("sample count");
  std::uint32_t dim = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    Sample s;
    s.id = r.get<std::uint64_t>("sample id");
    s.task_id = r.get<std::uint32_t>("task id");
    s.rounds = r.get<std::uint32_t>("rounds");
    const auto rows = r.get<std::uint32_t>("token count");
    const auto cols = r.get<std::uint32_t>("feature dimension");
    if (rows == 0 || cols == 0 || (i > 0 && cols != dim)) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "sample " + std::to_string(s.id) + " has shape " + std::to_string(rows) + "x" +
                      std::to_string(cols) + (i > 0 ? ", expected d=" + std::to_string(dim) : ""));
    }
    dim = cols;
    const std::uint64_t count = std::uint64_t{rows} * cols;
    if (count > r.remaining() / sizeof(float)) {
      throw Error(ErrorKind::kTruncatedPayload,
                  "sample " + std::to_string(s.id) + " declares " + std::to_string(count) +
                      " floats, " + std::to_string(r.remaining()) + " bytes remain");
    }
    std::vector<float> data(count);
    std::memcpy(data.data(), r.take(count * sizeof(float), "features"), count * sizeof(float));
    s.features = FeatureMatrix(rows, cols, std::move(data));
    if (s.task_id >= n_tasks) {
      throw Error(ErrorKind::kInvalidDataset, "sample " + std::to_string(s.id) +
                                                  " references task " +
                                                  std::to_string(s.task_id));
    }
    dataset.samples.push_back(std::move(s));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorKind::kInvalidDataset,
                std::to_string(r.remaining()) + " trailing bytes after last record");
  }
  return dataset;
}

Dataset load_container(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_container(bytes);
}

void write_container(const Dataset& dataset, const std::filesystem::path& path) {
  write_file_atomic(path, encode_container(dataset));
}

}  // namespace tailor
