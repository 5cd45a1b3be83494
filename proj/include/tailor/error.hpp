// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tailor {

enum class ErrorKind {
  kBadMagic,
  kUnsupportedVersion,
  kTruncatedPayload,
  kDimensionMismatch,
  kInvalidDataset,
  kIo,
  kNonFinite,
  kZeroMatrix,
  kInvalidArgument,
  kUnknownId,
  kDataQuality,
};

std::string_view to_string(ErrorKind kind);

// All engine failures surface as this exception; the kind survives across
// module boundaries so callers can map it to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) +
                           (detail.empty() ? "" : ": " + detail)),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tailor
