// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace omnivq {

// Failure categories. The string form is stable and is what the CLI prints
// in its one-line error messages.
enum class ErrorKind {
  kInvalidArgument,
  kInvalidFov,
  kDimensionMismatch,
  kFrameTooSmall,
  kEmptySeries,
  kNegativeInput,
  kEmptyTensor,
  kNonFiniteInput,
  kLayoutMismatch,
  kTooFewGroups,
  kZeroVariance,
  kLengthMismatch,
  kDegenerateInput,
  kOverlapBetweenSplits,
  kParseError,
  kMissingField,
  kDanglingPath,
  kDuplicateId,
  kTruncatedFile,
  kFormatUnknown,
  kProvenanceMismatch,
  kFrameCountMismatch,
  kIoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace omnivq
