// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omnivq/error.hpp"

namespace omnivq {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kInvalidFov: return "invalid-fov";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kFrameTooSmall: return "frame-too-small";
    case ErrorKind::kEmptySeries: return "empty-series";
    case ErrorKind::kNegativeInput: return "negative-input";
    case ErrorKind::kEmptyTensor: return "empty-tensor";
    case ErrorKind::kNonFiniteInput: return "non-finite-input";
    case ErrorKind::kLayoutMismatch: return "layout-mismatch";
    case ErrorKind::kTooFewGroups: return "too-few-groups";
    case ErrorKind::kZeroVariance: return "zero-variance";
    case ErrorKind::kLengthMismatch: return "length-mismatch";
    case ErrorKind::kDegenerateInput: return "degenerate-input";
    case ErrorKind::kOverlapBetweenSplits: return "overlap-between-splits";
    case ErrorKind::kParseError: return "parse-error";
    case ErrorKind::kMissingField: return "missing-field";
    case ErrorKind::kDanglingPath: return "dangling-path";
    case ErrorKind::kDuplicateId: return "duplicate-id";
    case ErrorKind::kTruncatedFile: return "truncated-file";
    case ErrorKind::kFormatUnknown: return "format-unknown";
    case ErrorKind::kProvenanceMismatch: return "provenance-mismatch";
    case ErrorKind::kFrameCountMismatch: return "frame-count-mismatch";
    case ErrorKind::kIoError: return "io-error";
  }
  return "unknown";
}

Plane::Plane(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    fail(ErrorKind::kInvalidArgument, "negative plane dimensions");
  }
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Plane::Plane(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 0 || height < 0 ||
      values_.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorKind::kInvalidArgument,
         "plane sample count does not match " + std::to_string(width) + "x" +
             std::to_string(height));
  }
}

double Plane::clamped(int x, int y) const noexcept {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return (*this)(x, y);
}

Plane Plane::transposed() const {
  Plane out(height_, width_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) out(y, x) = (*this)(x, y);
  }
  return out;
}

LumaFrame::LumaFrame(Plane plane, int bit_depth)
    : plane_(std::move(plane)), bit_depth_(bit_depth) {
  if (bit_depth < 1 || bit_depth > 16) {
    fail(ErrorKind::kInvalidArgument,
         "unsupported bit depth " + std::to_string(bit_depth));
  }
  const double hi = max_value();
  for (double v : plane_.values()) {
    if (!(v >= 0.0 && v <= hi)) {
      fail(ErrorKind::kInvalidArgument,
           "luma sample " + std::to_string(v) + " outside [0, " +
               std::to_string(hi) + "]");
    }
  }
}

LumaFrame::LumaFrame(int width, int height, int bit_depth, double fill)
    : LumaFrame(Plane(width, height, fill), bit_depth) {}

Plane difference(const Plane& a, const Plane& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    fail(ErrorKind::kDimensionMismatch, "difference of unequal planes");
  }
  Plane out(a.width(), a.height());
  auto av = a.values();
  auto bv = b.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] - bv[i];
  return out;
}

}  // namespace omnivq
