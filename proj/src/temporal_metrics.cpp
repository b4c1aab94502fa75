// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/temporal_metrics.hpp"

#include <cmath>

#include "omnivq/error.hpp"

namespace omnivq {
namespace {

void check_window(const FramePairWindow& w) {
  const int width = w.ref_curr.width();
  const int height = w.ref_curr.height();
  for (const LumaFrame* f : {&w.ref_prev, &w.dist_curr, &w.dist_prev}) {
    if (f->width() != width || f->height() != height) {
      fail(ErrorKind::kDimensionMismatch,
           "temporal window frames differ in size");
    }
  }
}

}  // namespace

double temporal_information(const LumaFrame& curr, const LumaFrame& prev) {
  if (curr.width() != prev.width() || curr.height() != prev.height()) {
    fail(ErrorKind::kDimensionMismatch, "temporal_information: size mismatch");
  }
  auto a = curr.plane().values();
  auto b = prev.plane().values();
  const double n = static_cast<double>(a.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] - b[i];
  const double mean = sum / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / n);
}

double relative_ti(const FramePairWindow& w) {
  check_window(w);
  const double ti_ref = temporal_information(w.ref_curr, w.ref_prev);
  const double ti_dist = temporal_information(w.dist_curr, w.dist_prev);
  if (ti_ref < kStaticTiEpsilon) {
    return ti_dist < kStaticTiEpsilon ? 0.0 : kRelativeTiCap;
  }
  return std::fabs(ti_ref - ti_dist) / ti_ref;
}

double temporal_gmsd(const FramePairWindow& w, const GmsdOptions& opts) {
  check_window(w);
  const Plane delta_ref = difference(w.ref_curr.plane(), w.ref_prev.plane());
  const Plane delta_dist = difference(w.dist_curr.plane(), w.dist_prev.plane());
  return gmsd_planes(delta_ref, delta_dist,
                     gmsd_constant(w.ref_curr.max_value(), opts), opts);
}

}  // namespace omnivq
