// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <cstdint>

#include "omnivq/frame.hpp"

namespace omnivq {

// Value returned by every PSNR-family metric when the error is zero. Finite
// so that downstream regression features stay finite.
inline constexpr double kPsnrCapDb = 100.0;

// 10 log10(peak^2 / mse), capped at kPsnrCapDb.
double psnr_from_mse(double mse, double peak);

// Gradient magnitude with the 3x3 Sobel pair; borders by edge replication.
Plane sobel_map(const Plane& z);

// Gradient magnitude with the 3x3 Prewitt pair scaled by 1/3; borders by
// edge replication.
Plane prewitt_map(const Plane& z);

// RMS of the difference between the Sobel maps of both frames.
double spatial_activity(const LumaFrame& ref, const LumaFrame& dist);

double psnr(const LumaFrame& ref, const LumaFrame& dist);

struct HvsPsnr {
  double psnr_hvs = 0.0;
  double psnr_hvs_m = 0.0;
};

// PSNR-HVS and PSNR-HVS-M over non-overlapping 8x8 blocks (partial border
// blocks are dropped). Both share the block DCTs, hence the joint entry point.
HvsPsnr psnr_hvs_pair(const LumaFrame& ref, const LumaFrame& dist);
double psnr_hvs(const LumaFrame& ref, const LumaFrame& dist);
double psnr_hvs_m(const LumaFrame& ref, const LumaFrame& dist);

// Orthonormal 8x8 DCT-II of a row-major block.
void dct8x8(const double* block, double* coefficients);

struct SsimOptions {
  int window = 11;      // Gaussian window edge; shrunk to fit small frames
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

struct SsimStats {
  double ssim = 0.0;  // mean of the full SSIM map
  double cs = 0.0;    // mean of the contrast-structure map
};

// SSIM over the 'valid' region of the Gaussian-filtered statistics.
SsimStats ssim_stats(const Plane& x, const Plane& y, double peak,
                     const SsimOptions& opts = {});
double ssim(const LumaFrame& ref, const LumaFrame& dist,
            const SsimOptions& opts = {});

struct MsSsimOptions {
  int max_scales = 5;
  SsimOptions ssim;
};

// Number of scales used for a frame whose smaller side is min_dim: the
// deepest scale keeps at least one full window.
int ms_ssim_scale_count(int min_dim, const MsSsimOptions& opts = {});

// 2x2 box filter with symmetric padding followed by 2:1 decimation.
Plane dyadic_downsample(const Plane& p);

// Multi-scale SSIM. When fewer than five scales fit, the exponents of the
// retained scales are renormalized to sum to one.
double ms_ssim(const LumaFrame& ref, const LumaFrame& dist,
               const MsSsimOptions& opts = {});

struct GmsdOptions {
  // Stability constant for 8-bit data; scaled by (peak / 255)^2.
  double c_8bit = 170.0;
  bool downsample = false;  // 2x2 average + decimation before the gradients
};

double gmsd_constant(double peak, const GmsdOptions& opts = {});

// Population standard deviation of the gradient-magnitude-similarity map.
// Inputs may be signed (frame differences).
double gmsd_planes(const Plane& u, const Plane& v, double c,
                   const GmsdOptions& opts = {});
double gmsd(const LumaFrame& ref, const LumaFrame& dist,
            const GmsdOptions& opts = {});

// PSNR with per-row weights cos(latitude of the row centre).
double ws_psnr(const LumaFrame& ref, const LumaFrame& dist);

inline constexpr std::int64_t kDefaultSphereSamples = 655362;

// PSNR over a Fibonacci lattice of n_points directions with nearest-pixel
// lookup in the ERP frames.
double s_psnr(const LumaFrame& ref, const LumaFrame& dist,
              std::int64_t n_points = kDefaultSphereSamples);

// i-th of n Fibonacci-lattice directions (azimuth, elevation) in radians.
void fibonacci_direction(std::int64_t i, std::int64_t n, double& azimuth,
                         double& elevation);

}  // namespace omnivq
