// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "omnivq/error.hpp"
#include "omnivq/geometry.hpp"
#include "omnivq/hvs_tables.hpp"
#include "omnivq/spatial_metrics.hpp"
#include "oracles.hpp"

using namespace omnivq;

namespace {

LumaFrame offset(const LumaFrame& f, double d) {
  Plane p = f.plane();
  for (double& v : p.values()) v += d;
  return LumaFrame(p, f.bit_depth());
}

LumaFrame blurred(const LumaFrame& f, int passes) {
  Plane p = f.plane();
  for (int k = 0; k < passes; ++k) {
    Plane q(p.width(), p.height());
    for (int y = 0; y < p.height(); ++y) {
      for (int x = 0; x < p.width(); ++x) {
        double s = 0;
        for (int j = -1; j <= 1; ++j) {
          for (int i = -1; i <= 1; ++i) s += oracle::at_clamped(p, x + i, y + j);
        }
        q(x, y) = s / 9.0;
      }
    }
    p = q;
  }
  return LumaFrame(p, f.bit_depth());
}

// Textbook 2-D DCT-II basis function (u horizontal, v vertical).
double basis(int u, int v, int x, int y) {
  const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
  const double cv = v == 0 ? std::sqrt(0.125) : 0.5;
  return cu * cv * std::cos((2 * x + 1) * u * kPi / 16) * std::cos((2 * y + 1) * v * kPi / 16);
}

const int kJpegLuma[64] = {16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,
                           58, 60, 55, 14, 13, 16, 24, 40,  57,  69,  56,  14, 17,
                           22, 29, 51, 87, 80, 62, 18, 22, 37,  56,  68,  109, 103,
                           77, 24, 35, 55, 64, 81, 104, 113, 92, 49, 64,  78,  87,
                           103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

}  // namespace

TEST(Sobel, ConstantFrameGivesZeroMap) {
  const Plane map = sobel_map(Plane(7, 5, 42.0));
  for (double v : map.values()) EXPECT_EQ(v, 0.0);
}

TEST(Sobel, VerticalStepEdge) {
  Plane p(5, 5, 0.0);
  const double h = 10.0;
  for (int y = 0; y < 5; ++y) {
    for (int x = 3; x < 5; ++x) p(x, y) = h;
  }
  const Plane m = sobel_map(p);
  // Interior rows of the column left of the step: (1+2+1) h on one side.
  for (int y = 1; y < 4; ++y) {
    EXPECT_DOUBLE_EQ(m(2, y), 4 * h);
    EXPECT_DOUBLE_EQ(m(3, y), 4 * h);
    EXPECT_DOUBLE_EQ(m(0, y), 0.0);
  }
}

TEST(Sobel, TransposeCommutes) {
  std::mt19937_64 rng(5);
  const Plane p = oracle::random_frame(rng, 9, 6).plane();
  EXPECT_EQ(sobel_map(p.transposed()), sobel_map(p).transposed());
}

TEST(Sobel, MatchesOracle) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    const Plane p = oracle::random_frame(rng, 5 + k % 7, 4 + k % 5).plane();
    const Plane a = sobel_map(p), b = oracle::sobel(p);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-9);
    const Plane c = prewitt_map(p), d = oracle::prewitt(p);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c.values()[i], d.values()[i], 1e-9);
  }
}

TEST(SpatialActivity, IdentityAndOffset) {
  std::mt19937_64 rng(8);
  const LumaFrame f = oracle::random_frame(rng, 16, 12, 10, 200);
  EXPECT_EQ(spatial_activity(f, f), 0.0);
  EXPECT_NEAR(spatial_activity(f, offset(f, 13.0)), 0.0, 1e-9);
}

TEST(SpatialActivity, CheckerboardMatchesOracle) {
  Plane c(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) c(x, y) = (x + y) % 2 ? 255.0 : 0.0;
  }
  const LumaFrame board(c, 8), flat(8, 8, 8, 128.0);
  EXPECT_NEAR(spatial_activity(board, flat), oracle::spatial_activity(board, flat), 1e-9);
}

TEST(SpatialActivity, RandomFixturesMatchOracle) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    const int w = 6 + k, h = 5 + k / 2;
    const LumaFrame a = oracle::random_frame(rng, w, h), b = oracle::random_frame(rng, w, h);
    EXPECT_NEAR(spatial_activity(a, b), oracle::spatial_activity(a, b), 1e-9);
  }
}

TEST(Psnr, ClosedForms) {
  std::mt19937_64 rng(10);
  const LumaFrame f = oracle::random_frame(rng, 16, 16, 0, 250);
  EXPECT_NEAR(psnr(f, offset(f, 1.0)), 48.130804, 1e-6);
  EXPECT_EQ(psnr(f, f), kPsnrCapDb);
  EXPECT_NEAR(psnr(LumaFrame(4, 4, 8, 0.0), LumaFrame(4, 4, 8, 255.0)), 0.0, 1e-12);
}

TEST(Psnr, DimensionMismatch) {
  try {
    psnr(LumaFrame(4, 4, 8), LumaFrame(4, 5, 8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
}

TEST(HvsTables, DerivedFromJpegTable) {
  for (int k = 0; k < 64; ++k) {
    EXPECT_NEAR(hvs::kCsfWeights[k], 25.735092 / kJpegLuma[k], 6e-7) << k;
    EXPECT_NEAR(hvs::kMaskWeights[k], std::pow(10.0 / kJpegLuma[k], 2), 5e-7) << k;
  }
}

TEST(Dct, MatchesTextbookDefinition) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 255);
  double block[64], coef[64];
  for (double& v : block) v = u(rng);
  dct8x8(block, coef);
  for (int v = 0; v < 8; ++v) {
    for (int uu = 0; uu < 8; ++uu) {
      double s = 0;
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) s += block[y * 8 + x] * basis(uu, v, x, y);
      }
      EXPECT_NEAR(coef[v * 8 + uu], s, 1e-9);
    }
  }
}

TEST(PsnrHvs, SingleCoefficientPerturbation) {
  // Flat reference block plus one scaled basis function: the DCT difference
  // is that single coefficient.
  const int u = 2, v = 1;
  const double delta = 12.0;
  Plane d(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) d(x, y) = 128.0 + delta * basis(u, v, x, y);
  }
  const LumaFrame ref(8, 8, 8, 128.0), dist(d, 8);
  const double weighted = delta * hvs::kCsfWeights[v * 8 + u];
  const double mse = weighted * weighted / 64.0;
  EXPECT_NEAR(psnr_hvs(ref, dist), 10 * std::log10(255.0 * 255.0 / mse), 1e-9);

  // Masking oracle: the reference block is flat, so the mask comes from the
  // distorted block. Its sub-block activity ratio is computed directly.
  auto activity = [&](int x0, int y0, int n) {
    double m = 0;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) m += d(x0 + x, y0 + y);
    }
    m /= n * n;
    double ss = 0;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) ss += std::pow(d(x0 + x, y0 + y) - m, 2);
    }
    // Sample variance times the sample count.
    return ss / (n * n - 1) * (n * n);
  };
  const double ratio =
      (activity(0, 0, 4) + activity(4, 0, 4) + activity(0, 4, 4) + activity(4, 4, 4)) /
      activity(0, 0, 8);
  const double mask =
      std::sqrt(delta * delta * hvs::kMaskWeights[v * 8 + u] * ratio) / 32.0;
  const double threshold = mask / hvs::kMaskWeights[v * 8 + u];
  const double masked = std::max(0.0, delta - threshold) * hvs::kCsfWeights[v * 8 + u];
  EXPECT_NEAR(psnr_hvs_m(ref, dist), 10 * std::log10(255.0 * 255.0 / (masked * masked / 64.0)),
              1e-9);
}

TEST(PsnrHvs, IdentityCapAndOrdering) {
  std::mt19937_64 rng(13);
  const LumaFrame ref = oracle::textured_frame(rng, 64, 64, 20.0);
  EXPECT_EQ(psnr_hvs(ref, ref), kPsnrCapDb);
  EXPECT_EQ(psnr_hvs_m(ref, ref), kPsnrCapDb);
  // High-frequency noise is weighted down by the CSF and masked by texture.
  Plane p = ref.plane();
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) p(x, y) = std::clamp(p(x, y) + ((x + y) % 2 ? 6.0 : -6.0), 0.0, 255.0);
  }
  const LumaFrame dist(p, 8);
  EXPECT_GE(psnr_hvs(ref, dist), psnr(ref, dist));
  EXPECT_GE(psnr_hvs_m(ref, dist), psnr_hvs(ref, dist));
}

TEST(PsnrHvs, TooSmallFrame) {
  try {
    psnr_hvs(LumaFrame(7, 9, 8), LumaFrame(7, 9, 8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFrameTooSmall);
  }
}

TEST(Ssim, Identity) {
  std::mt19937_64 rng(14);
  const LumaFrame f = oracle::random_frame(rng, 24, 20);
  EXPECT_NEAR(ssim(f, f), 1.0, 1e-12);
}

TEST(Ssim, ContrastInversionIsNegative) {
  std::mt19937_64 rng(15);
  const LumaFrame f = oracle::textured_frame(rng, 32, 32);
  Plane inv = f.plane();
  for (double& v : inv.values()) v = 255.0 - v;
  const LumaFrame g(inv, 8);
  const double s = ssim(f, g);
  EXPECT_LT(s, 0.0);
  EXPECT_NEAR(s, oracle::ssim(f.plane(), g.plane(), 255.0), 1e-9);
}

TEST(Ssim, ConstantFramesLuminanceTerm) {
  const double a = 60, b = 180, c1 = std::pow(0.01 * 255, 2);
  EXPECT_NEAR(ssim(LumaFrame(16, 16, 8, a), LumaFrame(16, 16, 8, b)),
              (2 * a * b + c1) / (a * a + b * b + c1), 1e-12);
}

TEST(Ssim, RandomFixturesMatchOracle) {
  std::mt19937_64 rng(16);
  for (int k = 0; k < 20; ++k) {
    const int w = 12 + k % 9, h = 11 + k % 6;
    const LumaFrame a = oracle::random_frame(rng, w, h);
    const LumaFrame b = oracle::random_frame(rng, w, h);
    EXPECT_NEAR(ssim(a, b), oracle::ssim(a.plane(), b.plane(), 255.0), 1e-9);
  }
  // Frames narrower than the window use a shrunken odd window.
  const LumaFrame a = oracle::random_frame(rng, 8, 30), b = oracle::random_frame(rng, 8, 30);
  EXPECT_NEAR(ssim(a, b), oracle::ssim(a.plane(), b.plane(), 255.0), 1e-9);
}

TEST(MsSsim, IdentityAndBlurLadder) {
  std::mt19937_64 rng(17);
  const LumaFrame f = oracle::textured_frame(rng, 96, 96, 15.0);
  EXPECT_NEAR(ms_ssim(f, f), 1.0, 1e-12);
  double prev = 1.0;
  for (int passes : {1, 2, 4, 8}) {
    const double s = ms_ssim(f, blurred(f, passes));
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(MsSsim, SingleScaleEqualsSsim) {
  std::mt19937_64 rng(18);
  const LumaFrame a = oracle::random_frame(rng, 20, 20), b = oracle::random_frame(rng, 20, 20);
  MsSsimOptions one;
  one.max_scales = 1;
  EXPECT_NEAR(ms_ssim(a, b, one), ssim(a, b), 1e-15);
  // 20 pixels cannot be halved without dropping below the 11-pixel window.
  EXPECT_EQ(ms_ssim_scale_count(20), 1);
  EXPECT_EQ(ms_ssim_scale_count(22), 2);
  EXPECT_EQ(ms_ssim_scale_count(176), 5);
}

TEST(MsSsim, ScaleCountFollowsWindow) {
  EXPECT_EQ(ms_ssim_scale_count(43), 3);
  EXPECT_EQ(ms_ssim_scale_count(44), 3);
  EXPECT_EQ(ms_ssim_scale_count(87), 4);
}

TEST(Gmsd, IdentityAndOffset) {
  std::mt19937_64 rng(19);
  const LumaFrame f = oracle::random_frame(rng, 16, 16, 20, 200);
  EXPECT_EQ(gmsd(f, f), 0.0);
  EXPECT_NEAR(gmsd(f, offset(f, 17.0)), 0.0, 1e-12);
}

TEST(Gmsd, LocalizedBlurMatchesOracle) {
  std::mt19937_64 rng(20);
  const LumaFrame f = oracle::textured_frame(rng, 64, 64, 10.0);
  const LumaFrame b = blurred(f, 3);
  Plane p = f.plane();
  for (int y = 20; y < 40; ++y) {
    for (int x = 16; x < 48; ++x) p(x, y) = b(x, y);
  }
  const LumaFrame dist(p, 8);
  const double g = gmsd(f, dist);
  EXPECT_GT(g, 0.0);
  EXPECT_NEAR(g, oracle::gmsd(f, dist), 1e-9);
}

TEST(Gmsd, RandomFixturesMatchOracle) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 20; ++k) {
    const int w = 5 + k, h = 4 + (k * 3) % 11;
    const LumaFrame a = oracle::random_frame(rng, w, h), b = oracle::random_frame(rng, w, h);
    EXPECT_NEAR(gmsd(a, b), oracle::gmsd(a, b), 1e-9);
  }
}

TEST(Gmsd, ConstantScalesWithBitDepth) {
  EXPECT_DOUBLE_EQ(gmsd_constant(255.0), 170.0);
  EXPECT_NEAR(gmsd_constant(1023.0), 170.0 * std::pow(1023.0 / 255.0, 2), 1e-9);
}

TEST(WsPsnr, Properties) {
  std::mt19937_64 rng(22);
  const LumaFrame f = oracle::random_frame(rng, 64, 32, 10, 240);
  EXPECT_EQ(ws_psnr(f, f), kPsnrCapDb);
  EXPECT_NEAR(ws_psnr(f, offset(f, 3.0)), psnr(f, offset(f, 3.0)), 1e-9);
  Plane p = f.plane();
  for (int x = 0; x < 64; ++x) p(x, 0) += 10.0;
  const LumaFrame polar(p, 8);
  EXPECT_GT(ws_psnr(f, polar), psnr(f, polar) + 10.0);
}

TEST(SPsnr, Properties) {
  std::mt19937_64 rng(23);
  const LumaFrame f = oracle::random_frame(rng, 64, 32, 10, 240);
  EXPECT_EQ(s_psnr(f, f, 20000), kPsnrCapDb);
  EXPECT_NEAR(s_psnr(f, offset(f, 5.0), 20000), 10 * std::log10(255.0 * 255.0 / 25.0), 1e-9);
  Plane p = f.plane();
  for (int x = 0; x < 64; ++x) p(x, 0) += 10.0;
  const LumaFrame polar(p, 8);
  EXPECT_GT(s_psnr(f, polar, 20000), psnr(f, polar) + 5.0);
}
