// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/spatial_metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "omnivq/error.hpp"
#include "omnivq/geometry.hpp"
#include "omnivq/hvs_tables.hpp"

namespace omnivq {
namespace {

void require_same_dims(const Plane& a, const Plane& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    fail(ErrorKind::kDimensionMismatch,
         std::string(what) + ": " + std::to_string(a.width()) + "x" +
             std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
             "x" + std::to_string(b.height()));
  }
}

void require_min_size(const Plane& p, int min_side, const char* what) {
  if (p.width() < min_side || p.height() < min_side) {
    fail(ErrorKind::kFrameTooSmall,
         std::string(what) + " needs at least " + std::to_string(min_side) +
             "x" + std::to_string(min_side) + " pixels");
  }
}

double mean_squared_error(const Plane& a, const Plane& b) {
  auto av = a.values();
  auto bv = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    sum += d * d;
  }
  return sum / static_cast<double>(av.size());
}

double population_std(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / n);
}

// sum of squared deviations times n / (n - 1); matches the sample-variance
// based block activity of the reference implementation.
double block_activity(const double* block, int x0, int y0, int size) {
  double sum = 0.0;
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) sum += block[(y0 + j) * 8 + x0 + i];
  }
  const double n = static_cast<double>(size * size);
  const double mean = sum / n;
  double ss = 0.0;
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) {
      const double d = block[(y0 + j) * 8 + x0 + i] - mean;
      ss += d * d;
    }
  }
  return ss * n / (n - 1.0);
}

// Contrast-masking energy of one block.
double masking_energy(const double* block, const double* dct) {
  double energy = 0.0;
  for (int k = 1; k < 64; ++k) energy += dct[k] * dct[k] * hvs::kMaskWeights[k];
  double activity = block_activity(block, 0, 0, 8);
  if (activity != 0.0) {
    activity = (block_activity(block, 0, 0, 4) + block_activity(block, 4, 0, 4) +
                block_activity(block, 0, 4, 4) + block_activity(block, 4, 4, 4)) /
               activity;
  }
  return std::sqrt(energy * activity) / 32.0;
}

struct DctBasis {
  std::array<double, 64> c{};  // c[u * 8 + x]
  DctBasis() {
    for (int u = 0; u < 8; ++u) {
      const double scale = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) {
        c[u * 8 + x] = scale * std::cos((2.0 * x + 1.0) * u * kPi / 16.0);
      }
    }
  }
};

const DctBasis& dct_basis() {
  static const DctBasis basis;
  return basis;
}

// 1-D normalized Gaussian taps.
std::vector<double> gaussian_taps(int size, double sigma) {
  std::vector<double> taps(size);
  const double half = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - half;
    taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable 'valid' correlation.
Plane filter_valid(const Plane& in, const std::vector<double>& taps) {
  const int k = static_cast<int>(taps.size());
  const int ow = in.width() - k + 1;
  const int oh = in.height() - k + 1;
  Plane horiz(ow, in.height());
  for (int y = 0; y < in.height(); ++y) {
    auto row = in.row(y);
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int t = 0; t < k; ++t) s += taps[t] * row[x + t];
      horiz(x, y) = s;
    }
  }
  Plane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int t = 0; t < k; ++t) s += taps[t] * horiz(x, y + t);
      out(x, y) = s;
    }
  }
  return out;
}

Plane multiply(const Plane& a, const Plane& b) {
  Plane out(a.width(), a.height());
  auto av = a.values();
  auto bv = b.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
  return out;
}

int effective_window(int requested, int min_dim) {
  int w = std::min(requested, min_dim);
  if (w % 2 == 0) --w;
  return std::max(w, 1);
}

}  // namespace

double psnr_from_mse(double mse, double peak) {
  if (mse <= 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / mse));
}

Plane sobel_map(const Plane& z) {
  require_min_size(z, 3, "sobel_map");
  Plane out(z.width(), z.height());
  for (int y = 0; y < z.height(); ++y) {
    for (int x = 0; x < z.width(); ++x) {
      const double gx =
          (z.clamped(x - 1, y - 1) + 2.0 * z.clamped(x - 1, y) + z.clamped(x - 1, y + 1)) -
          (z.clamped(x + 1, y - 1) + 2.0 * z.clamped(x + 1, y) + z.clamped(x + 1, y + 1));
      const double gy =
          (z.clamped(x - 1, y - 1) + 2.0 * z.clamped(x, y - 1) + z.clamped(x + 1, y - 1)) -
          (z.clamped(x - 1, y + 1) + 2.0 * z.clamped(x, y + 1) + z.clamped(x + 1, y + 1));
      out(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

Plane prewitt_map(const Plane& z) {
  require_min_size(z, 3, "prewitt_map");
  Plane out(z.width(), z.height());
  for (int y = 0; y < z.height(); ++y) {
    for (int x = 0; x < z.width(); ++x) {
      const double gx =
          ((z.clamped(x - 1, y - 1) + z.clamped(x - 1, y) + z.clamped(x - 1, y + 1)) -
           (z.clamped(x + 1, y - 1) + z.clamped(x + 1, y) + z.clamped(x + 1, y + 1))) /
          3.0;
      const double gy =
          ((z.clamped(x - 1, y - 1) + z.clamped(x, y - 1) + z.clamped(x + 1, y - 1)) -
           (z.clamped(x - 1, y + 1) + z.clamped(x, y + 1) + z.clamped(x + 1, y + 1))) /
          3.0;
      out(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

double spatial_activity(const LumaFrame& ref, const LumaFrame& dist) {
  require_same_dims(ref.plane(), dist.plane(), "spatial_activity");
  return std::sqrt(
      mean_squared_error(sobel_map(ref.plane()), sobel_map(dist.plane())));
}

double psnr(const LumaFrame& ref, const LumaFrame& dist) {
  require_same_dims(ref.plane(), dist.plane(), "psnr");
  if (ref.bit_depth() != dist.bit_depth()) {
    fail(ErrorKind::kDimensionMismatch, "psnr: bit depths differ");
  }
  return psnr_from_mse(mean_squared_error(ref.plane(), dist.plane()),
                       ref.max_value());
}

void dct8x8(const double* block, double* coefficients) {
  const auto& c = dct_basis().c;
  double rows[64];
  for (int y = 0; y < 8; ++y) {
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += c[u * 8 + x] * block[y * 8 + x];
      rows[y * 8 + u] = s;
    }
  }
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += c[v * 8 + y] * rows[y * 8 + u];
      coefficients[v * 8 + u] = s;
    }
  }
}

HvsPsnr psnr_hvs_pair(const LumaFrame& ref, const LumaFrame& dist) {
  require_same_dims(ref.plane(), dist.plane(), "psnr_hvs");
  require_min_size(ref.plane(), 8, "psnr_hvs");
  const Plane& a = ref.plane();
  const Plane& b = dist.plane();

  double sum_hvs = 0.0;
  double sum_hvs_m = 0.0;
  std::size_t count = 0;
  double block_a[64], block_b[64], dct_a[64], dct_b[64];
  for (int by = 0; by + 8 <= a.height(); by += 8) {
    for (int bx = 0; bx + 8 <= a.width(); bx += 8) {
      for (int j = 0; j < 8; ++j) {
        for (int i = 0; i < 8; ++i) {
          block_a[j * 8 + i] = a(bx + i, by + j);
          block_b[j * 8 + i] = b(bx + i, by + j);
        }
      }
      dct8x8(block_a, dct_a);
      dct8x8(block_b, dct_b);
      const double mask =
          std::max(masking_energy(block_a, dct_a), masking_energy(block_b, dct_b));
      for (int k = 0; k < 64; ++k) {
        const double u = std::fabs(dct_a[k] - dct_b[k]);
        const double csf = hvs::kCsfWeights[k];
        sum_hvs += (u * csf) * (u * csf);
        double masked = u;
        if (k != 0) {
          const double threshold = mask / hvs::kMaskWeights[k];
          masked = u < threshold ? 0.0 : u - threshold;
        }
        sum_hvs_m += (masked * csf) * (masked * csf);
        ++count;
      }
    }
  }
  const double peak = ref.max_value();
  return {psnr_from_mse(sum_hvs / count, peak),
          psnr_from_mse(sum_hvs_m / count, peak)};
}

double psnr_hvs(const LumaFrame& ref, const LumaFrame& dist) {
  return psnr_hvs_pair(ref, dist).psnr_hvs;
}

double psnr_hvs_m(const LumaFrame& ref, const LumaFrame& dist) {
  return psnr_hvs_pair(ref, dist).psnr_hvs_m;
}

SsimStats ssim_stats(const Plane& x, const Plane& y, double peak,
                     const SsimOptions& opts) {
  require_same_dims(x, y, "ssim");
  if (x.empty()) fail(ErrorKind::kFrameTooSmall, "ssim on an empty frame");
  const int w = effective_window(opts.window, std::min(x.width(), x.height()));
  const auto taps = gaussian_taps(w, opts.sigma);

  const Plane mu_x = filter_valid(x, taps);
  const Plane mu_y = filter_valid(y, taps);
  const Plane xx = filter_valid(multiply(x, x), taps);
  const Plane yy = filter_valid(multiply(y, y), taps);
  const Plane xy = filter_valid(multiply(x, y), taps);

  const double c1 = (opts.k1 * peak) * (opts.k1 * peak);
  const double c2 = (opts.k2 * peak) * (opts.k2 * peak);
  double sum_ssim = 0.0;
  double sum_cs = 0.0;
  const std::size_t n = mu_x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double mx = mu_x.values()[i];
    const double my = mu_y.values()[i];
    const double sxx = xx.values()[i] - mx * mx;
    const double syy = yy.values()[i] - my * my;
    const double sxy = xy.values()[i] - mx * my;
    const double cs = (2.0 * sxy + c2) / (sxx + syy + c2);
    const double l = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
    sum_ssim += l * cs;
    sum_cs += cs;
  }
  return {sum_ssim / static_cast<double>(n), sum_cs / static_cast<double>(n)};
}

double ssim(const LumaFrame& ref, const LumaFrame& dist,
            const SsimOptions& opts) {
  return ssim_stats(ref.plane(), dist.plane(), ref.max_value(), opts).ssim;
}

int ms_ssim_scale_count(int min_dim, const MsSsimOptions& opts) {
  int scales = 1;
  int dim = min_dim;
  while (scales < opts.max_scales) {
    const int next = (dim + 1) / 2;
    if (next < opts.ssim.window) break;
    dim = next;
    ++scales;
  }
  return scales;
}

Plane dyadic_downsample(const Plane& p) {
  const int ow = (p.width() + 1) / 2;
  const int oh = (p.height() + 1) / 2;
  Plane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      const int sx = 2 * x;
      const int sy = 2 * y;
      out(x, y) = 0.25 * (p.clamped(sx, sy) + p.clamped(sx + 1, sy) +
                          p.clamped(sx, sy + 1) + p.clamped(sx + 1, sy + 1));
    }
  }
  return out;
}

double ms_ssim(const LumaFrame& ref, const LumaFrame& dist,
               const MsSsimOptions& opts) {
  require_same_dims(ref.plane(), dist.plane(), "ms_ssim");
  const int scales =
      ms_ssim_scale_count(std::min(ref.width(), ref.height()), opts);
  double weight_sum = 0.0;
  for (int s = 0; s < scales; ++s) weight_sum += hvs::kMsSsimWeights[s];

  Plane x = ref.plane();
  Plane y = dist.plane();
  double result = 1.0;
  for (int s = 0; s < scales; ++s) {
    const SsimStats st = ssim_stats(x, y, ref.max_value(), opts.ssim);
    const double weight = hvs::kMsSsimWeights[s] / weight_sum;
    // Negative means (anti-correlated structure) have no real fractional
    // power; they are clamped to zero similarity.
    const double term = s + 1 == scales ? st.ssim : st.cs;
    result *= scales == 1 ? term : std::pow(std::max(term, 0.0), weight);
    if (s + 1 < scales) {
      x = dyadic_downsample(x);
      y = dyadic_downsample(y);
    }
  }
  return result;
}

double gmsd_constant(double peak, const GmsdOptions& opts) {
  const double scale = peak / 255.0;
  return opts.c_8bit * scale * scale;
}

double gmsd_planes(const Plane& u, const Plane& v, double c,
                   const GmsdOptions& opts) {
  require_same_dims(u, v, "gmsd");
  Plane mu, mv;
  if (opts.downsample) {
    mu = prewitt_map(dyadic_downsample(u));
    mv = prewitt_map(dyadic_downsample(v));
  } else {
    mu = prewitt_map(u);
    mv = prewitt_map(v);
  }
  std::vector<double> gms(mu.size());
  for (std::size_t i = 0; i < gms.size(); ++i) {
    const double a = mu.values()[i];
    const double b = mv.values()[i];
    gms[i] = (2.0 * a * b + c) / (a * a + b * b + c);
  }
  return population_std(gms);
}

double gmsd(const LumaFrame& ref, const LumaFrame& dist,
            const GmsdOptions& opts) {
  return gmsd_planes(ref.plane(), dist.plane(),
                     gmsd_constant(ref.max_value(), opts), opts);
}

double ws_psnr(const LumaFrame& ref, const LumaFrame& dist) {
  require_same_dims(ref.plane(), dist.plane(), "ws_psnr");
  const int w = ref.width();
  const int h = ref.height();
  double weighted = 0.0;
  double weight_total = 0.0;
  for (int y = 0; y < h; ++y) {
    const double weight = std::cos((y + 0.5 - h / 2.0) * kPi / h);
    double row_sum = 0.0;
    for (int x = 0; x < w; ++x) {
      const double d = ref(x, y) - dist(x, y);
      row_sum += d * d;
    }
    weighted += weight * row_sum;
    weight_total += weight * w;
  }
  return psnr_from_mse(weighted / weight_total, ref.max_value());
}

void fibonacci_direction(std::int64_t i, std::int64_t n, double& azimuth,
                         double& elevation) {
  static const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
  elevation = std::asin(std::clamp(z, -1.0, 1.0));
  azimuth = wrap_azimuth(std::fmod(golden_angle * static_cast<double>(i), 2.0 * kPi));
}

double s_psnr(const LumaFrame& ref, const LumaFrame& dist,
              std::int64_t n_points) {
  require_same_dims(ref.plane(), dist.plane(), "s_psnr");
  if (n_points < 1) fail(ErrorKind::kInvalidArgument, "s_psnr needs n_points >= 1");
  const int w = ref.width();
  const int h = ref.height();
  double sum = 0.0;
  for (std::int64_t i = 0; i < n_points; ++i) {
    double az = 0.0, el = 0.0;
    fibonacci_direction(i, n_points, az, el);
    const PixelCoord p = direction_to_erp_pixel({az, el}, w, h);
    int x = static_cast<int>(std::floor(p.x)) % w;
    if (x < 0) x += w;
    const int y = std::clamp(static_cast<int>(std::floor(p.y)), 0, h - 1);
    const double d = ref(x, y) - dist(x, y);
    sum += d * d;
  }
  return psnr_from_mse(sum / static_cast<double>(n_points), ref.max_value());
}

}  // namespace omnivq
