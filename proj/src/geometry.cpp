// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "omnivq/error.hpp"

namespace omnivq {
namespace {

struct Vec3 {
  double x, y, z;
};

Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// World frame: +z at (az 0, el 0), +x towards az = +90 deg, +y to the north
// pole.
Vec3 to_unit(Direction d) {
  const double ce = std::cos(d.elevation);
  return {ce * std::sin(d.azimuth), std::sin(d.elevation),
          ce * std::cos(d.azimuth)};
}

Direction from_unit(Vec3 v) {
  const double n = std::sqrt(dot(v, v));
  const double y = std::clamp(v.y / n, -1.0, 1.0);
  return {wrap_azimuth(std::atan2(v.x, v.z)), std::asin(y)};
}

// Camera basis at the tangent point: forward, right (increasing azimuth) and
// up (increasing elevation).
struct Basis {
  Vec3 forward, right, up;
};

Basis camera_basis(Direction c) {
  const double sa = std::sin(c.azimuth), ca = std::cos(c.azimuth);
  const double se = std::sin(c.elevation), ce = std::cos(c.elevation);
  return {{ce * sa, se, ce * ca}, {ca, 0.0, -sa}, {-se * sa, ce, -se * ca}};
}

}  // namespace

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::kUniform: return "uniform";
    case PatternKind::kTropical: return "tropical";
    case PatternKind::kEquatorial: return "equatorial";
  }
  return "uniform";
}

PatternKind parse_pattern_kind(std::string_view name) {
  if (name == "uniform") return PatternKind::kUniform;
  if (name == "tropical") return PatternKind::kTropical;
  if (name == "equatorial") return PatternKind::kEquatorial;
  fail(ErrorKind::kInvalidArgument,
       "unknown sampling pattern '" + std::string(name) + "'");
}

double deg_to_rad(double deg) { return deg * kPi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

double wrap_azimuth(double azimuth) {
  double a = std::fmod(azimuth + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  a -= kPi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (a >= kPi) a -= 2.0 * kPi;
  return a;
}

void validate(const ViewportSpec& spec) {
  if (!(spec.fov_h > 0.0 && spec.fov_h < kPi && spec.fov_v > 0.0 &&
        spec.fov_v < kPi)) {
    fail(ErrorKind::kInvalidFov, "viewport field of view must lie in (0, pi)");
  }
  if (spec.width < 2 || spec.height < 2) {
    fail(ErrorKind::kInvalidArgument, "viewport must be at least 2x2 pixels");
  }
}

CollageGrid collage_grid(PatternKind kind) {
  switch (kind) {
    case PatternKind::kUniform: return {5, 5};
    case PatternKind::kTropical: return {8, 2};
    case PatternKind::kEquatorial: return {9, 1};
  }
  return {};
}

SamplingPattern make_pattern(PatternKind kind, double fov_deg, int vp_width,
                             int vp_height) {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    fail(ErrorKind::kInvalidFov,
         "field of view " + std::to_string(fov_deg) + " outside (0, 180)");
  }
  if (vp_width < 2 || vp_height < 2) {
    fail(ErrorKind::kInvalidArgument, "viewport must be at least 2x2 pixels");
  }

  std::vector<double> elevations;
  double azimuth_step = 0.0;
  int per_ring = 0;
  switch (kind) {
    case PatternKind::kUniform:
      elevations = {60.0, 30.0, 0.0, -30.0, -60.0};
      azimuth_step = 72.0;
      per_ring = 5;
      break;
    case PatternKind::kTropical:
      elevations = {30.0, -30.0};
      azimuth_step = 45.0;
      per_ring = 8;
      break;
    case PatternKind::kEquatorial:
      elevations = {0.0};
      azimuth_step = 40.0;
      per_ring = 9;
      break;
  }

  SamplingPattern pattern;
  pattern.kind = kind;
  const double fov = deg_to_rad(fov_deg);
  for (double el : elevations) {
    for (int i = 0; i < per_ring; ++i) {
      ViewportSpec spec;
      spec.center = {wrap_azimuth(deg_to_rad(azimuth_step * i)),
                     deg_to_rad(el)};
      spec.fov_h = fov;
      spec.fov_v = fov;
      spec.width = vp_width;
      spec.height = vp_height;
      pattern.specs.push_back(spec);
    }
  }
  return pattern;
}

int default_viewport_size(double fov_deg, int erp_width) {
  const int size =
      static_cast<int>(std::lround(fov_deg / 360.0 * erp_width));
  return std::max(size, 2);
}

Direction viewport_pixel_to_direction(const ViewportSpec& spec,
                                      PixelCoord px) {
  const double x =
      (2.0 * (px.x + 0.5) / spec.width - 1.0) * std::tan(spec.fov_h / 2.0);
  const double y =
      (1.0 - 2.0 * (px.y + 0.5) / spec.height) * std::tan(spec.fov_v / 2.0);
  const Basis b = camera_basis(spec.center);
  return from_unit(x * b.right + y * b.up + b.forward);
}

PixelCoord direction_to_viewport_pixel(const ViewportSpec& spec,
                                       Direction dir) {
  const Basis b = camera_basis(spec.center);
  const Vec3 v = to_unit(dir);
  const double depth = dot(v, b.forward);
  if (depth <= 0.0) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const double x = dot(v, b.right) / depth / std::tan(spec.fov_h / 2.0);
  const double y = dot(v, b.up) / depth / std::tan(spec.fov_v / 2.0);
  return {(x + 1.0) * spec.width / 2.0 - 0.5,
          (1.0 - y) * spec.height / 2.0 - 0.5};
}

PixelCoord direction_to_erp_pixel(Direction dir, int erp_width,
                                  int erp_height) {
  const double az = wrap_azimuth(dir.azimuth);
  return {(az / (2.0 * kPi) + 0.5) * erp_width,
          (0.5 - dir.elevation / kPi) * erp_height};
}

double sample_erp_bilinear(const Plane& erp, PixelCoord px) {
  const int w = erp.width();
  const int h = erp.height();
  // Sample positions are pixel centres; shift to index space.
  const double fx = px.x - 0.5;
  const double fy = std::clamp(px.y - 0.5, 0.0, static_cast<double>(h - 1));
  const double x0f = std::floor(fx);
  const double y0f = std::floor(fy);
  const double tx = fx - x0f;
  const double ty = fy - y0f;

  int x0 = static_cast<int>(x0f) % w;
  if (x0 < 0) x0 += w;
  const int x1 = (x0 + 1) % w;
  const int y0 = static_cast<int>(y0f);
  const int y1 = std::min(y0 + 1, h - 1);

  const double top = erp(x0, y0) + tx * (erp(x1, y0) - erp(x0, y0));
  const double bottom = erp(x0, y1) + tx * (erp(x1, y1) - erp(x0, y1));
  return top + ty * (bottom - top);
}

LumaFrame render_viewport(const LumaFrame& erp, const ViewportSpec& spec) {
  validate(spec);
  if (erp.width() == 0 || erp.height() == 0) {
    fail(ErrorKind::kInvalidArgument, "cannot render from an empty frame");
  }
  const double hi = erp.max_value();
  Plane out(spec.width, spec.height);
  for (int j = 0; j < spec.height; ++j) {
    for (int i = 0; i < spec.width; ++i) {
      const Direction d = viewport_pixel_to_direction(spec, {double(i), double(j)});
      const PixelCoord p = direction_to_erp_pixel(d, erp.width(), erp.height());
      // Bilinear weights can overshoot the convex hull by rounding only.
      out(i, j) = std::clamp(sample_erp_bilinear(erp.plane(), p), 0.0, hi);
    }
  }
  return LumaFrame(std::move(out), erp.bit_depth());
}

LumaFrame render_collage(const LumaFrame& erp, const SamplingPattern& pattern) {
  if (pattern.specs.empty()) {
    fail(ErrorKind::kInvalidArgument, "empty sampling pattern");
  }
  const CollageGrid grid = collage_grid(pattern.kind);
  if (static_cast<std::size_t>(grid.columns * grid.rows) !=
      pattern.specs.size()) {
    fail(ErrorKind::kInvalidArgument,
         "pattern size does not match its collage grid");
  }
  const int vw = pattern.specs.front().width;
  const int vh = pattern.specs.front().height;
  Plane out(vw * grid.columns, vh * grid.rows);
  for (std::size_t k = 0; k < pattern.specs.size(); ++k) {
    const ViewportSpec& spec = pattern.specs[k];
    if (spec.width != vw || spec.height != vh) {
      fail(ErrorKind::kInvalidArgument,
           "collage requires equally sized viewports");
    }
    const LumaFrame tile = render_viewport(erp, spec);
    const int ox = static_cast<int>(k % grid.columns) * vw;
    const int oy = static_cast<int>(k / grid.columns) * vh;
    for (int j = 0; j < vh; ++j) {
      for (int i = 0; i < vw; ++i) out(ox + i, oy + j) = tile(i, j);
    }
  }
  return LumaFrame(std::move(out), erp.bit_depth());
}

}  // namespace omnivq
