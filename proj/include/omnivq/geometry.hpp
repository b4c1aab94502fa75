// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "omnivq/frame.hpp"

namespace omnivq {

inline constexpr double kPi = 3.14159265358979323846;

// Viewing direction on the sphere. azimuth in [-pi, pi), elevation in
// [-pi/2, pi/2]; (0, 0) maps to the centre of the equirectangular frame.
struct Direction {
  double azimuth = 0.0;
  double elevation = 0.0;
};

// Continuous pixel coordinates. Pixel (i, j) covers [i, i+1) x [j, j+1), so
// its centre is at (i + 0.5, j + 0.5).
struct PixelCoord {
  double x = 0.0;
  double y = 0.0;
};

// One gnomonic viewport: tangent direction, angular extent and raster size.
struct ViewportSpec {
  Direction center;
  double fov_h = 0.0;  // radians, in (0, pi)
  double fov_v = 0.0;  // radians, in (0, pi)
  int width = 0;
  int height = 0;
};

void validate(const ViewportSpec& spec);

enum class PatternKind { kUniform, kTropical, kEquatorial };

std::string_view to_string(PatternKind kind);
PatternKind parse_pattern_kind(std::string_view name);

struct CollageGrid {
  int columns = 0;
  int rows = 0;
};

// Fixed direction grids:
//   uniform    elevations {+60, +30, 0, -30, -60} x azimuths {0, 72, ..., 288}
//   tropical   elevations {+30, -30} x azimuths every 45 degrees
//   equatorial elevation 0 x azimuths every 40 degrees
// Specs are ordered row by row from the northernmost ring to the southernmost
// one, azimuths ascending within a ring. That is also the collage tiling
// order, so ring r occupies collage row r (uniform 5x5, tropical 8x2,
// equatorial 9x1).
struct SamplingPattern {
  PatternKind kind = PatternKind::kUniform;
  std::vector<ViewportSpec> specs;
};

SamplingPattern make_pattern(PatternKind kind, double fov_deg, int vp_width,
                             int vp_height);

CollageGrid collage_grid(PatternKind kind);

// Viewport edge length whose angular sampling density matches the ERP
// equator: round(fov / 360 * erp_width), at least 2.
int default_viewport_size(double fov_deg, int erp_width);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

// Wraps an azimuth into [-pi, pi).
double wrap_azimuth(double azimuth);

Direction viewport_pixel_to_direction(const ViewportSpec& spec, PixelCoord px);

// Inverse of viewport_pixel_to_direction. Directions behind the tangent plane
// have no image; the result is then non-finite.
PixelCoord direction_to_viewport_pixel(const ViewportSpec& spec, Direction dir);

PixelCoord direction_to_erp_pixel(Direction dir, int erp_width, int erp_height);

// Bilinear sample of an ERP plane at continuous coordinates, wrapping
// horizontally and clamping vertically.
double sample_erp_bilinear(const Plane& erp, PixelCoord px);

LumaFrame render_viewport(const LumaFrame& erp, const ViewportSpec& spec);

LumaFrame render_collage(const LumaFrame& erp, const SamplingPattern& pattern);

}  // namespace omnivq
