// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <array>

// Constant tables for PSNR-HVS and PSNR-HVS-M. These are the coefficient
// tables of the reference MATLAB implementation (psnrhvsm.m) by
// N. Ponomarenko et al., accompanying
//   K. Egiazarian et al., "New full-reference quality metrics based on HVS",
//   VPQM 2006 (CSF weights), and
//   N. Ponomarenko et al., "On between-coefficient contrast masking of DCT
//   basis functions", VPQM 2007 (masking weights).
// Both tables are row-major over (vertical frequency, horizontal frequency).
// Every entry of kCsfWeights equals 25.735092 / Q and every entry of
// kMaskWeights equals (10 / Q)^2, with Q the JPEG luminance quantization
// table; the unit tests check that relation.
//
// Any edit here changes feature_version_hash() and invalidates feature caches.

namespace omnivq::hvs {

inline constexpr std::array<double, 64> kCsfWeights = {
    1.608443, 2.339554, 2.573509, 1.608443, 1.072295, 0.643377, 0.504610, 0.421887,
    2.144591, 2.144591, 1.838221, 1.354478, 0.989811, 0.443708, 0.428918, 0.467911,
    1.838221, 1.979622, 1.608443, 1.072295, 0.643377, 0.451493, 0.372972, 0.459555,
    1.838221, 1.513829, 1.169777, 0.887417, 0.504610, 0.295806, 0.321689, 0.415082,
    1.429727, 1.169777, 0.695543, 0.459555, 0.378457, 0.236102, 0.249855, 0.334222,
    1.072295, 0.735288, 0.467911, 0.402111, 0.317717, 0.247453, 0.227744, 0.279729,
    0.525206, 0.402111, 0.329937, 0.295806, 0.249855, 0.212687, 0.214459, 0.254803,
    0.357432, 0.279729, 0.270896, 0.262603, 0.229778, 0.257351, 0.249855, 0.259950};

inline constexpr std::array<double, 64> kMaskWeights = {
    0.390625, 0.826446, 1.000000, 0.390625, 0.173611, 0.062500, 0.038447, 0.026874,
    0.694444, 0.694444, 0.510204, 0.277008, 0.147929, 0.029727, 0.027778, 0.033058,
    0.510204, 0.591716, 0.390625, 0.173611, 0.062500, 0.030779, 0.021004, 0.031888,
    0.510204, 0.346021, 0.206612, 0.118906, 0.038447, 0.013212, 0.015625, 0.026015,
    0.308642, 0.206612, 0.073046, 0.031888, 0.021626, 0.008417, 0.009426, 0.016866,
    0.173611, 0.081633, 0.033058, 0.024414, 0.015242, 0.009246, 0.007831, 0.011815,
    0.041649, 0.024414, 0.016437, 0.013212, 0.009426, 0.006830, 0.006944, 0.009803,
    0.019290, 0.011815, 0.011080, 0.010412, 0.007972, 0.010000, 0.009426, 0.010203};

// MS-SSIM scale exponents, finest scale first.
inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001,
                                                         0.2363, 0.1333};

}  // namespace omnivq::hvs
