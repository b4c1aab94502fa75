// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omnivq/frame.hpp"

namespace omnivq {

enum class FrameFormat { kRawYuv420, kY4m, kImageDirectory };

std::string_view to_string(FrameFormat format);

// Geometry for inputs that do not carry their own header (raw YUV, images).
// Samples wider than 8 bits are 16-bit little-endian in raw files.
struct FrameGeometry {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  int frame_count = 0;  // 0 = read until end of input
};

// Streaming luma reader. Only the frame being returned is held in memory.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  // Next luma frame, or nullopt at the end of the sequence.
  virtual std::optional<LumaFrame> next() = 0;
  // Frames returned so far.
  virtual std::size_t position() const = 0;
};

// Frames held in memory; used by tests and the synthetic generator.
class VectorFrameSource : public FrameSource {
 public:
  explicit VectorFrameSource(std::vector<LumaFrame> frames) : frames_(std::move(frames)) {}
  std::optional<LumaFrame> next() override;
  std::size_t position() const override { return pos_; }

 private:
  std::vector<LumaFrame> frames_;
  std::size_t pos_ = 0;
};

// ".y4m" -> Y4M, ".yuv" -> raw, directory -> numbered images.
FrameFormat detect_format(const std::string& path);

// Throws format-unknown, io-error; reading past a short frame throws
// truncated-file naming the frame index.
std::unique_ptr<FrameSource> open_frames(const std::string& path,
                                         const FrameGeometry& geometry);

std::vector<LumaFrame> read_all_frames(const std::string& path,
                                       const FrameGeometry& geometry);

// Numbered image files of a directory in numeric order of the last digit
// run in each file name (frame_2 before frame_10).
std::vector<std::string> list_image_frames(const std::string& directory);

// Writers. Chroma planes are filled with mid-grey.
void write_y4m(const std::string& path, const std::vector<LumaFrame>& frames,
               int fps = 30);
void write_raw_yuv420(const std::string& path, const std::vector<LumaFrame>& frames);
void write_pgm(const std::string& path, const LumaFrame& frame);
void write_png(const std::string& path, const LumaFrame& frame);

LumaFrame read_pgm(const std::string& path);
LumaFrame read_png(const std::string& path, int bit_depth = 0);

}  // namespace omnivq
