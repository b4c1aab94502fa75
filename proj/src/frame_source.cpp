// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/frame_source.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <png.h>

#include "omnivq/error.hpp"

namespace omnivq {
namespace {

namespace fs = std::filesystem;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

int bytes_per_sample(int bit_depth) { return bit_depth > 8 ? 2 : 1; }

std::uint16_t quantize(double v, double max_value) {
  return static_cast<std::uint16_t>(std::clamp(std::lround(v), 0L, static_cast<long>(max_value)));
}

// Decodes little-endian samples into a luma frame.
LumaFrame decode_luma(const std::vector<unsigned char>& bytes, int width, int height,
                      int bit_depth) {
  Plane plane(width, height);
  auto values = plane.values();
  const double max_value = static_cast<double>((1 << bit_depth) - 1);
  const bool wide = bit_depth > 8;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const unsigned v = wide ? bytes[2 * i] | (bytes[2 * i + 1] << 8) : bytes[i];
    if (v > max_value) {
      fail(ErrorKind::kParseError, "sample " + std::to_string(v) + " exceeds " +
                                       std::to_string(bit_depth) + "-bit range");
    }
    values[i] = static_cast<double>(v);
  }
  return LumaFrame(std::move(plane), bit_depth);
}

void encode_luma(const LumaFrame& frame, std::vector<unsigned char>& out) {
  const bool wide = frame.bit_depth() > 8;
  for (double v : frame.plane().values()) {
    const std::uint16_t q = quantize(v, frame.max_value());
    out.push_back(static_cast<unsigned char>(q & 0xFF));
    if (wide) out.push_back(static_cast<unsigned char>(q >> 8));
  }
}

void append_grey_chroma(const LumaFrame& frame, std::size_t chroma_samples,
                        std::vector<unsigned char>& out) {
  const std::uint16_t mid = static_cast<std::uint16_t>(1u << (frame.bit_depth() - 1));
  for (std::size_t i = 0; i < chroma_samples; ++i) {
    out.push_back(static_cast<unsigned char>(mid & 0xFF));
    if (frame.bit_depth() > 8) out.push_back(static_cast<unsigned char>(mid >> 8));
  }
}

std::size_t chroma420_samples(int width, int height) {
  return 2 * static_cast<std::size_t>((width + 1) / 2) * ((height + 1) / 2);
}

// Reads `count` bytes; returns how many were read.
std::size_t read_bytes(std::istream& in, std::vector<unsigned char>& buf, std::size_t count) {
  buf.resize(count);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count));
  return static_cast<std::size_t>(in.gcount());
}

void require_geometry(const FrameGeometry& g, const std::string& path) {
  if (g.width < 1 || g.height < 1 || g.bit_depth < 1 || g.bit_depth > 16) {
    fail(ErrorKind::kInvalidArgument, "raw input " + path + " needs width, height and bit depth");
  }
}

class PlanarSource : public FrameSource {
 public:
  PlanarSource(std::string path, int width, int height, int bit_depth,
               std::size_t chroma_samples, std::size_t expected_frames, bool y4m)
      : path_(std::move(path)),
        in_(path_, std::ios::binary),
        width_(width),
        height_(height),
        bit_depth_(bit_depth),
        chroma_bytes_(chroma_samples * bytes_per_sample(bit_depth)),
        expected_(expected_frames),
        y4m_(y4m) {
    if (!in_) fail(ErrorKind::kIoError, "cannot open " + path_);
  }

  std::istream& stream() { return in_; }

  std::optional<LumaFrame> next() override {
    if (expected_ > 0 && pos_ >= expected_) return std::nullopt;
    if (y4m_ && !read_frame_marker()) return end_of_input();
    const std::size_t luma_bytes =
        static_cast<std::size_t>(width_) * height_ * bytes_per_sample(bit_depth_);
    const std::size_t got = read_bytes(in_, buf_, luma_bytes);
    if (got == 0 && !y4m_) return end_of_input();
    if (got < luma_bytes) truncated();
    LumaFrame frame = decode_luma(buf_, width_, height_, bit_depth_);
    in_.ignore(static_cast<std::streamsize>(chroma_bytes_));
    if (static_cast<std::size_t>(in_.gcount()) < chroma_bytes_) truncated();
    ++pos_;
    return frame;
  }

  std::size_t position() const override { return pos_; }

 private:
  std::optional<LumaFrame> end_of_input() {
    if (expected_ > 0 && pos_ < expected_) {
      fail(ErrorKind::kTruncatedFile, path_ + ": input ends before frame " + std::to_string(pos_) +
                                          " (" + std::to_string(expected_) + " expected)");
    }
    return std::nullopt;
  }

  [[noreturn]] void truncated() {
    fail(ErrorKind::kTruncatedFile, path_ + ": frame " + std::to_string(pos_) + " is incomplete");
  }

  bool read_frame_marker() {
    std::string line;
    if (!std::getline(in_, line)) return false;
    if (line.rfind("FRAME", 0) != 0) {
      fail(ErrorKind::kParseError, path_ + ": expected FRAME marker before frame " +
                                       std::to_string(pos_));
    }
    return true;
  }

  std::string path_;
  std::ifstream in_;
  int width_, height_, bit_depth_;
  std::size_t chroma_bytes_;
  std::size_t expected_;
  bool y4m_;
  std::size_t pos_ = 0;
  std::vector<unsigned char> buf_;
};

std::unique_ptr<FrameSource> open_y4m(const std::string& path, const FrameGeometry& g) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) fail(ErrorKind::kIoError, "cannot open " + path);
  std::string header;
  std::getline(probe, header);
  std::istringstream tokens(header);
  std::string magic;
  tokens >> magic;
  if (magic != "YUV4MPEG2") fail(ErrorKind::kFormatUnknown, path + " is not a Y4M file");
  int width = 0, height = 0, bit_depth = 8;
  std::string colorspace = "420";
  for (std::string tok; tokens >> tok;) {
    if (tok[0] == 'W') width = std::atoi(tok.c_str() + 1);
    if (tok[0] == 'H') height = std::atoi(tok.c_str() + 1);
    if (tok[0] == 'C') colorspace = tok.substr(1);
  }
  if (width < 1 || height < 1) fail(ErrorKind::kParseError, path + ": Y4M header lacks W/H");
  const auto p = colorspace.find('p');
  if (p != std::string::npos && p + 1 < colorspace.size() &&
      std::isdigit(static_cast<unsigned char>(colorspace[p + 1]))) {
    bit_depth = std::atoi(colorspace.c_str() + p + 1);
  } else if (colorspace == "mono16") {
    bit_depth = 16;
  }
  std::size_t chroma = 0;
  if (colorspace.rfind("420", 0) == 0) {
    chroma = chroma420_samples(width, height);
  } else if (colorspace.rfind("422", 0) == 0) {
    chroma = 2 * static_cast<std::size_t>((width + 1) / 2) * height;
  } else if (colorspace.rfind("444", 0) == 0) {
    chroma = 2 * static_cast<std::size_t>(width) * height;
  } else if (colorspace.rfind("mono", 0) != 0) {
    fail(ErrorKind::kFormatUnknown, path + ": unsupported Y4M colourspace " + colorspace);
  }
  const auto offset = static_cast<std::streamoff>(header.size() + 1);
  auto source = std::make_unique<PlanarSource>(path, width, height, bit_depth, chroma,
                                               g.frame_count, true);
  source->stream().seekg(offset);
  return source;
}

class ImageDirectorySource : public FrameSource {
 public:
  ImageDirectorySource(std::vector<std::string> files, int bit_depth, std::size_t expected)
      : files_(std::move(files)), bit_depth_(bit_depth), expected_(expected) {}

  std::optional<LumaFrame> next() override {
    if (expected_ > 0 && pos_ >= expected_) return std::nullopt;
    if (pos_ >= files_.size()) {
      if (expected_ > 0) {
        fail(ErrorKind::kTruncatedFile, "image sequence ends before frame " +
                                            std::to_string(pos_) + " (" +
                                            std::to_string(expected_) + " expected)");
      }
      return std::nullopt;
    }
    const std::string& file = files_[pos_];
    LumaFrame frame = lower(fs::path(file).extension().string()) == ".png"
                          ? read_png(file, bit_depth_)
                          : read_pgm(file);
    ++pos_;
    return frame;
  }

  std::size_t position() const override { return pos_; }

 private:
  std::vector<std::string> files_;
  int bit_depth_;
  std::size_t expected_;
  std::size_t pos_ = 0;
};

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  FILE* file = nullptr;
  ~PngReadGuard() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (file) std::fclose(file);
  }
};

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  FILE* file = nullptr;
  ~PngWriteGuard() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (file) std::fclose(file);
  }
};

}  // namespace

std::string_view to_string(FrameFormat format) {
  switch (format) {
    case FrameFormat::kRawYuv420: return "yuv";
    case FrameFormat::kY4m: return "y4m";
    case FrameFormat::kImageDirectory: return "images";
  }
  return "yuv";
}

std::optional<LumaFrame> VectorFrameSource::next() {
  if (pos_ >= frames_.size()) return std::nullopt;
  // Hand the frame over so the source does not keep a second copy alive.
  return std::move(frames_[pos_++]);
}

FrameFormat detect_format(const std::string& path) {
  if (fs::is_directory(path)) return FrameFormat::kImageDirectory;
  const std::string ext = lower(fs::path(path).extension().string());
  if (ext == ".y4m") return FrameFormat::kY4m;
  if (ext == ".yuv") return FrameFormat::kRawYuv420;
  fail(ErrorKind::kFormatUnknown, "cannot tell the frame format of " + path);
}

std::vector<std::string> list_image_frames(const std::string& directory) {
  struct Entry {
    bool numbered;
    unsigned long long number;
    std::string name;
  };
  std::vector<Entry> entries;
  for (const auto& e : fs::directory_iterator(directory)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = lower(e.path().extension().string());
    if (ext != ".png" && ext != ".pgm") continue;
    const std::string stem = e.path().stem().string();
    auto end = stem.find_last_of("0123456789");
    Entry entry{false, 0, e.path().string()};
    if (end != std::string::npos) {
      auto begin = end;
      while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
      entry.numbered = true;
      entry.number = std::stoull(stem.substr(begin, end - begin + 1));
    }
    entries.push_back(std::move(entry));
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.numbered != b.numbered) return a.numbered;
    if (a.number != b.number) return a.number < b.number;
    return a.name < b.name;
  });
  std::vector<std::string> out;
  for (auto& e : entries) out.push_back(std::move(e.name));
  return out;
}

std::unique_ptr<FrameSource> open_frames(const std::string& path, const FrameGeometry& geometry) {
  if (!fs::exists(path)) fail(ErrorKind::kIoError, "no such file or directory: " + path);
  switch (detect_format(path)) {
    case FrameFormat::kY4m:
      return open_y4m(path, geometry);
    case FrameFormat::kRawYuv420:
      require_geometry(geometry, path);
      return std::make_unique<PlanarSource>(path, geometry.width, geometry.height,
                                            geometry.bit_depth,
                                            chroma420_samples(geometry.width, geometry.height),
                                            geometry.frame_count, false);
    case FrameFormat::kImageDirectory: {
      auto files = list_image_frames(path);
      if (files.empty()) fail(ErrorKind::kFormatUnknown, path + " holds no PNG or PGM frames");
      return std::make_unique<ImageDirectorySource>(std::move(files), geometry.bit_depth,
                                                    geometry.frame_count);
    }
  }
  fail(ErrorKind::kFormatUnknown, path);
}

std::vector<LumaFrame> read_all_frames(const std::string& path, const FrameGeometry& geometry) {
  auto source = open_frames(path, geometry);
  std::vector<LumaFrame> frames;
  while (auto f = source->next()) frames.push_back(std::move(*f));
  return frames;
}

void write_y4m(const std::string& path, const std::vector<LumaFrame>& frames, int fps) {
  if (frames.empty()) fail(ErrorKind::kInvalidArgument, "no frames to write");
  const LumaFrame& first = frames.front();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIoError, "cannot write " + path);
  out << "YUV4MPEG2 W" << first.width() << " H" << first.height() << " F" << fps
      << ":1 Ip A1:1 C" << (first.bit_depth() > 8 ? "420p" + std::to_string(first.bit_depth())
                                                   : std::string("420jpeg"))
      << "\n";
  std::vector<unsigned char> bytes;
  for (const auto& frame : frames) {
    bytes.clear();
    encode_luma(frame, bytes);
    append_grey_chroma(frame, chroma420_samples(frame.width(), frame.height()), bytes);
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) fail(ErrorKind::kIoError, "failed writing " + path);
}

void write_raw_yuv420(const std::string& path, const std::vector<LumaFrame>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIoError, "cannot write " + path);
  std::vector<unsigned char> bytes;
  for (const auto& frame : frames) {
    bytes.clear();
    encode_luma(frame, bytes);
    append_grey_chroma(frame, chroma420_samples(frame.width(), frame.height()), bytes);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) fail(ErrorKind::kIoError, "failed writing " + path);
}

void write_pgm(const std::string& path, const LumaFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIoError, "cannot write " + path);
  const auto max_value = static_cast<long>(frame.max_value());
  out << "P5\n" << frame.width() << " " << frame.height() << "\n" << max_value << "\n";
  for (double v : frame.plane().values()) {
    const std::uint16_t q = quantize(v, frame.max_value());
    if (max_value > 255) out.put(static_cast<char>(q >> 8));
    out.put(static_cast<char>(q & 0xFF));
  }
  if (!out) fail(ErrorKind::kIoError, "failed writing " + path);
}

LumaFrame read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIoError, "cannot open " + path);
  auto token = [&]() {
    std::string t;
    while (t.empty()) {
      int c = in.get();
      if (c == EOF) fail(ErrorKind::kParseError, path + ": truncated PGM header");
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      while (c != EOF && !std::isspace(c)) {
        t.push_back(static_cast<char>(c));
        c = in.get();
      }
    }
    return t;
  };
  if (token() != "P5") fail(ErrorKind::kFormatUnknown, path + " is not a binary PGM");
  const int width = std::stoi(token());
  const int height = std::stoi(token());
  const int max_value = std::stoi(token());
  if (width < 1 || height < 1 || max_value < 1 || max_value > 65535) {
    fail(ErrorKind::kParseError, path + ": bad PGM header");
  }
  int bit_depth = 1;
  while ((1 << bit_depth) - 1 < max_value) ++bit_depth;
  const int bps = max_value > 255 ? 2 : 1;
  std::vector<unsigned char> buf;
  const std::size_t need = static_cast<std::size_t>(width) * height * bps;
  if (read_bytes(in, buf, need) < need) fail(ErrorKind::kTruncatedFile, path + ": short PGM data");
  Plane plane(width, height);
  auto values = plane.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = bps == 2 ? (buf[2 * i] << 8) | buf[2 * i + 1] : buf[i];
  }
  return LumaFrame(std::move(plane), bit_depth);
}

LumaFrame read_png(const std::string& path, int bit_depth) {
  PngReadGuard g;
  g.file = std::fopen(path.c_str(), "rb");
  if (!g.file) fail(ErrorKind::kIoError, "cannot open " + path);
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, g.file) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    fail(ErrorKind::kFormatUnknown, path + " is not a PNG file");
  }
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  g.info = png_create_info_struct(g.png);
  if (!g.png || !g.info) fail(ErrorKind::kIoError, "libpng initialisation failed");
  if (setjmp(png_jmpbuf(g.png))) fail(ErrorKind::kParseError, path + ": corrupt PNG");
  png_init_io(g.png, g.file);
  png_set_sig_bytes(g.png, 8);
  png_read_info(g.png, g.info);

  const int color = png_get_color_type(g.png, g.info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(g.png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(g.png, g.info) < 8) {
    png_set_expand_gray_1_2_4_to_8(g.png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(g.png);
  if (color & PNG_COLOR_MASK_COLOR || color == PNG_COLOR_TYPE_PALETTE) {
    png_set_rgb_to_gray_fixed(g.png, 1, -1, -1);
  }
  int native_depth = png_get_bit_depth(g.png, g.info);
  png_color_8p sig_bit = nullptr;
  int significant = native_depth < 8 ? 8 : native_depth;
  if (png_get_sBIT(g.png, g.info, &sig_bit) && sig_bit && sig_bit->gray > 0 &&
      !(color & PNG_COLOR_MASK_COLOR)) {
    significant = sig_bit->gray;
  }
  png_read_update_info(g.png, g.info);
  const int width = static_cast<int>(png_get_image_width(g.png, g.info));
  const int height = static_cast<int>(png_get_image_height(g.png, g.info));
  native_depth = png_get_bit_depth(g.png, g.info);
  const std::size_t rowbytes = png_get_rowbytes(g.png, g.info);
  std::vector<unsigned char> data(rowbytes * height);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = data.data() + y * rowbytes;
  png_read_image(g.png, rows.data());

  const int depth = bit_depth > 0 ? bit_depth : (native_depth == 16 ? significant : 8);
  Plane plane(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const unsigned char* p = rows[y] + (native_depth == 16 ? 2 * x : x);
      plane(x, y) = native_depth == 16 ? (p[0] << 8) | p[1] : p[0];
    }
  }
  return LumaFrame(std::move(plane), depth);
}

void write_png(const std::string& path, const LumaFrame& frame) {
  PngWriteGuard g;
  g.file = std::fopen(path.c_str(), "wb");
  if (!g.file) fail(ErrorKind::kIoError, "cannot write " + path);
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  g.info = png_create_info_struct(g.png);
  if (!g.png || !g.info) fail(ErrorKind::kIoError, "libpng initialisation failed");
  if (setjmp(png_jmpbuf(g.png))) fail(ErrorKind::kIoError, "failed writing " + path);
  png_init_io(g.png, g.file);
  const bool wide = frame.bit_depth() > 8;
  png_set_IHDR(g.png, g.info, frame.width(), frame.height(), wide ? 16 : 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_color_8 sig_bit{};
  sig_bit.gray = static_cast<png_byte>(frame.bit_depth());
  png_set_sBIT(g.png, g.info, &sig_bit);
  png_write_info(g.png, g.info);
  std::vector<unsigned char> row(static_cast<std::size_t>(frame.width()) * (wide ? 2 : 1));
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const std::uint16_t q = quantize(frame(x, y), frame.max_value());
      if (wide) {
        row[2 * x] = static_cast<unsigned char>(q >> 8);
        row[2 * x + 1] = static_cast<unsigned char>(q & 0xFF);
      } else {
        row[x] = static_cast<unsigned char>(q);
      }
    }
    png_write_row(g.png, row.data());
  }
  png_write_end(g.png, nullptr);
}

}  // namespace omnivq
