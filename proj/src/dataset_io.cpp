// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "omnivq/error.hpp"
#include "omnivq/hvs_tables.hpp"
#include "omnivq/temporal_metrics.hpp"

namespace omnivq {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr int kCacheSchemaVersion = 1;
constexpr const char* kFeatureCodeVersion = "omnivq-features-1";

Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParseError, what + ": " + e.what());
  }
}

template <typename T>
T required(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) {
    fail(ErrorKind::kMissingField, where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(ErrorKind::kParseError, where + ": field '" + key + "' has the wrong type");
  }
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  const fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path.lexically_normal().string();
  return (fs::path(base_dir) / path).lexically_normal().string();
}

double parse_double(const std::string& cell, const std::string& where) {
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::kParseError, where + ": not a number '" + cell + "'");
  }
}

int parse_int(const std::string& cell, const std::string& where) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::kParseError, where + ": not an integer '" + cell + "'");
  }
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void fnv1a(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
}

template <std::size_t N>
void hash_table(std::uint64_t& h, const std::array<double, N>& table) {
  for (double v : table) fnv1a(h, format_double(v) + ";");
}

}  // namespace

std::string_view to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kProjection: return "projection";
    case FeatureMode::kCollage: return "collage";
    case FeatureMode::kPerViewport: return "vp";
  }
  return "vp";
}

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "projection" || name == "proj") return FeatureMode::kProjection;
  if (name == "collage") return FeatureMode::kCollage;
  if (name == "vp" || name == "per_viewport") return FeatureMode::kPerViewport;
  fail(ErrorKind::kInvalidArgument, "unknown feature mode '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Text helpers

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIoError, "cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::kIoError, "failed writing " + path);
}

// ---------------------------------------------------------------------------
// Manifest

bool valid_video_id(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
  });
}

DatasetManifest parse_manifest(std::string_view text, const std::string& base_dir,
                               ManifestMode mode, bool check_paths) {
  const Json j = parse_json(text, "manifest");
  if (!j.is_object() || !j.contains("videos") || !j.at("videos").is_array()) {
    fail(ErrorKind::kMissingField, "manifest: missing array 'videos'");
  }
  DatasetManifest m;
  std::set<std::string> seen;
  std::size_t index = 0;
  for (const auto& v : j.at("videos")) {
    const std::string where = "manifest entry " + std::to_string(index++);
    VideoEntry e;
    e.video_id = required<std::string>(v, "video_id", where);
    const std::string named = "manifest entry '" + e.video_id + "'";
    if (!valid_video_id(e.video_id)) {
      fail(ErrorKind::kInvalidArgument, named + ": video_id may only use [A-Za-z0-9._-]");
    }
    if (!seen.insert(e.video_id).second) {
      fail(ErrorKind::kDuplicateId, "manifest: duplicate video_id '" + e.video_id + "'");
    }
    e.group_id = required<std::string>(v, "group_id", named);
    if (e.group_id.empty()) fail(ErrorKind::kMissingField, named + ": empty group_id");
    e.reference_path = resolve(base_dir, required<std::string>(v, "reference_path", named));
    e.distorted_path = resolve(base_dir, required<std::string>(v, "distorted_path", named));
    e.frame_count = required<int>(v, "frame_count", named);
    e.width = required<int>(v, "width", named);
    e.height = required<int>(v, "height", named);
    e.bit_depth = v.contains("bit_depth") ? required<int>(v, "bit_depth", named) : 8;
    if (v.contains("dmos") && !v.at("dmos").is_null()) {
      e.dmos = required<double>(v, "dmos", named);
    } else if (mode == ManifestMode::kTraining) {
      fail(ErrorKind::kMissingField, named + ": missing field 'dmos'");
    }
    if (v.contains("projection")) e.projection = required<std::string>(v, "projection", named);
    if (e.projection != "erp") {
      fail(ErrorKind::kInvalidArgument, named + ": unsupported projection '" + e.projection + "'");
    }
    if (e.frame_count < 1 || e.width < 1 || e.height < 1 || e.bit_depth < 1 ||
        e.bit_depth > 16) {
      fail(ErrorKind::kInvalidArgument, named + ": bad frame_count/width/height/bit_depth");
    }
    if (check_paths) {
      for (const auto* p : {&e.reference_path, &e.distorted_path}) {
        if (!fs::exists(*p)) fail(ErrorKind::kDanglingPath, named + ": no such file " + *p);
      }
    }
    if (e.width != 2 * e.height) {
      m.warnings.push_back(named + ": " + std::to_string(e.width) + "x" +
                           std::to_string(e.height) + " is not a 2:1 equirectangular frame");
    }
    m.videos.push_back(std::move(e));
  }
  return m;
}

DatasetManifest load_manifest(const std::string& path, ManifestMode mode) {
  if (!fs::exists(path)) fail(ErrorKind::kIoError, "no such manifest: " + path);
  DatasetManifest m =
      parse_manifest(read_text_file(path), fs::path(path).parent_path().string(), mode);
  m.path = path;
  return m;
}

std::string manifest_to_json(const DatasetManifest& manifest, const std::string& base_dir) {
  Json videos = Json::array();
  for (const auto& e : manifest.videos) {
    auto rel = [&](const std::string& p) {
      return base_dir.empty() ? p : fs::path(p).lexically_relative(base_dir).string();
    };
    Json v;
    v["video_id"] = e.video_id;
    v["group_id"] = e.group_id;
    v["reference_path"] = rel(e.reference_path);
    v["distorted_path"] = rel(e.distorted_path);
    v["frame_count"] = e.frame_count;
    v["width"] = e.width;
    v["height"] = e.height;
    v["bit_depth"] = e.bit_depth;
    if (e.dmos) {
      v["dmos"] = *e.dmos;
    } else {
      v["dmos"] = nullptr;
    }
    v["projection"] = e.projection;
    videos.push_back(v);
  }
  Json j;
  j["videos"] = videos;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Feature computation

void validate(const FeatureConfig& cfg) {
  if (cfg.features.empty()) fail(ErrorKind::kInvalidArgument, "empty feature list");
  std::set<FeatureId> unique(cfg.features.begin(), cfg.features.end());
  if (unique.size() != cfg.features.size()) {
    fail(ErrorKind::kInvalidArgument, "feature list contains duplicates");
  }
  for (FeatureId id : cfg.features) {
    if (requires_erp(id) && cfg.mode != FeatureMode::kProjection) {
      fail(ErrorKind::kInvalidArgument, std::string(feature_name(id)) +
                                            " is defined on ERP frames only (mode projection)");
    }
  }
  if (cfg.mode != FeatureMode::kProjection && !(cfg.fov_deg > 0.0 && cfg.fov_deg < 180.0)) {
    fail(ErrorKind::kInvalidFov, "field of view must lie in (0, 180) degrees");
  }
  if (cfg.vp_width < 0 || cfg.vp_height < 0 || cfg.vp_width == 1 || cfg.vp_height == 1) {
    fail(ErrorKind::kInvalidArgument, "viewport size must be 0 (default) or >= 2");
  }
  if (cfg.sphere_samples < 1) fail(ErrorKind::kInvalidArgument, "sphere_samples must be >= 1");
}

std::string feature_version_hash() {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  fnv1a(h, kFeatureCodeVersion);
  hash_table(h, hvs::kCsfWeights);
  hash_table(h, hvs::kMaskWeights);
  hash_table(h, hvs::kMsSsimWeights);
  const SsimOptions ssim;
  const GmsdOptions gmsd;
  const std::array<double, 8> constants = {kPsnrCapDb, kStaticTiEpsilon, kRelativeTiCap,
                                           static_cast<double>(ssim.window), ssim.sigma,
                                           ssim.k1, ssim.k2, gmsd.c_8bit};
  hash_table(h, constants);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Provenance make_provenance(const FeatureConfig& cfg, int erp_width) {
  Provenance p;
  p.mode = cfg.mode;
  p.features = cfg.features;
  p.feature_version = feature_version_hash();
  if (cfg.mode == FeatureMode::kProjection) {
    p.pattern = "none";
    return p;
  }
  p.pattern = std::string(to_string(cfg.pattern));
  p.fov_deg = cfg.fov_deg;
  const int def = default_viewport_size(cfg.fov_deg, erp_width);
  p.vp_width = cfg.vp_width > 0 ? cfg.vp_width : def;
  p.vp_height = cfg.vp_height > 0 ? cfg.vp_height : p.vp_width;
  return p;
}

SurfaceRenderer make_surface_renderer(const FeatureConfig& cfg, int erp_width) {
  if (cfg.mode == FeatureMode::kProjection) {
    return [](const LumaFrame& erp) { return std::vector<LumaFrame>{erp}; };
  }
  const Provenance p = make_provenance(cfg, erp_width);
  const SamplingPattern pattern = make_pattern(cfg.pattern, cfg.fov_deg, p.vp_width, p.vp_height);
  if (cfg.mode == FeatureMode::kCollage) {
    return [pattern](const LumaFrame& erp) {
      return std::vector<LumaFrame>{render_collage(erp, pattern)};
    };
  }
  return [pattern](const LumaFrame& erp) {
    std::vector<LumaFrame> out;
    out.reserve(pattern.specs.size());
    for (const auto& spec : pattern.specs) out.push_back(render_viewport(erp, spec));
    return out;
  };
}

namespace {

struct FrameLoop {
  FrameSource& ref;
  FrameSource& dist;
  const FeatureConfig& cfg;
  const VideoMeta& meta;
  const FrameObserver& on_frame_done;
  std::optional<std::pair<int, int>> expected_dims;

  // Builds the renderer and provenance from the first ERP frame.
  std::function<std::pair<SurfaceRenderer, Provenance>(const LumaFrame&)> setup;

  FeatureTensor run() {
    validate(cfg);
    FeatureTensor t;
    t.video_id = meta.video_id;
    t.group_id = meta.group_id;
    t.dmos = meta.dmos;
    const GmsdOptions gmsd_opts{GmsdOptions{}.c_8bit, cfg.gmsd_downsample};
    SurfaceRenderer renderer;
    std::vector<LumaFrame> prev_ref, prev_dist;
    int width = 0, height = 0, depth = 0;
    int f = 0;
    for (;; ++f) {
      std::optional<LumaFrame> r = ref.next();
      std::optional<LumaFrame> d = dist.next();
      if (!r && !d) break;
      if (!r || !d) {
        fail(ErrorKind::kFrameCountMismatch,
             meta.video_id + ": " + (r ? "distorted" : "reference") +
                 " sequence ends after " + std::to_string(f) + " frames");
      }
      if (r->width() != d->width() || r->height() != d->height() ||
          r->bit_depth() != d->bit_depth()) {
        fail(ErrorKind::kDimensionMismatch,
             meta.video_id + ": reference and distorted frames differ in size or bit depth");
      }
      if (f == 0) {
        width = r->width();
        height = r->height();
        depth = r->bit_depth();
        if (expected_dims && (width != expected_dims->first || height != expected_dims->second)) {
          fail(ErrorKind::kDimensionMismatch,
               meta.video_id + ": frames are " + std::to_string(width) + "x" +
                   std::to_string(height) + ", manifest says " +
                   std::to_string(expected_dims->first) + "x" +
                   std::to_string(expected_dims->second));
        }
        auto [rend, prov] = setup(*r);
        renderer = std::move(rend);
        t.provenance = std::move(prov);
      } else if (r->width() != width || r->height() != height || r->bit_depth() != depth) {
        fail(ErrorKind::kDimensionMismatch,
             meta.video_id + ": frame " + std::to_string(f) + " changes size or bit depth");
      }

      std::vector<LumaFrame> rs = renderer(*r);
      std::vector<LumaFrame> ds = renderer(*d);
      r.reset();
      d.reset();
      if (f == 0) t.viewports = static_cast<int>(rs.size());

      for (std::size_t n = 0; n < rs.size(); ++n) {
        const LumaFrame& rc = rs[n];
        const LumaFrame& dc = ds[n];
        std::optional<HvsPsnr> hvs;
        for (FeatureId id : cfg.features) {
          double v = 0.0;
          switch (id) {
            case FeatureId::kSA: v = spatial_activity(rc, dc); break;
            case FeatureId::kPSNR: v = psnr(rc, dc); break;
            case FeatureId::kPSNR_HVS:
              if (!hvs) hvs = psnr_hvs_pair(rc, dc);
              v = hvs->psnr_hvs;
              break;
            case FeatureId::kPSNR_HVS_M:
              if (!hvs) hvs = psnr_hvs_pair(rc, dc);
              v = hvs->psnr_hvs_m;
              break;
            case FeatureId::kSSIM: v = ssim(rc, dc); break;
            case FeatureId::kMS_SSIM: v = ms_ssim(rc, dc); break;
            case FeatureId::kGMSD: v = gmsd(rc, dc, gmsd_opts); break;
            case FeatureId::kR_TI:
              if (f > 0) v = relative_ti({rc, prev_ref[n], dc, prev_dist[n]});
              break;
            case FeatureId::kT_GMSD:
              if (f > 0) v = temporal_gmsd({rc, prev_ref[n], dc, prev_dist[n]}, gmsd_opts);
              break;
            case FeatureId::kWS_PSNR: v = ws_psnr(rc, dc); break;
            case FeatureId::kS_PSNR: v = s_psnr(rc, dc, cfg.sphere_samples); break;
          }
          if (!std::isfinite(v)) {
            fail(ErrorKind::kNonFiniteInput, meta.video_id + ": non-finite " +
                                                 std::string(feature_name(id)) + " at frame " +
                                                 std::to_string(f));
          }
          t.values.push_back(v);
        }
      }
      prev_ref = std::move(rs);
      prev_dist = std::move(ds);
      t.frames = f + 1;
      if (on_frame_done) on_frame_done(f);
    }
    if (f == 0) fail(ErrorKind::kEmptyTensor, meta.video_id + ": no frames");
    return t;
  }
};

}  // namespace

FeatureTensor compute_features(FrameSource& ref, FrameSource& dist, const FeatureConfig& cfg,
                               const VideoMeta& meta, const FrameObserver& on_frame_done) {
  FrameLoop loop{ref, dist, cfg, meta, on_frame_done, std::nullopt, {}};
  loop.setup = [&cfg](const LumaFrame& erp) {
    return std::make_pair(make_surface_renderer(cfg, erp.width()),
                          make_provenance(cfg, erp.width()));
  };
  return loop.run();
}

FeatureTensor compute_features(FrameSource& ref, FrameSource& dist,
                               const SurfaceRenderer& renderer, const FeatureConfig& cfg,
                               const Provenance& provenance, const VideoMeta& meta,
                               const FrameObserver& on_frame_done) {
  FrameLoop loop{ref, dist, cfg, meta, on_frame_done, std::nullopt, {}};
  loop.setup = [&](const LumaFrame&) { return std::make_pair(renderer, provenance); };
  return loop.run();
}

FeatureTensor compute_features(const VideoEntry& entry, const FeatureConfig& cfg,
                               const FrameObserver& on_frame_done) {
  auto ref = open_frames(entry.reference_path, entry.geometry());
  auto dist = open_frames(entry.distorted_path, entry.geometry());
  const VideoMeta meta{entry.video_id, entry.group_id, entry.dmos};
  FrameLoop loop{*ref, *dist, cfg, meta, on_frame_done,
                 std::make_pair(entry.width, entry.height), {}};
  loop.setup = [&cfg](const LumaFrame& erp) {
    return std::make_pair(make_surface_renderer(cfg, erp.width()),
                          make_provenance(cfg, erp.width()));
  };
  return loop.run();
}

// ---------------------------------------------------------------------------
// Feature cache

std::string cache_csv_path(const std::string& dir, const std::string& video_id) {
  return (fs::path(dir) / (video_id + ".features.csv")).string();
}

std::string cache_sidecar_path(const std::string& dir, const std::string& video_id) {
  return (fs::path(dir) / (video_id + ".features.json")).string();
}

namespace {

Json provenance_json(const Provenance& p) {
  Json j;
  j["mode"] = std::string(to_string(p.mode));
  j["pattern"] = p.pattern;
  j["fov_deg"] = p.fov_deg;
  j["vp_width"] = p.vp_width;
  j["vp_height"] = p.vp_height;
  Json features = Json::array();
  for (FeatureId id : p.features) features.push_back(std::string(feature_name(id)));
  j["features"] = features;
  j["feature_version"] = p.feature_version;
  return j;
}

Provenance provenance_from(const Json& j) {
  const std::string where = "provenance";
  Provenance p;
  p.mode = parse_feature_mode(required<std::string>(j, "mode", where));
  p.pattern = required<std::string>(j, "pattern", where);
  p.fov_deg = required<double>(j, "fov_deg", where);
  p.vp_width = required<int>(j, "vp_width", where);
  p.vp_height = required<int>(j, "vp_height", where);
  for (const auto& name : required<std::vector<std::string>>(j, "features", where)) {
    p.features.push_back(parse_feature(name));
  }
  p.feature_version = required<std::string>(j, "feature_version", where);
  return p;
}

}  // namespace

std::string to_json(const Provenance& p) { return provenance_json(p).dump(2) + "\n"; }

Provenance provenance_from_json(std::string_view text) {
  return provenance_from(parse_json(text, "provenance"));
}

std::string tensor_to_csv(const FeatureTensor& t) {
  std::string out = "frame,viewport";
  for (FeatureId id : t.provenance.features) {
    out += ",";
    out += feature_name(id);
  }
  out += "\n";
  const int m = t.feature_count();
  for (int f = 0; f < t.frames; ++f) {
    for (int n = 0; n < t.viewports; ++n) {
      out += std::to_string(f) + "," + std::to_string(n);
      for (int k = 0; k < m; ++k) {
        out += ",";
        out += format_double(t.at(f, n, k));
      }
      out += "\n";
    }
  }
  return out;
}

std::string tensor_sidecar_json(const FeatureTensor& t) {
  Json j;
  j["schema_version"] = kCacheSchemaVersion;
  j["video_id"] = t.video_id;
  j["group_id"] = t.group_id;
  if (t.dmos) {
    j["dmos"] = *t.dmos;
  } else {
    j["dmos"] = nullptr;
  }
  j["frames"] = t.frames;
  j["viewports"] = t.viewports;
  j["provenance"] = provenance_json(t.provenance);
  return j.dump(2) + "\n";
}

FeatureTensor tensor_from_cache_text(std::string_view csv, std::string_view sidecar) {
  const Json j = parse_json(sidecar, "feature cache sidecar");
  const std::string where = "feature cache sidecar";
  if (required<int>(j, "schema_version", where) != kCacheSchemaVersion) {
    fail(ErrorKind::kParseError, "feature cache: unsupported schema version");
  }
  FeatureTensor t;
  t.video_id = required<std::string>(j, "video_id", where);
  t.group_id = required<std::string>(j, "group_id", where);
  if (j.contains("dmos") && !j.at("dmos").is_null()) t.dmos = required<double>(j, "dmos", where);
  t.frames = required<int>(j, "frames", where);
  t.viewports = required<int>(j, "viewports", where);
  if (!j.contains("provenance")) fail(ErrorKind::kMissingField, where + ": missing provenance");
  t.provenance = provenance_from(j.at("provenance"));

  const auto lines = split_lines(csv);
  if (lines.empty()) fail(ErrorKind::kParseError, t.video_id + ": empty feature CSV");
  const auto header = split_csv_line(lines[0]);
  const int m = t.feature_count();
  if (header.size() != static_cast<std::size_t>(m) + 2 || header[0] != "frame" ||
      header[1] != "viewport") {
    fail(ErrorKind::kParseError, t.video_id + ": feature CSV header does not match sidecar");
  }
  for (int k = 0; k < m; ++k) {
    if (parse_feature(header[k + 2]) != t.provenance.features[k]) {
      fail(ErrorKind::kParseError, t.video_id + ": feature CSV columns do not match sidecar");
    }
  }
  const std::size_t expected_rows = static_cast<std::size_t>(t.frames) * t.viewports;
  if (lines.size() - 1 != expected_rows) {
    fail(ErrorKind::kParseError, t.video_id + ": feature CSV has " +
                                     std::to_string(lines.size() - 1) + " rows, expected " +
                                     std::to_string(expected_rows));
  }
  t.values.reserve(expected_rows * m);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where_row = t.video_id + " feature CSV line " + std::to_string(i + 1);
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != header.size()) fail(ErrorKind::kParseError, where_row + ": wrong width");
    const std::size_t row = i - 1;
    if (parse_int(cells[0], where_row) != static_cast<int>(row / t.viewports) ||
        parse_int(cells[1], where_row) != static_cast<int>(row % t.viewports)) {
      fail(ErrorKind::kParseError, where_row + ": rows out of frame/viewport order");
    }
    for (int k = 0; k < m; ++k) {
      const double v = parse_double(cells[k + 2], where_row);
      if (!std::isfinite(v)) fail(ErrorKind::kParseError, where_row + ": missing value");
      t.values.push_back(v);
    }
  }
  return t;
}

void write_feature_cache(const FeatureTensor& tensor, const std::string& dir) {
  fs::create_directories(dir);
  write_text_file(cache_csv_path(dir, tensor.video_id), tensor_to_csv(tensor));
  write_text_file(cache_sidecar_path(dir, tensor.video_id), tensor_sidecar_json(tensor));
}

FeatureTensor read_feature_cache(const std::string& dir, const std::string& video_id,
                                 const Provenance* expected) {
  const std::string sidecar = read_text_file(cache_sidecar_path(dir, video_id));
  const std::string csv = read_text_file(cache_csv_path(dir, video_id));
  FeatureTensor t = tensor_from_cache_text(csv, sidecar);
  if (expected && !(t.provenance == *expected)) {
    fail(ErrorKind::kProvenanceMismatch,
         video_id + ": cached features were computed with a different configuration");
  }
  return t;
}

std::vector<std::string> list_feature_caches(const std::string& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::kIoError, "no such directory: " + dir);
  const std::string suffix = ".features.json";
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      ids.push_back(name.substr(0, name.size() - suffix.size()));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

// ---------------------------------------------------------------------------
// Pooled tables

TrainingRow pooled_row(const FeatureTensor& tensor, const PoolingConfig& cfg) {
  const PooledFeatureVector pooled = pool_tensor(tensor, cfg);
  TrainingRow row;
  row.video_id = tensor.video_id;
  row.group_id = tensor.group_id;
  row.features = pooled.values;
  row.dmos = tensor.dmos.value_or(std::numeric_limits<double>::quiet_NaN());
  return row;
}

std::string pooled_table_to_csv(const TrainingSet& table) {
  std::string out = "video_id,group_id,dmos";
  for (const auto& name : table.layout.column_names()) out += "," + name;
  out += "\n";
  for (const auto& row : table.rows) {
    out += row.video_id + "," + row.group_id + "," + format_double(row.dmos);
    for (double v : row.features) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

TrainingSet parse_pooled_table(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorKind::kParseError, "pooled table is empty");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 4 || header[0] != "video_id" || header[1] != "group_id" ||
      header[2] != "dmos") {
    fail(ErrorKind::kParseError, "pooled table header must start with video_id,group_id,dmos");
  }
  TrainingSet table;
  table.layout = layout_from_columns(std::vector<std::string>(header.begin() + 3, header.end()));
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = "pooled table line " + std::to_string(i + 1);
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != header.size()) fail(ErrorKind::kParseError, where + ": wrong width");
    TrainingRow row;
    row.video_id = cells[0];
    row.group_id = cells[1];
    if (row.group_id.empty()) fail(ErrorKind::kMissingField, where + ": empty group_id");
    if (!seen.insert(row.video_id).second) {
      fail(ErrorKind::kDuplicateId, where + ": duplicate video_id '" + row.video_id + "'");
    }
    row.dmos = parse_double(cells[2], where);
    for (std::size_t c = 3; c < cells.size(); ++c) {
      const double v = parse_double(cells[c], where);
      if (!std::isfinite(v)) fail(ErrorKind::kNonFiniteInput, where + ": missing feature value");
      row.features.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

TrainingSet read_pooled_table(const std::string& path) {
  return parse_pooled_table(read_text_file(path));
}

void write_pooled_table(const TrainingSet& table, const std::string& path) {
  write_text_file(path, pooled_table_to_csv(table));
}

}  // namespace omnivq
