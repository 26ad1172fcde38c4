#pragma once

// On-disk formats: binary PGM masks and frames, PFW1 raw fields, and the
// directory layouts built from them (sequences, environments, VCU bundles,
// reports).
//
// PFW1 layout, all little-endian:
//   bytes 0..3   "PFW1"
//   bytes 4..7   height, u32
//   bytes 8..11  width, u32
//   bytes 12..15 dx, f32
//   then height*width f32 values, row-major.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "firesim/fields.hpp"
#include "firesim/kv.hpp"
#include "firesim/metrics.hpp"
#include "firesim/pde.hpp"
#include "firesim/simulator.hpp"
#include "firesim/source_fit.hpp"

namespace firesim {

inline constexpr std::string_view kManifestName = "manifest.txt";
inline constexpr std::string_view kParamsName = "params.txt";
inline constexpr std::size_t kFieldHeaderBytes = 16;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  return v;
}

inline void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

inline float get_f32(std::string_view bytes, std::size_t at) { return std::bit_cast<float>(get_u32(bytes, at)); }

inline bool pgm_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

inline float to_f32_checked(double v, const char* what) {
  const float f = static_cast<float>(v);
  if (!std::isfinite(f)) fail(ErrorCode::NonFinite, std::string(what) + " value does not fit in 32-bit float");
  return f;
}

}  // namespace detail

// ---------------------------------------------------------------- fields

inline std::string encode_field(const ScalarField& field) {
  const GridSpec& s = field.spec();
  require(s.height <= std::numeric_limits<std::uint32_t>::max() && s.width <= std::numeric_limits<std::uint32_t>::max(),
          ErrorCode::InvalidGrid, "grid too large for the field format");
  std::string out;
  out.reserve(kFieldHeaderBytes + 4 * s.cells());
  out += "PFW1";
  detail::put_u32(out, static_cast<std::uint32_t>(s.height));
  detail::put_u32(out, static_cast<std::uint32_t>(s.width));
  detail::put_f32(out, detail::to_f32_checked(s.dx, "dx"));
  for (double v : field.values()) detail::put_f32(out, detail::to_f32_checked(v, "field"));
  return out;
}

inline ScalarField decode_field(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "PFW1") fail(ErrorCode::BadMagic, "not a PFW1 field file");
  if (bytes.size() < kFieldHeaderBytes) fail(ErrorCode::TruncatedPayload, "field header is truncated");
  const std::uint64_t h = detail::get_u32(bytes, 4);
  const std::uint64_t w = detail::get_u32(bytes, 8);
  const float dx = detail::get_f32(bytes, 12);
  const std::uint64_t payload = bytes.size() - kFieldHeaderBytes;
  if (payload % 4 != 0 || h * w != payload / 4)
    fail(ErrorCode::TruncatedPayload, "field payload is " + std::to_string(payload) + " bytes, header says " +
                                          std::to_string(h) + "x" + std::to_string(w));
  const GridSpec spec(static_cast<std::size_t>(h), static_cast<std::size_t>(w), static_cast<double>(dx));
  std::vector<double> values(spec.cells());
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = static_cast<double>(detail::get_f32(bytes, kFieldHeaderBytes + 4 * i));
  return ScalarField(spec, std::move(values));
}

inline void write_field(const ScalarField& field, const fs::path& path) { write_file_atomic(path, encode_field(field)); }

inline ScalarField read_field(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorCode::MissingComponent, "missing field file " + path.string());
  return decode_field(read_file_bytes(path));
}

// ---------------------------------------------------------------- PGM

struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  unsigned maxval = 255;
  std::vector<std::uint8_t> pixels;
};

inline std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                    std::to_string(img.maxval) + "\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

/// Binary PGM with maxval <= 255. Comments are allowed between header tokens;
/// exactly one whitespace byte separates maxval from the raster, and the raster
/// must end the file.
inline GrayImage decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') fail(ErrorCode::BadMagic, "not a binary PGM (P5)");
  std::size_t pos = 2;
  const auto skip_space = [&] {
    bool any = false;
    while (pos < bytes.size()) {
      const auto c = static_cast<unsigned char>(bytes[pos]);
      if (detail::pgm_space(c)) {
        ++pos;
        any = true;
      } else if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n' && bytes[pos] != '\r') ++pos;
        any = true;
      } else {
        break;
      }
    }
    return any;
  };
  const auto number = [&](const char* what) -> std::uint64_t {
    if (!skip_space()) fail(ErrorCode::BadMagic, std::string("PGM header: expected whitespace before ") + what);
    std::uint64_t v = 0;
    std::size_t digits = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      if (++digits > 9) fail(ErrorCode::BadMagic, std::string("PGM header: ") + what + " is too large");
      v = v * 10 + static_cast<std::uint64_t>(bytes[pos] - '0');
      ++pos;
    }
    if (digits == 0) fail(ErrorCode::BadMagic, std::string("PGM header: expected ") + what);
    return v;
  };
  GrayImage img;
  img.width = number("width");
  img.height = number("height");
  const std::uint64_t maxval = number("maxval");
  if (maxval == 0 || maxval > 255) fail(ErrorCode::BadMagic, "PGM maxval must be in 1..255");
  img.maxval = static_cast<unsigned>(maxval);
  if (pos >= bytes.size() || !detail::pgm_space(static_cast<unsigned char>(bytes[pos])))
    fail(ErrorCode::BadMagic, "PGM header must end with a single whitespace byte");
  ++pos;
  const std::uint64_t raster = bytes.size() - pos;
  if (raster != static_cast<std::uint64_t>(img.width) * img.height)
    fail(ErrorCode::TruncatedPayload, "PGM raster is " + std::to_string(raster) + " bytes, header says " +
                                          std::to_string(img.width) + "x" + std::to_string(img.height));
  img.pixels.assign(bytes.begin() + static_cast<long>(pos), bytes.end());
  for (auto p : img.pixels)
    if (p > img.maxval) fail(ErrorCode::BadMagic, "PGM pixel exceeds maxval");
  return img;
}

inline std::string encode_mask_pgm(const MaskFrame& mask) {
  GrayImage img{mask.spec().height, mask.spec().width, 255, {}};
  img.pixels.reserve(mask.spec().cells());
  for (auto b : mask.bits()) img.pixels.push_back(b ? 255 : 0);
  return encode_pgm(img);
}

/// Mask PGMs carry no cell size; it is supplied by the caller (from the manifest).
inline MaskFrame decode_mask_pgm(std::string_view bytes, double dx = 1.0) {
  const GrayImage img = decode_pgm(bytes);
  if (img.maxval != 255) fail(ErrorCode::BadMagic, "mask PGM maxval must be 255");
  const GridSpec spec(img.height, img.width, dx);
  std::vector<std::uint8_t> bits(spec.cells());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const auto p = img.pixels[i];
    if (p != 0 && p != 255)
      fail(ErrorCode::NonBinaryPixel, "pixel " + std::to_string(p) + " at row " + std::to_string(i / spec.width) +
                                          ", col " + std::to_string(i % spec.width));
    bits[i] = p ? 1 : 0;
  }
  return MaskFrame(spec, std::move(bits));
}

inline MaskFrame read_mask_pgm(const fs::path& path, double dx = 1.0) {
  if (!fs::exists(path)) fail(ErrorCode::MissingComponent, "missing mask file " + path.string());
  return decode_mask_pgm(read_file_bytes(path), dx);
}

inline void write_mask_pgm(const MaskFrame& mask, const fs::path& path) { write_file_atomic(path, encode_mask_pgm(mask)); }

// ---------------------------------------------------------------- sequences

namespace detail {

inline KeyValues read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifestName;
  if (!fs::is_regular_file(path)) fail(ErrorCode::MissingManifest, "no manifest in " + dir.string());
  return read_kv_file(path);
}

inline void require_kind(const KeyValues& kv, std::string_view kind) {
  if (const std::string* k = kv.find("kind"); k && *k != kind)
    fail(ErrorCode::BadConfig, kv.source() + ": expected kind " + std::string(kind) + ", found " + *k);
}

inline void put_spec(KeyValues& kv, const GridSpec& s) {
  kv.set("height", s.height);
  kv.set("width", s.width);
  kv.set("dx", s.dx);
}

inline GridSpec get_spec(const KeyValues& kv) {
  return GridSpec(static_cast<std::size_t>(kv.get_uint("height")), static_cast<std::size_t>(kv.get_uint("width")),
                  kv.get_double("dx"));
}

}  // namespace detail

/// Writes frame_NNNN.pgm files, then the manifest.
inline void write_mask_sequence(const MaskSequence& seq, const fs::path& dir) {
  ensure_directory(dir);
  for (std::size_t i = 0; i < seq.size(); ++i) write_mask_pgm(seq[i], dir / frame_name("frame_", i, ".pgm"));
  KeyValues kv;
  kv.set("kind", "mask_sequence");
  kv.set("frames", seq.size());
  detail::put_spec(kv, seq.spec());
  kv.set("dt_frame", seq.dt_frame());
  write_kv_file(dir / kManifestName, kv, "firesim mask sequence");
}

inline MaskSequence read_mask_sequence(const fs::path& dir) {
  const KeyValues kv = detail::read_manifest(dir);
  detail::require_kind(kv, "mask_sequence");
  const std::size_t n = kv.get_uint("frames");
  require(n >= 1, ErrorCode::EmptyInput, dir.string() + ": manifest lists no frames");
  const GridSpec spec = detail::get_spec(kv);
  std::vector<MaskFrame> frames;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    MaskFrame m = read_mask_pgm(dir / frame_name("frame_", i, ".pgm"), spec.dx);
    if (!frames.empty() && !(m.spec() == frames.front().spec()))
      fail(ErrorCode::SpecMismatchAcrossFrames, dir.string() + ": frame " + std::to_string(i) + " is " +
                                                    describe(m.spec()) + ", frame 0 is " +
                                                    describe(frames.front().spec()));
    frames.push_back(std::move(m));
  }
  require_same_spec(frames.front().spec(), spec, "mask sequence manifest");
  return MaskSequence(std::move(frames), kv.get_double("dt_frame"));
}

struct FieldSequence {
  std::vector<ScalarField> fields;
  double dt_frame = SimConfig::kDefaultFrameInterval;
};

inline void write_field_sequence(std::span<const ScalarField> fields, double dt_frame, const fs::path& dir) {
  require(!fields.empty(), ErrorCode::EmptyInput, "field sequence needs at least one frame");
  for (const auto& f : fields) require_same_spec(f.spec(), fields.front().spec(), "field sequence");
  ensure_directory(dir);
  for (std::size_t i = 0; i < fields.size(); ++i) write_field(fields[i], dir / frame_name("field_", i, ".pfw"));
  KeyValues kv;
  kv.set("kind", "field_sequence");
  kv.set("frames", fields.size());
  detail::put_spec(kv, fields.front().spec());
  kv.set("dt_frame", dt_frame);
  write_kv_file(dir / kManifestName, kv, "firesim field sequence");
}

inline FieldSequence read_field_sequence(const fs::path& dir) {
  const KeyValues kv = detail::read_manifest(dir);
  detail::require_kind(kv, "field_sequence");
  const std::size_t n = kv.get_uint("frames");
  require(n >= 1, ErrorCode::EmptyInput, dir.string() + ": manifest lists no frames");
  const GridSpec spec = detail::get_spec(kv);
  FieldSequence out;
  out.dt_frame = kv.get_double("dt_frame");
  for (std::size_t i = 0; i < n; ++i) {
    ScalarField f = read_field(dir / frame_name("field_", i, ".pfw"));
    if (!(f.spec() == spec))
      fail(ErrorCode::SpecMismatchAcrossFrames, dir.string() + ": frame " + std::to_string(i) + " is " +
                                                    describe(f.spec()) + ", manifest says " + describe(spec));
    out.fields.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------- params

inline KeyValues params_to_kv(const PhysicalParams& p) {
  KeyValues kv;
  kv.set("c", p.c);
  kv.set("k", p.k);
  kv.set("gamma", p.gamma);
  kv.set("a_coeff", p.a_coeff);
  kv.set("c_cool", p.c_cool);
  kv.set("b_arrhenius", p.b_arrhenius);
  kv.set("t_ambient", p.t_ambient);
  kv.set("t_burn", p.t_burn);
  return kv;
}

/// Overwrites the fields whose keys are present; other keys are ignored.
inline void apply_params(PhysicalParams& p, const KeyValues& kv) {
  const auto take = [&](std::string_view key, double& dst) {
    if (kv.contains(key)) dst = kv.get_double(key);
  };
  take("c", p.c);
  take("k", p.k);
  take("gamma", p.gamma);
  take("a_coeff", p.a_coeff);
  take("c_cool", p.c_cool);
  take("b_arrhenius", p.b_arrhenius);
  take("t_ambient", p.t_ambient);
  take("t_burn", p.t_burn);
}

inline void write_params(const PhysicalParams& p, const fs::path& path) {
  write_kv_file(path, params_to_kv(p), "firesim physical parameters");
}

inline PhysicalParams read_params(const fs::path& path) {
  if (!fs::is_regular_file(path)) fail(ErrorCode::MissingComponent, "missing parameter file " + path.string());
  PhysicalParams p;
  apply_params(p, read_kv_file(path));
  p.validate();
  return p;
}

// ---------------------------------------------------------------- environment

/// terrain.pfw, fuel.pfw, wind_u_NNNN.pfw / wind_v_NNNN.pfw per frame, manifest.
inline void write_environment(const Environment& env, double dt_frame, const fs::path& dir) {
  env.validate();
  ensure_directory(dir);
  write_field(env.terrain, dir / "terrain.pfw");
  write_field(env.fuel0, dir / "fuel.pfw");
  for (std::size_t i = 0; i < env.wind.size(); ++i) {
    const auto& w = env.wind[i];
    write_field(ScalarField(env.spec(), std::vector<double>(w.u().begin(), w.u().end())),
                dir / frame_name("wind_u_", i, ".pfw"));
    write_field(ScalarField(env.spec(), std::vector<double>(w.v().begin(), w.v().end())),
                dir / frame_name("wind_v_", i, ".pfw"));
  }
  KeyValues kv;
  kv.set("kind", "environment");
  kv.set("frames", env.wind.size());
  detail::put_spec(kv, env.spec());
  kv.set("dt_frame", dt_frame);
  write_kv_file(dir / kManifestName, kv, "firesim environment");
}

inline Environment read_environment(const fs::path& dir) {
  const KeyValues kv = detail::read_manifest(dir);
  detail::require_kind(kv, "environment");
  const std::size_t frames = kv.get_uint("frames");
  const ScalarField terrain = read_field(dir / "terrain.pfw");
  const ScalarField fuel = read_field(dir / "fuel.pfw");
  require_same_spec(terrain.spec(), detail::get_spec(kv), "environment manifest");
  std::vector<VectorField> wind;
  for (std::size_t i = 0;; ++i) {
    const fs::path up = dir / frame_name("wind_u_", i, ".pfw");
    const fs::path vp = dir / frame_name("wind_v_", i, ".pfw");
    const bool has_u = fs::exists(up);
    const bool has_v = fs::exists(vp);
    if (!has_u && !has_v) break;
    if (has_u != has_v)
      fail(ErrorCode::MissingComponent, "wind frame " + std::to_string(i) + " lacks its " + (has_u ? "v" : "u") +
                                            " component in " + dir.string());
    const ScalarField u = read_field(up);
    const ScalarField v = read_field(vp);
    require_same_spec(terrain.spec(), u.spec(), "environment wind");
    require_same_spec(terrain.spec(), v.spec(), "environment wind");
    wind.emplace_back(terrain.spec(), std::vector<double>(u.values().begin(), u.values().end()),
                      std::vector<double>(v.values().begin(), v.values().end()));
  }
  if (wind.size() != frames)
    fail(ErrorCode::WindFrameCountMismatch, dir.string() + ": " + std::to_string(wind.size()) +
                                                " wind frames on disk, manifest says " + std::to_string(frames));
  return Environment(terrain, std::move(wind), fuel);
}

// ---------------------------------------------------------------- VCU bundle

struct VcuBundle {
  std::size_t a = 0;  ///< observed frames
  std::size_t b = 0;  ///< prior frames
  GridSpec spec;
  double dt_frame = SimConfig::kDefaultFrameInterval;
  std::vector<std::string> files;
  std::vector<std::uint8_t> control;  ///< 0 for observed frames, 1 for priors
  double scale_min = 0.0;
  double scale_max = 0.0;
  std::vector<std::pair<std::string, std::string>> provenance;
};

/// Observed fields are scaled to 8 bits with the min/max over all of them
/// (a constant sequence maps to 0). Everything is validated before the first write.
inline VcuBundle export_vcu_bundle(std::span<const ScalarField> observed, const MaskSequence& priors,
                                   const fs::path& out_dir,
                                   std::vector<std::pair<std::string, std::string>> provenance = {}) {
  require(!observed.empty(), ErrorCode::EmptyInput, "bundle needs at least one observed frame");
  require(priors.size() >= 1, ErrorCode::EmptyInput, "bundle needs at least one prior frame");
  for (const auto& f : observed) require_same_spec(f.spec(), priors.spec(), "vcu bundle");

  VcuBundle bundle;
  bundle.a = observed.size();
  bundle.b = priors.size();
  bundle.spec = priors.spec();
  bundle.dt_frame = priors.dt_frame();
  bundle.provenance = std::move(provenance);
  bundle.scale_min = observed.front().min();
  bundle.scale_max = observed.front().max();
  for (const auto& f : observed) {
    bundle.scale_min = std::min(bundle.scale_min, f.min());
    bundle.scale_max = std::max(bundle.scale_max, f.max());
  }
  const double span = bundle.scale_max - bundle.scale_min;

  std::vector<std::string> encoded;
  for (const auto& f : observed) {
    GrayImage img{bundle.spec.height, bundle.spec.width, 255, {}};
    img.pixels.reserve(bundle.spec.cells());
    for (double v : f.values()) {
      const double t = span > 0.0 ? (v - bundle.scale_min) / span : 0.0;
      img.pixels.push_back(static_cast<std::uint8_t>(std::clamp(std::lround(255.0 * t), 0L, 255L)));
    }
    encoded.push_back(encode_pgm(img));
    bundle.control.push_back(0);
  }
  for (const auto& m : priors.frames()) {
    encoded.push_back(encode_mask_pgm(m));
    bundle.control.push_back(1);
  }

  ensure_directory(out_dir);
  KeyValues kv;
  kv.set("kind", "vcu_bundle");
  kv.set("a", bundle.a);
  kv.set("b", bundle.b);
  kv.set("frames", bundle.a + bundle.b);
  detail::put_spec(kv, bundle.spec);
  kv.set("dt_frame", bundle.dt_frame);
  kv.set("scale_min", bundle.scale_min);
  kv.set("scale_max", bundle.scale_max);
  for (const auto& [k, v] : bundle.provenance) kv.set("provenance." + k, v);
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    const std::string name = frame_name("frame_", i, ".pgm");
    write_file_atomic(out_dir / name, encoded[i]);
    bundle.files.push_back(name);
    kv.set(frame_name("file.", i, ""), name);
    kv.set(frame_name("control.", i, ""), static_cast<std::size_t>(bundle.control[i]));
  }
  write_kv_file(out_dir / kManifestName, kv, "firesim conditioning bundle");
  return bundle;
}

inline VcuBundle read_vcu_manifest(const fs::path& dir) {
  const KeyValues kv = detail::read_manifest(dir);
  detail::require_kind(kv, "vcu_bundle");
  VcuBundle b;
  b.a = kv.get_uint("a");
  b.b = kv.get_uint("b");
  b.spec = detail::get_spec(kv);
  b.dt_frame = kv.get_double("dt_frame");
  b.scale_min = kv.get_double("scale_min");
  b.scale_max = kv.get_double("scale_max");
  for (std::size_t i = 0; i < b.a + b.b; ++i) {
    b.files.push_back(kv.at(frame_name("file.", i, "")));
    b.control.push_back(static_cast<std::uint8_t>(kv.get_uint(frame_name("control.", i, ""))));
  }
  for (const auto& [k, v] : kv.entries())
    if (k.rfind("provenance.", 0) == 0) b.provenance.emplace_back(k.substr(11), v);
  return b;
}

// ---------------------------------------------------------------- reports

inline KeyValues fit_report_to_kv(const FitReport& r) {
  KeyValues kv;
  kv.set("kind", "fit_report");
  kv.set("converged", r.converged);
  kv.set("iterations", r.iterations);
  kv.set("residual_norm", r.residual_norm);
  if (!r.objective_trace.empty()) {
    kv.set("objective_initial", r.objective_trace.front());
    kv.set("objective_final", r.objective_trace.back());
  }
  kv.set("weights", r.weights.size());
  for (std::size_t i = 0; i < r.weights.size(); ++i) kv.set(frame_name("weight.", i, ""), r.weights[i]);
  return kv;
}

inline void write_fit_report(const FitReport& r, const fs::path& path) {
  write_kv_file(path, fit_report_to_kv(r), "firesim source fit");
}

/// The objective trace is not stored; only its endpoints are.
inline FitReport read_fit_report(const fs::path& path) {
  const KeyValues kv = read_kv_file(path);
  detail::require_kind(kv, "fit_report");
  FitReport r;
  r.converged = kv.get_bool("converged");
  r.iterations = kv.get_uint("iterations");
  r.residual_norm = kv.get_double("residual_norm");
  std::vector<double> w;
  for (std::size_t i = 0; i < kv.get_uint("weights"); ++i) w.push_back(kv.get_double(frame_name("weight.", i, "")));
  r.weights = SimplexWeights(std::move(w));
  if (kv.contains("objective_initial")) r.objective_trace.push_back(kv.get_double("objective_initial"));
  if (kv.contains("objective_final")) r.objective_trace.push_back(kv.get_double("objective_final"));
  return r;
}

namespace detail {

inline constexpr std::pair<const char*, std::optional<double> FrameMetrics::*> kMetricFields[] = {
    {"auprc", &FrameMetrics::auprc}, {"f1", &FrameMetrics::f1},     {"iou", &FrameMetrics::iou},
    {"mse", &FrameMetrics::mse},     {"psnr", &FrameMetrics::psnr}, {"ssim", &FrameMetrics::ssim},
};

}  // namespace detail

/// Aggregates as `name = value`, then one `frame.NNNN.name = value` row per frame.
inline KeyValues metric_report_to_kv(const MetricReport& r) {
  KeyValues kv;
  kv.set("kind", "metric_report");
  kv.set("frames", r.per_frame.size());
  for (const auto& [name, member] : detail::kMetricFields)
    if ((r.*member).has_value()) kv.set(name, *(r.*member));
  for (std::size_t i = 0; i < r.per_frame.size(); ++i)
    for (const auto& [name, member] : detail::kMetricFields)
      if ((r.per_frame[i].*member).has_value()) kv.set(frame_name("frame.", i, ".") + name, *(r.per_frame[i].*member));
  return kv;
}

inline MetricReport metric_report_from_kv(const KeyValues& kv) {
  detail::require_kind(kv, "metric_report");
  MetricReport r;
  for (const auto& [name, member] : detail::kMetricFields)
    if (kv.contains(name)) r.*member = kv.get_double(name);
  r.per_frame.resize(kv.get_uint("frames"));
  for (std::size_t i = 0; i < r.per_frame.size(); ++i)
    for (const auto& [name, member] : detail::kMetricFields) {
      const std::string key = frame_name("frame.", i, ".") + name;
      if (kv.contains(key)) r.per_frame[i].*member = kv.get_double(key);
    }
  return r;
}

inline void write_metric_report(const MetricReport& r, const fs::path& path) {
  write_kv_file(path, metric_report_to_kv(r), "firesim evaluation");
}

inline MetricReport read_metric_report(const fs::path& path) { return metric_report_from_kv(read_kv_file(path)); }

}  // namespace firesim
