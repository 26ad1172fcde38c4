#pragma once

// Array-level entry points for foreign-language wrappers. Inputs are
// contiguous row-major (frames, height, width) buffers; results match the
// file-based commands bit for bit because both go through pipeline.hpp.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "firesim/fields.hpp"
#include "firesim/kv.hpp"
#include "firesim/metrics.hpp"
#include "firesim/pipeline.hpp"
#include "firesim/simulator.hpp"

namespace firesim::array_api {

struct Shape {
  std::size_t frames = 1;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const noexcept { return frames * height * width; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

template <class T>
struct View {
  std::span<const T> data;
  Shape shape;

  void validate(const char* what) const {
    require(shape.size() == data.size(), ErrorCode::SpecMismatch,
            std::string(what) + ": shape product " + std::to_string(shape.size()) + " != buffer length " +
                std::to_string(data.size()));
  }
  std::span<const T> frame(std::size_t i) const {
    const std::size_t n = shape.height * shape.width;
    return data.subspan(i * n, n);
  }
};

struct MaskArray {
  std::vector<std::uint8_t> data;  ///< 0/1 per cell
  Shape shape;
};

namespace detail {

inline MaskSequence to_masks(const View<std::uint8_t>& v, double dx, double dt_frame, const char* what) {
  v.validate(what);
  require(v.shape.frames >= 1, ErrorCode::EmptyInput, std::string(what) + ": no frames");
  const GridSpec spec(v.shape.height, v.shape.width, dx);
  std::vector<MaskFrame> frames;
  for (std::size_t t = 0; t < v.shape.frames; ++t) {
    const auto f = v.frame(t);
    for (auto b : f)
      require(b <= 1, ErrorCode::NonBinaryPixel, std::string(what) + ": mask values must be 0 or 1");
    frames.emplace_back(spec, std::vector<std::uint8_t>(f.begin(), f.end()));
  }
  return MaskSequence(std::move(frames), dt_frame);
}

inline ScalarField to_field(std::span<const float> f, const GridSpec& spec) {
  return ScalarField(spec, std::vector<double>(f.begin(), f.end()));
}

inline void validate_settings(const KeyValues& kv) {
  for (const auto& [key, value] : kv.entries()) {
    const auto in = [&](std::span<const std::string_view> set) {
      return std::find(set.begin(), set.end(), key) != set.end();
    };
    if (!in(kParamKeys) && !in(kSimKeys)) fail(ErrorCode::BadConfig, "unknown setting '" + key + "'");
  }
}

}  // namespace detail

/// Prior masks from observed masks and the environment. `terrain` and `fuel`
/// hold one frame; `wind_u`/`wind_v` one frame per observed frame.
inline MaskArray gen_prior(const View<std::uint8_t>& observed, const View<float>& terrain, const View<float>& wind_u,
                           const View<float>& wind_v, const View<float>& fuel, const KeyValues& settings,
                           double dx = 1.0, double dt_frame = SimConfig::kDefaultFrameInterval) {
  detail::validate_settings(settings);
  const MaskSequence obs = detail::to_masks(observed, dx, dt_frame, "observed");
  const GridSpec& spec = obs.spec();
  const Shape single{1, spec.height, spec.width};
  terrain.validate("terrain");
  fuel.validate("fuel");
  wind_u.validate("wind_u");
  wind_v.validate("wind_v");
  require(terrain.shape == single && fuel.shape == single, ErrorCode::SpecMismatch,
          "terrain and fuel must be single frames matching the observed grid");
  require(wind_u.shape == wind_v.shape, ErrorCode::SpecMismatch, "wind components differ in shape");
  require(wind_u.shape.height == spec.height && wind_u.shape.width == spec.width, ErrorCode::SpecMismatch,
          "wind grid does not match the observed grid");
  require(wind_u.shape.frames == obs.size(), ErrorCode::WindFrameCountMismatch,
          std::to_string(wind_u.shape.frames) + " wind frames for " + std::to_string(obs.size()) + " observed frames");
  std::vector<VectorField> wind;
  for (std::size_t t = 0; t < wind_u.shape.frames; ++t) {
    const auto u = wind_u.frame(t);
    const auto v = wind_v.frame(t);
    wind.emplace_back(spec, std::vector<double>(u.begin(), u.end()), std::vector<double>(v.begin(), v.end()));
  }
  const Environment env(detail::to_field(terrain.data, spec), std::move(wind), detail::to_field(fuel.data, spec));
  const PriorResult result = generate_prior(obs, env, settings);
  MaskArray out;
  out.shape = {result.priors.size(), spec.height, spec.width};
  out.data.reserve(out.shape.size());
  for (const auto& m : result.priors.frames()) out.data.insert(out.data.end(), m.bits().begin(), m.bits().end());
  return out;
}

/// Same keys and values as the report written by the `evaluate` command.
inline KeyValues evaluate(const View<std::uint8_t>& pred, const View<std::uint8_t>& truth, double dx = 1.0,
                          double dt_frame = SimConfig::kDefaultFrameInterval) {
  require(pred.shape == truth.shape, ErrorCode::SpecMismatch, "prediction and truth shapes differ");
  return metric_report_to_kv(evaluate_sequences(detail::to_masks(pred, dx, dt_frame, "pred"),
                                                detail::to_masks(truth, dx, dt_frame, "truth")));
}

}  // namespace firesim::array_api
