#pragma once

// Raster value types shared by the numerical modules. Storage is row-major,
// row 0 is the north edge, column 0 the west edge.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "firesim/error.hpp"

namespace firesim {

struct GridSpec {
  std::size_t height = 0;
  std::size_t width = 0;
  double dx = 1.0;  ///< cell edge length in metres

  GridSpec() = default;
  GridSpec(std::size_t h, std::size_t w, double spacing) : height(h), width(w), dx(spacing) {
    require(height >= 3 && width >= 3, ErrorCode::InvalidGrid,
            "grid must be at least 3x3, got " + std::to_string(height) + "x" + std::to_string(width));
    require(std::isfinite(dx) && dx > 0.0, ErrorCode::InvalidGrid, "dx must be positive and finite");
  }

  std::size_t cells() const noexcept { return height * width; }
  std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * width + col; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline std::string describe(const GridSpec& spec) {
  return std::to_string(spec.height) + "x" + std::to_string(spec.width) + " dx=" + std::to_string(spec.dx);
}

inline void require_same_spec(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) fail(ErrorCode::SpecMismatch, std::string(what) + ": " + describe(a) + " vs " + describe(b));
}

namespace detail {

inline void check_finite(std::span<const double> values, std::size_t width, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorCode::NonFinite, std::string(what) + " at row " + std::to_string(i / width) + ", col " +
                                     std::to_string(i % width));
    }
  }
}

}  // namespace detail

class ScalarField {
 public:
  ScalarField() = default;

  ScalarField(const GridSpec& spec, double fill) : spec_(spec), values_(spec.cells(), fill) {
    require(std::isfinite(fill), ErrorCode::NonFinite, "fill value");
  }

  ScalarField(const GridSpec& spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
    require(values_.size() == spec_.cells(), ErrorCode::SpecMismatch,
            "value count " + std::to_string(values_.size()) + " does not match " + describe(spec_));
    detail::check_finite(values_, spec_.width, "scalar field");
  }

  /// Cells are indexed by (row, col) and evaluated as f(x, y) with x eastward
  /// and y northward, both in metres from the south-west cell centre.
  template <class Fn>
  static ScalarField generate(const GridSpec& spec, Fn&& fn) {
    std::vector<double> values(spec.cells());
    for (std::size_t r = 0; r < spec.height; ++r)
      for (std::size_t c = 0; c < spec.width; ++c)
        values[spec.index(r, c)] = fn(static_cast<double>(c) * spec.dx,
                                      static_cast<double>(spec.height - 1 - r) * spec.dx);
    return ScalarField(spec, std::move(values));
  }

  const GridSpec& spec() const noexcept { return spec_; }
  std::span<const double> values() const& noexcept { return values_; }
  std::vector<double> values() && { return std::move(values_); }
  double operator()(std::size_t row, std::size_t col) const noexcept { return values_[spec_.index(row, col)]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  double sum() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

class VectorField {
 public:
  VectorField() = default;

  VectorField(const GridSpec& spec, std::vector<double> u, std::vector<double> v)
      : spec_(spec), u_(std::move(u)), v_(std::move(v)) {
    require(u_.size() == spec_.cells() && v_.size() == spec_.cells(), ErrorCode::SpecMismatch,
            "vector components do not match " + describe(spec_));
    detail::check_finite(u_, spec_.width, "wind u");
    detail::check_finite(v_, spec_.width, "wind v");
  }

  static VectorField uniform(const GridSpec& spec, double u, double v) {
    return VectorField(spec, std::vector<double>(spec.cells(), u), std::vector<double>(spec.cells(), v));
  }

  static VectorField zero(const GridSpec& spec) { return uniform(spec, 0.0, 0.0); }

  const GridSpec& spec() const noexcept { return spec_; }
  std::span<const double> u() const& noexcept { return u_; }  ///< east component, m/s
  std::span<const double> v() const& noexcept { return v_; }  ///< north component, m/s
  std::vector<double> u() && { return std::move(u_); }
  std::vector<double> v() && { return std::move(v_); }

  friend bool operator==(const VectorField&, const VectorField&) = default;

 private:
  GridSpec spec_;
  std::vector<double> u_;
  std::vector<double> v_;
};

class MaskFrame {
 public:
  MaskFrame() = default;

  MaskFrame(const GridSpec& spec, std::vector<std::uint8_t> bits) : spec_(spec), bits_(std::move(bits)) {
    require(bits_.size() == spec_.cells(), ErrorCode::SpecMismatch,
            "mask cell count does not match " + describe(spec_));
    for (auto b : bits_) require(b <= 1, ErrorCode::BadRange, "mask cells must be 0 or 1");
  }

  static MaskFrame filled(const GridSpec& spec, bool on) {
    return MaskFrame(spec, std::vector<std::uint8_t>(spec.cells(), on ? 1 : 0));
  }

  const GridSpec& spec() const noexcept { return spec_; }
  std::span<const std::uint8_t> bits() const& noexcept { return bits_; }
  std::vector<std::uint8_t> bits() && { return std::move(bits_); }
  bool operator()(std::size_t row, std::size_t col) const noexcept { return bits_[spec_.index(row, col)] != 0; }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  friend bool operator==(const MaskFrame&, const MaskFrame&) = default;

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> bits_;
};

class MaskSequence {
 public:
  MaskSequence() = default;

  MaskSequence(std::vector<MaskFrame> frames, double dt_frame) : frames_(std::move(frames)), dt_frame_(dt_frame) {
    require(!frames_.empty(), ErrorCode::EmptyInput, "mask sequence needs at least one frame");
    require(std::isfinite(dt_frame_) && dt_frame_ > 0.0, ErrorCode::BadRange, "dt_frame must be positive");
    for (const auto& f : frames_)
      require(f.spec() == frames_.front().spec(), ErrorCode::SpecMismatchAcrossFrames,
              "frames disagree on grid: " + describe(f.spec()) + " vs " + describe(frames_.front().spec()));
  }

  const std::vector<MaskFrame>& frames() const& noexcept { return frames_; }
  std::vector<MaskFrame> frames() && { return std::move(frames_); }
  const MaskFrame& operator[](std::size_t i) const noexcept { return frames_[i]; }
  std::size_t size() const noexcept { return frames_.size(); }
  double dt_frame() const noexcept { return dt_frame_; }
  const GridSpec& spec() const noexcept { return frames_.front().spec(); }

  friend bool operator==(const MaskSequence&, const MaskSequence&) = default;

 private:
  std::vector<MaskFrame> frames_;
  double dt_frame_ = 5.0;
};

template <class BinaryOp>
ScalarField field_map2(const ScalarField& a, const ScalarField& b, BinaryOp&& op) {
  require_same_spec(a.spec(), b.spec(), "field_map2");
  std::vector<double> out(a.spec().cells());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return ScalarField(a.spec(), std::move(out));
}

template <class UnaryOp>
ScalarField field_map(const ScalarField& a, UnaryOp&& op) {
  std::vector<double> out(a.spec().cells());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i]);
  return ScalarField(a.spec(), std::move(out));
}

inline MaskFrame mask_from_field(const ScalarField& field, double threshold) {
  std::vector<std::uint8_t> bits(field.spec().cells());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = field[i] >= threshold ? 1 : 0;
  return MaskFrame(field.spec(), std::move(bits));
}

/// Normalised radial Gaussian, sigma = radius / 2, truncated at 3 sigma.
/// Returned as (row offset, col offset, weight) taps.
struct KernelTap {
  int dr;
  int dc;
  double weight;
};

inline std::vector<KernelTap> gaussian_taps(double smooth_radius) {
  std::vector<KernelTap> taps;
  if (smooth_radius <= 0.0) {
    taps.push_back({0, 0, 1.0});
    return taps;
  }
  const double sigma = smooth_radius / 2.0;
  const double cutoff = 3.0 * sigma;
  const int reach = static_cast<int>(std::floor(cutoff));
  double total = 0.0;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const double d2 = static_cast<double>(dr * dr + dc * dc);
      if (d2 > cutoff * cutoff) continue;
      const double w = std::exp(-d2 / (2.0 * sigma * sigma));
      taps.push_back({dr, dc, w});
      total += w;
    }
  }
  for (auto& t : taps) t.weight /= total;
  return taps;
}

/// Lifts a binary mask to a temperature-like field in [t_ambient, t_burn].
/// Samples outside the grid clamp to the nearest edge cell.
inline ScalarField field_from_mask(const MaskFrame& mask, double t_ambient, double t_burn, double smooth_radius) {
  require(std::isfinite(t_ambient) && std::isfinite(t_burn) && t_burn > t_ambient, ErrorCode::BadRange,
          "t_burn must exceed t_ambient");
  require(std::isfinite(smooth_radius) && smooth_radius >= 0.0, ErrorCode::BadRange,
          "smooth_radius must be >= 0");
  const GridSpec& spec = mask.spec();
  const auto taps = gaussian_taps(smooth_radius);
  const auto h = static_cast<long>(spec.height);
  const auto w = static_cast<long>(spec.width);
  std::vector<double> out(spec.cells());
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      double g = 0.0;
      for (const auto& t : taps) {
        const long rr = std::clamp(r + t.dr, 0L, h - 1);
        const long cc = std::clamp(c + t.dc, 0L, w - 1);
        if (mask(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc))) g += t.weight;
      }
      g = std::clamp(g, 0.0, 1.0);
      const double value = g >= 1.0 ? t_burn : (g <= 0.0 ? t_ambient : t_ambient + (t_burn - t_ambient) * g);
      out[spec.index(static_cast<std::size_t>(r), static_cast<std::size_t>(c))] = std::min(value, t_burn);
    }
  }
  return ScalarField(spec, std::move(out));
}

}  // namespace firesim
