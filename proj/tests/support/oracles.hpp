#pragma once

// Independent reference computations used by the unit and acceptance suites.
// None of these call into the library function they are checking.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <unistd.h>

#include "firesim/fields.hpp"
#include "firesim/random.hpp"

namespace oracle {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("firesim_test_" + std::string(tag) + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(std::string_view s) const { return path_ / s; }

 private:
  fs::path path_;
};

inline firesim::MaskFrame random_mask(const firesim::GridSpec& spec, firesim::SplitRng& rng, double p = 0.5) {
  std::vector<std::uint8_t> bits(spec.cells());
  for (auto& b : bits) b = rng.uniform() < p ? 1 : 0;
  return firesim::MaskFrame(spec, std::move(bits));
}

inline firesim::ScalarField random_field(const firesim::GridSpec& spec, firesim::SplitRng& rng, double lo = 0.0,
                                         double hi = 1.0) {
  std::vector<double> v(spec.cells());
  for (auto& x : v) x = rng.uniform(lo, hi);
  return firesim::ScalarField(spec, std::move(v));
}

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Counts tally(const firesim::MaskFrame& pred, const firesim::MaskFrame& truth) {
  Counts c;
  for (std::size_t r = 0; r < pred.spec().height; ++r)
    for (std::size_t col = 0; col < pred.spec().width; ++col) {
      const bool p = pred(r, col);
      const bool t = truth(r, col);
      c.tp += p && t;
      c.fp += p && !t;
      c.fn += !p && t;
      c.tn += !p && !t;
    }
  return c;
}

inline double iou_oracle(const Counts& c) {
  const double uni = static_cast<double>(c.tp + c.fp + c.fn);
  return uni == 0 ? 1.0 : static_cast<double>(c.tp) / uni;
}

/// Precision/recall via their definitions, with the empty conventions.
inline double f1_oracle(const Counts& c) {
  if (c.tp + c.fp == 0 && c.tp + c.fn == 0) return 1.0;
  if (c.tp == 0) return 0.0;
  const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return 2.0 * p * r / (p + r);
}

/// Quadratic threshold sweep: for every distinct score (descending), recount
/// the predicted-positive set from scratch, then integrate precision over recall.
inline double auprc_quadratic(const std::vector<double>& scores, const std::vector<bool>& labels) {
  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double positives = 0;
  for (bool l : labels) positives += l;
  double area = 0.0, prev_recall = 0.0;
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) (labels[i] ? tp : fp) += 1;
    }
    const double recall = tp / positives;
    area += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return area;
}

/// SSIM of one window from explicit means and population moments.
inline double ssim_window(const firesim::ScalarField& a, const firesim::ScalarField& b, std::size_t r0,
                          std::size_t c0, double max_value) {
  std::vector<double> x, y;
  for (std::size_t r = r0; r < r0 + 8; ++r)
    for (std::size_t c = c0; c < c0 + 8; ++c) {
      x.push_back(a(r, c));
      y.push_back(b(r, c));
    }
  const auto mean = [](const std::vector<double>& v) {
    long double s = 0;
    for (double e : v) s += e;
    return static_cast<double>(s / v.size());
  };
  const double mx = mean(x), my = mean(y);
  long double vx = 0, vy = 0, cxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
    cxy += (x[i] - mx) * (y[i] - my);
  }
  const double n = static_cast<double>(x.size());
  const double sx = static_cast<double>(vx) / n, sy = static_cast<double>(vy) / n, sxy = static_cast<double>(cxy) / n;
  const double k1 = 0.01 * max_value, k2 = 0.03 * max_value;
  const double c1 = k1 * k1, c2 = k2 * k2;
  const double lum = (2 * mx * my + c1) / (mx * mx + my * my + c1);
  const double cs = (2 * sxy + c2) / (sx + sy + c2);
  return lum * cs;
}

inline double ssim_oracle(const firesim::ScalarField& a, const firesim::ScalarField& b, double max_value) {
  double total = 0;
  std::size_t n = 0;
  for (std::size_t r = 0; r + 8 <= a.spec().height; ++r)
    for (std::size_t c = 0; c + 8 <= a.spec().width; ++c, ++n) total += ssim_window(a, b, r, c, max_value);
  return total / static_cast<double>(n);
}

inline double sq_dist(const std::vector<double>& a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

/// Smallest squared distance from v to any of `samples` points of the simplex:
/// uniform samples (sorted-spacings construction) plus the vertices.
inline double simplex_scan(const std::vector<double>& v, std::size_t samples, std::mt19937_64& gen) {
  const std::size_t n = v.size();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> cut(n + 1), p(n);
  for (std::size_t s = 0; s < samples; ++s) {
    cut[0] = 0.0;
    cut[n] = 1.0;
    for (std::size_t i = 1; i < n; ++i) cut[i] = unif(gen);
    std::sort(cut.begin(), cut.end());
    for (std::size_t i = 0; i < n; ++i) p[i] = cut[i + 1] - cut[i];
    best = std::min(best, sq_dist(v, p));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(p.begin(), p.end(), 0.0);
    p[i] = 1.0;
    best = std::min(best, sq_dist(v, p));
  }
  return best;
}

/// Cells of the mask that touch a 4-neighbour outside the mask (or the grid edge).
inline std::vector<std::pair<double, double>> boundary_cells(const firesim::MaskFrame& m) {
  std::vector<std::pair<double, double>> out;
  const auto& s = m.spec();
  for (std::size_t r = 0; r < s.height; ++r)
    for (std::size_t c = 0; c < s.width; ++c) {
      if (!m(r, c)) continue;
      const bool inner = r > 0 && c > 0 && r + 1 < s.height && c + 1 < s.width && m(r - 1, c) && m(r + 1, c) &&
                         m(r, c - 1) && m(r, c + 1);
      if (!inner) out.emplace_back(static_cast<double>(r), static_cast<double>(c));
    }
  return out;
}

/// Symmetric Hausdorff distance between the boundary cells and the circle
/// centred at the mask centroid with radius equal to the mean boundary distance.
inline double circle_hausdorff(const firesim::MaskFrame& m) {
  const auto boundary = boundary_cells(m);
  if (boundary.empty()) return 0.0;
  double cr = 0, cc = 0, n = 0;
  for (std::size_t r = 0; r < m.spec().height; ++r)
    for (std::size_t c = 0; c < m.spec().width; ++c)
      if (m(r, c)) {
        cr += static_cast<double>(r);
        cc += static_cast<double>(c);
        n += 1;
      }
  cr /= n;
  cc /= n;
  double radius = 0;
  for (const auto& [r, c] : boundary) radius += std::hypot(r - cr, c - cc);
  radius /= static_cast<double>(boundary.size());
  double h = 0;
  for (const auto& [r, c] : boundary) h = std::max(h, std::abs(std::hypot(r - cr, c - cc) - radius));
  for (int k = 0; k < 720; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 720.0;
    const double pr = cr + radius * std::sin(th), pc = cc + radius * std::cos(th);
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& [r, c] : boundary) nearest = std::min(nearest, std::hypot(r - pr, c - pc));
    h = std::max(h, nearest);
  }
  return h;
}

// ------------------------------------------------------------ format validators

/// Expected decode of a PFW1 file, or nullopt when the bytes are not a valid
/// file. Valid means: magic, size == 16 + 4*H*W, H and W >= 3, dx finite and
/// positive, every value finite.
struct FieldImage {
  std::uint32_t height, width;
  float dx;
  std::vector<float> values;
};

inline std::optional<FieldImage> validate_field_bytes(const std::string& b) {
  if (b.size() < 16 || b.compare(0, 4, "PFW1") != 0) return std::nullopt;
  const auto u32 = [&](std::size_t at) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
  };
  const auto f32 = [&](std::size_t at) {
    const std::uint32_t bits = u32(at);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  };
  FieldImage img{u32(4), u32(8), f32(12), {}};
  if (img.height < 3 || img.width < 3) return std::nullopt;
  if (!(std::isfinite(img.dx) && img.dx > 0)) return std::nullopt;
  if ((b.size() - 16) != 4ull * img.height * img.width) return std::nullopt;
  for (std::size_t i = 16; i < b.size(); i += 4) {
    const float f = f32(i);
    if (!std::isfinite(f)) return std::nullopt;
    img.values.push_back(f);
  }
  return img;
}

struct PgmImage {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Expected decode of a binary mask PGM: "P5", whitespace/comment separated
/// width, height and maxval 255, exactly one whitespace byte, then W*H bytes
/// each 0 or 255, nothing after. Grids smaller than 3x3 are invalid.
inline std::optional<PgmImage> validate_mask_pgm_bytes(const std::string& b) {
  const auto is_ws = [](char c) { return std::string_view(" \t\n\r\v\f").find(c) != std::string_view::npos; };
  if (b.size() < 2 || b.compare(0, 2, "P5") != 0) return std::nullopt;
  std::size_t i = 2;
  std::vector<std::uint64_t> nums;
  while (nums.size() < 3) {
    const std::size_t start = i;
    for (;;) {
      if (i < b.size() && is_ws(b[i])) {
        ++i;
      } else if (i < b.size() && b[i] == '#') {
        while (i < b.size() && b[i] != '\n' && b[i] != '\r') ++i;
      } else {
        break;
      }
    }
    if (i == start) return std::nullopt;
    std::string digits;
    while (i < b.size() && std::isdigit(static_cast<unsigned char>(b[i]))) digits += b[i++];
    if (digits.empty() || digits.size() > 9) return std::nullopt;
    nums.push_back(std::stoull(digits));
  }
  if (nums[2] != 255) return std::nullopt;
  if (i >= b.size() || !is_ws(b[i])) return std::nullopt;
  ++i;
  PgmImage img{nums[0], nums[1], {}};
  if (img.width < 3 || img.height < 3) return std::nullopt;
  if (b.size() - i != img.width * img.height) return std::nullopt;
  for (; i < b.size(); ++i) {
    const auto p = static_cast<std::uint8_t>(b[i]);
    if (p != 0 && p != 255) return std::nullopt;
    img.pixels.push_back(p);
  }
  return img;
}

}  // namespace oracle
