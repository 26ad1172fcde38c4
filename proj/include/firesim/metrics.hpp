#pragma once

// Segmentation and image-fidelity metrics for mask sequences and scalar frames.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "firesim/fields.hpp"

namespace firesim {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

inline Confusion confusion(const MaskFrame& pred, const MaskFrame& truth) {
  require_same_spec(pred.spec(), truth.spec(), "confusion");
  Confusion c;
  const auto p = pred.bits();
  const auto t = truth.bits();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] && t[i]) ++c.tp;
    else if (p[i]) ++c.fp;
    else if (t[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

inline double iou(const MaskFrame& pred, const MaskFrame& truth) {
  const Confusion c = confusion(pred, truth);
  const std::size_t uni = c.tp + c.fp + c.fn;
  if (uni == 0) return 1.0;
  return static_cast<double>(c.tp) / static_cast<double>(uni);
}

inline double f1(const MaskFrame& pred, const MaskFrame& truth) {
  const Confusion c = confusion(pred, truth);
  const std::size_t pred_pos = c.tp + c.fp;
  const std::size_t true_pos = c.tp + c.fn;
  if (pred_pos == 0 && true_pos == 0) return 1.0;
  if (pred_pos == 0 || true_pos == 0 || c.tp == 0) return 0.0;
  const double precision = static_cast<double>(c.tp) / static_cast<double>(pred_pos);
  const double recall = static_cast<double>(c.tp) / static_cast<double>(true_pos);
  return 2.0 * precision * recall / (precision + recall);
}

struct ScoredFrame {
  ScalarField scores;
  MaskFrame truth;

  ScoredFrame(ScalarField s, MaskFrame t) : scores(std::move(s)), truth(std::move(t)) {
    require_same_spec(scores.spec(), truth.spec(), "scored frame");
  }
};

/// Area under the precision-recall curve, pooled over all cells of all frames.
/// One threshold per distinct score; precision is integrated as a right-continuous
/// step function of recall.
inline double auprc(std::span<const ScoredFrame> frames) {
  std::vector<std::pair<double, bool>> cells;
  std::size_t positives = 0;
  for (const auto& f : frames) {
    for (std::size_t i = 0; i < f.scores.spec().cells(); ++i) {
      cells.emplace_back(f.scores[i], f.truth[i]);
      positives += f.truth[i] ? 1 : 0;
    }
  }
  require(positives > 0, ErrorCode::NoPositives, "AUPRC is undefined without positive cells");
  std::stable_sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const double total = static_cast<double>(positives);
  std::size_t tp = 0;
  std::size_t fp = 0;
  double prev_recall = 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i < cells.size();) {
    const double score = cells[i].first;
    for (; i < cells.size() && cells[i].first == score; ++i) (cells[i].second ? tp : fp) += 1;
    const double recall = static_cast<double>(tp) / total;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

inline double mse_frames(const ScalarField& pred, const ScalarField& truth) {
  require_same_spec(pred.spec(), truth.spec(), "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.spec().cells(); ++i) {
    const double d = pred[i] - truth[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.spec().cells());
}

inline ScalarField mask_to_field(const MaskFrame& mask) {
  std::vector<double> v(mask.spec().cells());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask[i] ? 1.0 : 0.0;
  return ScalarField(mask.spec(), std::move(v));
}

/// Soft-score variant: mean squared difference between scores and the 0/1 truth.
inline double mse_scores(const ScalarField& scores, const MaskFrame& truth) {
  return mse_frames(scores, mask_to_field(truth));
}

inline double psnr_from_mse(double mse, double max_value) {
  require(std::isfinite(max_value) && max_value > 0.0, ErrorCode::BadRange, "max_value must be positive");
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / mse);
}

/// +infinity when the frames are identical.
inline double psnr(const ScalarField& pred, const ScalarField& truth, double max_value) {
  return psnr_from_mse(mse_frames(pred, truth), max_value);
}

inline constexpr std::size_t kSsimWindow = 8;

/// Mean SSIM over all 8x8 windows (stride 1, fully inside the grid).
inline double ssim(const ScalarField& pred, const ScalarField& truth, double max_value) {
  require_same_spec(pred.spec(), truth.spec(), "ssim");
  require(std::isfinite(max_value) && max_value > 0.0, ErrorCode::BadRange, "max_value must be positive");
  const GridSpec& s = pred.spec();
  require(s.height >= kSsimWindow && s.width >= kSsimWindow, ErrorCode::GridTooSmall,
          "ssim needs at least 8x8, got " + describe(s));
  const double c1 = (0.01 * max_value) * (0.01 * max_value);
  const double c2 = (0.03 * max_value) * (0.03 * max_value);
  const double n = static_cast<double>(kSsimWindow * kSsimWindow);
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t r0 = 0; r0 + kSsimWindow <= s.height; ++r0) {
    for (std::size_t c0 = 0; c0 + kSsimWindow <= s.width; ++c0) {
      double sx = 0.0, sy = 0.0;
      for (std::size_t r = r0; r < r0 + kSsimWindow; ++r)
        for (std::size_t c = c0; c < c0 + kSsimWindow; ++c) {
          sx += pred(r, c);
          sy += truth(r, c);
        }
      const double mx = sx / n;
      const double my = sy / n;
      double vx = 0.0, vy = 0.0, cov = 0.0;
      for (std::size_t r = r0; r < r0 + kSsimWindow; ++r)
        for (std::size_t c = c0; c < c0 + kSsimWindow; ++c) {
          const double dx = pred(r, c) - mx;
          const double dy = truth(r, c) - my;
          vx += dx * dx;
          vy += dy * dy;
          cov += dx * dy;
        }
      vx /= n;
      vy /= n;
      cov /= n;
      total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++windows;
    }
  }
  return std::clamp(total / static_cast<double>(windows), -1.0, 1.0);
}

struct FrameMetrics {
  std::optional<double> auprc, f1, iou, mse, psnr, ssim;

  friend bool operator==(const FrameMetrics&, const FrameMetrics&) = default;
};

struct MetricReport : FrameMetrics {
  std::vector<FrameMetrics> per_frame;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// Binary predictions against binary truth. Masks are treated as 0/1 images
/// with MAX = 1 for MSE, PSNR and SSIM; SSIM is omitted on grids under 8x8 and
/// AUPRC wherever the truth has no positives. Aggregates are means over frames,
/// except AUPRC (pooled) and PSNR (of the mean MSE).
inline MetricReport evaluate_sequences(const MaskSequence& pred, const MaskSequence& truth) {
  require(pred.size() == truth.size(), ErrorCode::SpecMismatch,
          "frame counts differ: " + std::to_string(pred.size()) + " vs " + std::to_string(truth.size()));
  require_same_spec(pred.spec(), truth.spec(), "evaluate");
  const bool with_ssim = pred.spec().height >= kSsimWindow && pred.spec().width >= kSsimWindow;
  MetricReport report;
  std::vector<ScoredFrame> scored;
  double sum_f1 = 0.0, sum_iou = 0.0, sum_mse = 0.0, sum_ssim = 0.0;
  bool any_positive = false;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const ScalarField p = mask_to_field(pred[t]);
    const ScalarField g = mask_to_field(truth[t]);
    FrameMetrics fm;
    fm.iou = iou(pred[t], truth[t]);
    fm.f1 = f1(pred[t], truth[t]);
    fm.mse = mse_frames(p, g);
    fm.psnr = psnr_from_mse(*fm.mse, 1.0);
    if (with_ssim) fm.ssim = ssim(p, g, 1.0);
    scored.emplace_back(p, truth[t]);
    if (truth[t].count() > 0) {
      fm.auprc = auprc(std::span<const ScoredFrame>(&scored.back(), 1));
      any_positive = true;
    }
    sum_f1 += *fm.f1;
    sum_iou += *fm.iou;
    sum_mse += *fm.mse;
    if (fm.ssim) sum_ssim += *fm.ssim;
    report.per_frame.push_back(fm);
  }
  const double n = static_cast<double>(pred.size());
  report.f1 = sum_f1 / n;
  report.iou = sum_iou / n;
  report.mse = sum_mse / n;
  report.psnr = psnr_from_mse(*report.mse, 1.0);
  if (with_ssim) report.ssim = sum_ssim / n;
  if (any_positive) report.auprc = auprc(scored);
  return report;
}

}  // namespace firesim
