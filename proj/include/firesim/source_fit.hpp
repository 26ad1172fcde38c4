#pragma once

// Simplex-constrained least-squares fit of the combustion source as a convex
// combination of historical temperature fields.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "firesim/fields.hpp"
#include "firesim/pde.hpp"

namespace firesim {

/// Non-negative weights summing to one.
class SimplexWeights {
 public:
  static constexpr double kSumTolerance = 1e-9;

  SimplexWeights() = default;
  explicit SimplexWeights(std::vector<double> w) : w_(std::move(w)) {
    require(!w_.empty(), ErrorCode::EmptyVector, "simplex weights need at least one entry");
    double total = 0.0;
    for (double x : w_) {
      require(std::isfinite(x) && x >= 0.0, ErrorCode::BadRange, "simplex weights must be finite and >= 0");
      total += x;
    }
    require(std::abs(total - 1.0) <= kSumTolerance, ErrorCode::BadRange,
            "simplex weights sum to " + std::to_string(total));
  }

  static SimplexWeights uniform(std::size_t n) {
    require(n > 0, ErrorCode::EmptyVector, "simplex weights need at least one entry");
    return SimplexWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::span<const double> values() const& noexcept { return w_; }
  std::vector<double> values() && { return std::move(w_); }
  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const noexcept { return w_[i]; }

 private:
  std::vector<double> w_;
};

struct FitReport {
  SimplexWeights weights;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  ///< 0.5 ||H w - s||^2 after each iterate, starting with the initial point
};

struct FitOptions {
  double tol = 1e-8;
  std::size_t max_iters = 10000;
};

/// Euclidean projection onto the probability simplex by sort-and-threshold.
inline SimplexWeights project_simplex(std::span<const double> v) {
  require(!v.empty(), ErrorCode::EmptyVector, "cannot project an empty vector");
  for (double x : v) require(std::isfinite(x), ErrorCode::NonFinite, "projection input must be finite");
  const std::size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    running += u[j];
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::max(v[i] - theta, 0.0);
  // one correction pass on the support removes the cancellation error of the running sum
  double total = 0.0;
  std::size_t support = 0;
  for (double x : w)
    if (x > 0.0) {
      total += x;
      ++support;
    }
  if (support > 0) {
    const double shift = (total - 1.0) / static_cast<double>(support);
    for (std::size_t i = 0; i < n; ++i)
      if (w[i] > 0.0) w[i] = std::max(w[i] - shift, 0.0);
  }
  return SimplexWeights(std::move(w));
}

namespace detail {

inline void require_history(std::span<const ScalarField> history, std::size_t min_frames) {
  require(history.size() >= min_frames, ErrorCode::TooFewFrames,
          "need at least " + std::to_string(min_frames) + " frames, got " + std::to_string(history.size()));
  for (const auto& f : history) require_same_spec(f.spec(), history.front().spec(), "history");
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Rearranged balance equation at history frame `centre` (centred in time):
/// S = c (T[centre+1] - T[centre-1]) / (2 dt) - k lap T[centre] + v_eff . grad T[centre].
inline ScalarField estimate_observed_source_at(std::span<const ScalarField> history, std::size_t centre,
                                               const VectorField& wind, const ScalarField& terrain,
                                               const PhysicalParams& params, double dt) {
  detail::require_history(history, 3);
  params.validate();
  require(std::isfinite(dt) && dt > 0.0, ErrorCode::BadRange, "dt must be positive");
  require(centre >= 1 && centre + 1 < history.size(), ErrorCode::BadRange, "centre frame needs both neighbours");
  const ScalarField& mid = history[centre];
  require_same_spec(mid.spec(), wind.spec(), "estimate_observed_source");
  require_same_spec(mid.spec(), terrain.spec(), "estimate_observed_source");
  const ScalarField diff = diffusion(mid, params.k);
  const ScalarField adv = advection(mid, wind, terrain, params.gamma);
  const ScalarField& next = history[centre + 1];
  const ScalarField& prev = history[centre - 1];
  std::vector<double> out(mid.spec().cells());
  const double scale = params.c / (2.0 * dt);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * (next[i] - prev[i]) - diff[i] + adv[i];
  return ScalarField(mid.spec(), std::move(out));
}

/// Source estimate at the last centred frame of the history.
inline ScalarField estimate_observed_source(std::span<const ScalarField> history, const VectorField& wind,
                                            const ScalarField& terrain, const PhysicalParams& params, double dt) {
  detail::require_history(history, 3);
  return estimate_observed_source_at(history, history.size() - 2, wind, terrain, params, dt);
}

/// One estimate per history frame; the first and last frames use one-sided
/// time differences. `winds` holds one field per frame, or a single field for all.
inline std::vector<ScalarField> estimate_observed_source_series(std::span<const ScalarField> history,
                                                                std::span<const VectorField> winds,
                                                                const ScalarField& terrain,
                                                                const PhysicalParams& params, double dt) {
  detail::require_history(history, 3);
  require(winds.size() == 1 || winds.size() == history.size(), ErrorCode::WindFrameCountMismatch,
          "need one wind field or one per frame");
  params.validate();
  require(std::isfinite(dt) && dt > 0.0, ErrorCode::BadRange, "dt must be positive");
  std::vector<ScalarField> out;
  out.reserve(history.size());
  const std::size_t n = history.size();
  for (std::size_t t = 0; t < n; ++t) {
    const VectorField& wind = winds.size() == 1 ? winds[0] : winds[t];
    if (t >= 1 && t + 1 < n) {
      out.push_back(estimate_observed_source_at(history, t, wind, terrain, params, dt));
      continue;
    }
    const ScalarField& f = history[t];
    const ScalarField& other = t == 0 ? history[1] : history[n - 2];
    const double sign = t == 0 ? 1.0 : -1.0;
    const ScalarField diff = diffusion(f, params.k);
    const ScalarField adv = advection(f, wind, terrain, params.gamma);
    std::vector<double> v(f.spec().cells());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = params.c * sign * (other[i] - f[i]) / dt - diff[i] + adv[i];
    out.emplace_back(f.spec(), std::move(v));
  }
  return out;
}

/// Minimises 0.5 ||sum_t w_t history_t - s_target||^2 over the simplex with
/// projected gradient descent from the uniform point. The step is 1/L with L the
/// largest Gram eigenvalue from 50 power iterations.
inline FitReport fit_source_weights(std::span<const ScalarField> history, const ScalarField& s_target,
                                    FitOptions options = {}) {
  detail::require_history(history, 1);
  require_same_spec(history.front().spec(), s_target.spec(), "fit_source_weights");
  require(std::isfinite(options.tol) && options.tol > 0.0, ErrorCode::BadRange, "tol must be positive");
  const std::size_t n = history.size();

  std::vector<double> gram(n * n);
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = detail::dot(history[i].values(), s_target.values());
    for (std::size_t j = 0; j <= i; ++j) {
      const double g = detail::dot(history[i].values(), history[j].values());
      gram[i * n + j] = g;
      gram[j * n + i] = g;
    }
  }
  const double target_sq = detail::dot(s_target.values(), s_target.values());
  for (double g : gram) require(std::isfinite(g), ErrorCode::NonFinite, "Gram matrix overflow");
  for (double r : rhs) require(std::isfinite(r), ErrorCode::NonFinite, "Gram matrix overflow");
  require(std::isfinite(target_sq), ErrorCode::NonFinite, "target norm overflow");

  const auto gram_times = [&](std::span<const double> x, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += gram[i * n + j] * x[j];
      out[i] = s;
    }
  };
  const auto objective = [&](std::span<const double> w) {
    std::vector<double> gw(n);
    gram_times(w, gw);
    return 0.5 * detail::dot(w, gw) - detail::dot(w, rhs) + 0.5 * target_sq;
  };

  // power iteration for the largest eigenvalue of the Gram matrix
  double lipschitz = 0.0;
  {
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n);
    for (int it = 0; it < 50; ++it) {
      gram_times(x, y);
      const double norm = std::sqrt(detail::dot(y, y));
      if (norm == 0.0) break;
      for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    }
    gram_times(x, y);
    lipschitz = detail::dot(x, y);
    double diag_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag_max = std::max(diag_max, gram[i * n + i]);
    lipschitz = std::max(lipschitz, diag_max);
  }

  FitReport report;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  double current = objective(w);
  report.objective_trace.push_back(current);

  if (n > 1 && lipschitz > 0.0) {
    std::vector<double> grad(n), trial(n);
    for (std::size_t it = 0; it < options.max_iters; ++it) {
      gram_times(w, grad);
      for (std::size_t i = 0; i < n; ++i) grad[i] -= rhs[i];
      // a gradient parallel to (1, ..., 1) is normal to the simplex: stationary point
      if (std::all_of(grad.begin(), grad.end(), [&](double g) { return g == grad.front(); })) {
        report.iterations = it + 1;
        report.objective_trace.push_back(current);
        report.converged = true;
        break;
      }
      SimplexWeights next;
      double value = 0.0;
      double step_sq = 0.0;
      // The power-iteration estimate can undershoot the true eigenvalue; double L
      // whenever the quadratic upper bound that justifies the step is violated.
      for (int attempt = 0;; ++attempt) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = w[i] - grad[i] / lipschitz;
        next = project_simplex(trial);
        value = objective(next.values());
        double linear = 0.0;
        step_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = next[i] - w[i];
          linear += grad[i] * d;
          step_sq += d * d;
        }
        const double bound = current + linear + 0.5 * lipschitz * step_sq;
        if (value <= bound + 1e-13 * std::max(1.0, std::abs(current)) || attempt >= 60) break;
        lipschitz *= 2.0;
      }
      w.assign(next.values().begin(), next.values().end());
      current = value;
      report.objective_trace.push_back(current);
      report.iterations = it + 1;
      if (std::sqrt(step_sq) < options.tol) {
        report.converged = true;
        break;
      }
    }
  } else {
    // single frame, or an all-zero history: the objective is flat on the simplex
    report.converged = true;
  }
  if (!std::isfinite(current)) fail(ErrorCode::NonFinite, "fit objective is not finite");

  report.weights = SimplexWeights(w);
  std::vector<double> residual(s_target.spec().cells());
  for (std::size_t c = 0; c < residual.size(); ++c) {
    double s = -s_target[c];
    for (std::size_t t = 0; t < n; ++t) s += w[t] * history[t][c];
    residual[c] = s;
  }
  report.residual_norm = std::sqrt(detail::dot(residual, residual));
  return report;
}

/// sum_t w_t fields_t
inline ScalarField combine(const SimplexWeights& w, std::span<const ScalarField> fields) {
  require(w.size() == fields.size(), ErrorCode::SpecMismatch, "weight count does not match field count");
  detail::require_history(fields, 1);
  std::vector<double> out(fields.front().spec().cells(), 0.0);
  for (std::size_t t = 0; t < fields.size(); ++t) {
    if (w[t] == 0.0) continue;
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += w[t] * fields[t][c];
  }
  return ScalarField(fields.front().spec(), std::move(out));
}

}  // namespace firesim
