#pragma once

// Explicit time integration of the thermal balance and the two-stage prior
// generator (source fit, then forward rollout).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "firesim/fields.hpp"
#include "firesim/pde.hpp"
#include "firesim/source_fit.hpp"

namespace firesim {

struct Environment {
  ScalarField terrain;            ///< z, metres
  std::vector<VectorField> wind;  ///< one field per observation frame, m/s
  ScalarField fuel0;              ///< initial fuel concentration, >= 0

  Environment() = default;
  Environment(ScalarField terrain_, std::vector<VectorField> wind_, ScalarField fuel0_)
      : terrain(std::move(terrain_)), wind(std::move(wind_)), fuel0(std::move(fuel0_)) {
    validate();
  }

  void validate() const {
    require(!wind.empty(), ErrorCode::EmptyInput, "environment needs at least one wind frame");
    require_same_spec(terrain.spec(), fuel0.spec(), "environment fuel");
    for (const auto& w : wind) require_same_spec(terrain.spec(), w.spec(), "environment wind");
    require_nonnegative_fuel(fuel0);
  }

  const GridSpec& spec() const noexcept { return terrain.spec(); }

  /// Zero-order hold beyond the observed window.
  const VectorField& wind_at(std::size_t frame) const noexcept { return wind[std::min(frame, wind.size() - 1)]; }

  friend bool operator==(const Environment&, const Environment&) = default;
};

/// Stage-2 source used by the prior rollout.
enum class PriorSourceMode {
  Frozen,         ///< combination of the observed (lifted) history, fixed for the whole rollout
  Autoregressive  ///< same weights applied to a window that slides over the rollout's own frames
};

struct CflLimits {
  double diffusion = std::numeric_limits<double>::infinity();  ///< dx^2 c / (4k)
  double advection = std::numeric_limits<double>::infinity();  ///< dx c / max |v_eff|
  double combined = std::numeric_limits<double>::infinity();   ///< c / (4k/dx^2 + max(|u|+|v|)/dx + C)

  double binding() const noexcept { return std::min({diffusion, advection, combined}); }
};

inline CflLimits cfl_limits(const PhysicalParams& params, const Environment& env) {
  params.validate();
  const GridSpec& s = env.spec();
  double max_norm = 0.0;
  double max_l1 = 0.0;
  for (const auto& w : env.wind) {
    const VectorField veff = effective_velocity(w, env.terrain, params.gamma);
    for (std::size_t i = 0; i < s.cells(); ++i) {
      const double u = veff.u()[i];
      const double v = veff.v()[i];
      max_norm = std::max(max_norm, std::hypot(u, v));
      max_l1 = std::max(max_l1, std::abs(u) + std::abs(v));
    }
  }
  CflLimits lim;
  if (params.k > 0.0) lim.diffusion = s.dx * s.dx * params.c / (4.0 * params.k);
  if (max_norm > 0.0) lim.advection = s.dx * params.c / max_norm;
  const double rate = 4.0 * params.k / (s.dx * s.dx) + max_l1 / s.dx + params.c_cool;
  if (rate > 0.0) lim.combined = params.c / rate;
  return lim;
}

inline void check_cfl(double dt, const PhysicalParams& params, const Environment& env) {
  const CflLimits lim = cfl_limits(params, env);
  if (dt > lim.diffusion)
    fail(ErrorCode::CflViolation,
         "dt=" + std::to_string(dt) + " exceeds diffusion bound " + std::to_string(lim.diffusion));
  if (dt > lim.advection)
    fail(ErrorCode::CflViolation,
         "dt=" + std::to_string(dt) + " exceeds advection bound " + std::to_string(lim.advection));
  if (dt > lim.combined)
    fail(ErrorCode::CflViolation,
         "dt=" + std::to_string(dt) + " exceeds combined monotonicity bound " + std::to_string(lim.combined));
}

struct SimConfig {
  static constexpr double kDefaultFrameInterval = 5.0;
  static constexpr std::size_t kDefaultHorizon = 17;

  double dt = 0.5;
  std::size_t steps_per_frame = 10;
  std::size_t horizon_frames = kDefaultHorizon;
  double threshold_theta = 0.5;
  bool fuel_depletion = true;
  double beta_fuel = std::numbers::ln2 / 60.0;  ///< fuel halves in ~60 s at r = 1
  double smooth_radius = 2.0;
  PriorSourceMode source_mode = PriorSourceMode::Autoregressive;
  FitOptions fit{};
  Boundary boundary{};

  double frame_interval() const noexcept { return dt * static_cast<double>(steps_per_frame); }

  /// Validates every invariant, including stability against params and env.
  void validate(double dt_frame, const PhysicalParams& params, const Environment& env) const {
    require(std::isfinite(dt) && dt > 0.0, ErrorCode::BadRange, "dt must be positive");
    require(steps_per_frame >= 1, ErrorCode::BadRange, "steps_per_frame must be >= 1");
    require(horizon_frames >= 1, ErrorCode::BadRange, "horizon_frames must be >= 1");
    require(threshold_theta > 0.0 && threshold_theta < 1.0, ErrorCode::BadRange, "threshold_theta must be in (0,1)");
    require(std::isfinite(beta_fuel) && beta_fuel >= 0.0, ErrorCode::BadRange, "beta_fuel must be >= 0");
    require(std::isfinite(smooth_radius) && smooth_radius >= 0.0, ErrorCode::BadRange, "smooth_radius must be >= 0");
    require(std::abs(frame_interval() - dt_frame) <= 1e-6, ErrorCode::BadRange,
            "dt * steps_per_frame = " + std::to_string(frame_interval()) + " does not match dt_frame " +
                std::to_string(dt_frame));
    check_cfl(dt, params, env);
  }
};

/// Builds a validated config whose dt is the largest step no more than
/// `safety` times the binding stability bound that divides dt_frame evenly.
inline SimConfig config_for_frame_interval(double dt_frame, const PhysicalParams& params, const Environment& env,
                                    SimConfig base = {}, double safety = 0.9) {
  require(std::isfinite(dt_frame) && dt_frame > 0.0, ErrorCode::BadRange, "dt_frame must be positive");
  const double bound = cfl_limits(params, env).binding();
  std::size_t steps = 1;
  if (std::isfinite(bound)) steps = static_cast<std::size_t>(std::ceil(dt_frame / (safety * bound)));
  base.steps_per_frame = std::max<std::size_t>(steps, 1);
  base.dt = dt_frame / static_cast<double>(base.steps_per_frame);
  base.validate(dt_frame, params, env);
  return base;
}

struct SimState {
  ScalarField temp;
  ScalarField fuel;
  double time = 0.0;  ///< seconds since sequence start
};

using SourceFn = std::function<ScalarField(const ScalarField& temp, const ScalarField& fuel)>;

inline SourceFn physical_source(const PhysicalParams& params) {
  return [params](const ScalarField& temp, const ScalarField& fuel) { return source_term(temp, fuel, params); };
}

struct StepOptions {
  std::size_t wind_frame = 0;
  bool fuel_depletion = true;
  double beta_fuel = std::numbers::ln2 / 60.0;
  Boundary boundary{};
};

namespace detail {

/// Forward-Euler update given a precomputed effective velocity. Shared by the
/// public step() and the cached integrator so both produce identical bits.
inline SimState euler_update(const SimState& state, const VectorField& veff, const PhysicalParams& params,
                             const SourceFn& src, double dt, bool fuel_depletion, double beta_fuel,
                             Boundary boundary) {
  const GridSpec& s = state.temp.spec();
  const ScalarField diff = diffusion(state.temp, params.k, boundary);
  const ScalarField adv = advection_with(state.temp, veff, boundary);
  const ScalarField source = src(state.temp, state.fuel);
  require_same_spec(s, source.spec(), "source function");
  const double scale = dt / params.c;
  std::vector<double> t_next(s.cells());
  for (std::size_t i = 0; i < t_next.size(); ++i) {
    const double v = state.temp[i] + scale * (diff[i] - adv[i] + source[i]);
    if (!std::isfinite(v))
      fail(ErrorCode::NonFinite, "temperature blow-up at row " + std::to_string(i / s.width) + ", col " +
                                     std::to_string(i % s.width) + ", t=" + std::to_string(state.time + dt));
    t_next[i] = v;
  }
  SimState next{ScalarField(s, std::move(t_next)), state.fuel, state.time + dt};
  if (fuel_depletion && beta_fuel > 0.0) {
    std::vector<double> f_next(s.cells());
    for (std::size_t i = 0; i < f_next.size(); ++i) {
      const double factor = 1.0 - dt * beta_fuel * reaction_rate(state.temp[i], params);
      f_next[i] = std::max(state.fuel[i] * factor, 0.0);
    }
    next.fuel = ScalarField(s, std::move(f_next));
  }
  return next;
}

}  // namespace detail

/// One explicit step of c dT/dt = k lap T - v_eff . grad T + src(T, F).
inline SimState step(const SimState& state, const Environment& env, const PhysicalParams& params,
                     const SourceFn& src, double dt, const StepOptions& options = {}) {
  params.validate();
  require_same_spec(state.temp.spec(), env.spec(), "step temperature");
  require_same_spec(state.fuel.spec(), env.spec(), "step fuel");
  require(std::isfinite(dt) && dt > 0.0, ErrorCode::BadRange, "dt must be positive");
  check_cfl(dt, params, env);
  const VectorField veff = effective_velocity(env.wind_at(options.wind_frame), env.terrain, params.gamma);
  return detail::euler_update(state, veff, params, src, dt, options.fuel_depletion, options.beta_fuel,
                              options.boundary);
}

/// Frame-by-frame integrator with the effective velocities cached per wind
/// frame. The config must already be validated.
class Integrator {
 public:
  Integrator(const Environment& env, const PhysicalParams& params, const SimConfig& cfg)
      : env_(env), params_(params), cfg_(cfg) {
    veff_.reserve(env.wind.size());
    for (const auto& w : env.wind) veff_.push_back(effective_velocity(w, env.terrain, params.gamma));
  }

  /// Advances `state` by one frame interval. `frame` selects the wind field.
  SimState advance_frame(SimState state, std::size_t frame, const SourceFn& src) const {
    const VectorField& veff = veff_[std::min(frame, veff_.size() - 1)];
    for (std::size_t k = 0; k < cfg_.steps_per_frame; ++k)
      state = detail::euler_update(state, veff, params_, src, cfg_.dt, cfg_.fuel_depletion, cfg_.beta_fuel,
                                   cfg_.boundary);
    return state;
  }

 private:
  const Environment& env_;
  const PhysicalParams& params_;
  const SimConfig& cfg_;
  std::vector<VectorField> veff_;
};

inline double mask_threshold(const PhysicalParams& params, double theta) noexcept {
  return params.t_ambient + theta * (params.t_burn - params.t_ambient);
}

struct SimulationResult {
  std::vector<SimState> states;  ///< one per emitted frame, the initial state first
  MaskSequence masks;
};

/// Integrates the full physical model and thresholds `frames` snapshots
/// (including the initial one) at the config's mask threshold.
inline SimulationResult simulate(const SimState& initial, const Environment& env, const PhysicalParams& params,
                                 const SimConfig& cfg, std::size_t frames, std::size_t first_wind_frame = 0) {
  require(frames >= 1, ErrorCode::BadRange, "need at least one frame");
  cfg.validate(cfg.frame_interval(), params, env);
  require_same_spec(initial.temp.spec(), env.spec(), "simulate");
  require_same_spec(initial.fuel.spec(), env.spec(), "simulate");
  require_nonnegative_fuel(initial.fuel);
  const Integrator integrator(env, params, cfg);
  const SourceFn src = physical_source(params);
  const double threshold = mask_threshold(params, cfg.threshold_theta);
  SimulationResult out;
  std::vector<MaskFrame> masks;
  SimState state = initial;
  for (std::size_t f = 0; f < frames; ++f) {
    if (f > 0) state = integrator.advance_frame(std::move(state), first_wind_frame + f - 1, src);
    masks.push_back(mask_from_field(state.temp, threshold));
    out.states.push_back(state);
  }
  out.masks = MaskSequence(std::move(masks), cfg.frame_interval());
  return out;
}

struct PriorResult {
  MaskSequence priors;
  FitReport fit;
  ScalarField observed_source;  ///< S_obs the weights were fitted against
};

/// Two-stage prior generator. Stage 1 lifts the observed masks to fields,
/// estimates the source at the last centred frame and fits simplex weights.
/// Stage 2 starts from the last lifted frame and integrates with the fitted
/// source, applied only where r(T) > 0, emitting one mask per frame interval.
inline PriorResult run_prior(const MaskSequence& observed, const Environment& env, const PhysicalParams& params,
                             const SimConfig& cfg) {
  require(observed.size() >= 3, ErrorCode::TooFewFrames,
          "prior generation needs >= 3 observed frames, got " + std::to_string(observed.size()));
  env.validate();
  require_same_spec(observed.spec(), env.spec(), "run_prior");
  params.validate();
  cfg.validate(observed.dt_frame(), params, env);

  const std::size_t n = observed.size();
  std::vector<ScalarField> lifted;
  lifted.reserve(n);
  for (const auto& m : observed.frames())
    lifted.push_back(field_from_mask(m, params.t_ambient, params.t_burn, cfg.smooth_radius));

  PriorResult result;
  result.observed_source =
      estimate_observed_source(lifted, env.wind_at(n - 2), env.terrain, params, observed.dt_frame());
  result.fit = fit_source_weights(lifted, result.observed_source, cfg.fit);

  const SimplexWeights& weights = result.fit.weights;
  std::deque<ScalarField> window(lifted.begin(), lifted.end());
  const auto gated = [&params](const ScalarField& basis) -> SourceFn {
    return [&params, basis](const ScalarField& temp, const ScalarField&) {
      return field_map2(basis, temp, [&](double s, double t) { return t > params.t_ambient ? s : 0.0; });
    };
  };

  const Integrator integrator(env, params, cfg);
  const double threshold = mask_threshold(params, cfg.threshold_theta);
  SimState state{lifted.back(), env.fuel0, static_cast<double>(n - 1) * observed.dt_frame()};
  std::vector<MaskFrame> priors;
  priors.reserve(cfg.horizon_frames);
  std::optional<ScalarField> frozen;
  for (std::size_t h = 0; h < cfg.horizon_frames; ++h) {
    const std::vector<ScalarField> basis_fields(window.begin(), window.end());
    if (cfg.source_mode == PriorSourceMode::Frozen && !frozen) frozen = combine(weights, basis_fields);
    const ScalarField basis = cfg.source_mode == PriorSourceMode::Frozen ? *frozen : combine(weights, basis_fields);
    state = integrator.advance_frame(std::move(state), n - 1 + h, gated(basis));
    priors.push_back(mask_from_field(state.temp, threshold));
    if (cfg.source_mode == PriorSourceMode::Autoregressive) {
      window.pop_front();
      window.push_back(state.temp);
    }
  }
  result.priors = MaskSequence(std::move(priors), observed.dt_frame());
  return result;
}

}  // namespace firesim
