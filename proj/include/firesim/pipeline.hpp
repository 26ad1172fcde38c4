#pragma once

// Command implementations shared by the CLI and the array API. Every command
// reads its settings from one merged key/value document (config file, then
// command-line overrides) and validates all of them before doing any work.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "firesim/fields.hpp"
#include "firesim/io.hpp"
#include "firesim/kv.hpp"
#include "firesim/metrics.hpp"
#include "firesim/pde.hpp"
#include "firesim/scenario.hpp"
#include "firesim/simulator.hpp"
#include "firesim/source_fit.hpp"

namespace firesim {

inline constexpr std::string_view kCommands[] = {"synth", "simulate", "fit-source", "gen-prior", "export-vcu", "evaluate"};

inline constexpr std::string_view kParamKeys[] = {"c",           "k",         "gamma",     "a_coeff",
                                                  "c_cool",      "b_arrhenius", "t_ambient", "t_burn"};

inline constexpr std::string_view kSimKeys[] = {"dt",           "steps_per_frame", "horizon",  "threshold_theta",
                                                "fuel_depletion", "beta_fuel",     "smooth_radius", "source_mode",
                                                "tol",          "max_iters",       "boundary"};

/// Command-specific keys; the parameter and integrator keys above are accepted too.
inline std::vector<std::string_view> command_keys(std::string_view command) {
  if (command == "synth")
    return {"kind", "size", "height", "width", "dx", "seed", "out", "observed_frames", "truth_frames", "dt_frame"};
  if (command == "simulate") return {"env", "init", "frames", "out", "seed"};
  if (command == "fit-source") return {"obs", "env", "out", "seed"};
  if (command == "gen-prior") return {"obs", "env", "out", "seed"};
  if (command == "export-vcu") return {"fields", "obs", "priors", "out", "seed"};
  if (command == "evaluate") return {"pred", "truth", "out", "seed"};
  fail(ErrorCode::BadConfig, "unknown command '" + std::string(command) + "'");
}

/// Keys without which a command cannot run (export-vcu also needs fields or obs).
inline std::vector<std::string_view> required_keys(std::string_view command) {
  if (command == "synth") return {"out"};
  if (command == "simulate") return {"env", "init", "out"};
  if (command == "fit-source" || command == "gen-prior") return {"obs", "env", "out"};
  if (command == "export-vcu") return {"priors", "out"};
  if (command == "evaluate") return {"pred", "truth"};
  fail(ErrorCode::BadConfig, "unknown command '" + std::string(command) + "'");
}

struct CliConfig {
  std::string command;
  KeyValues values;  ///< merged settings
  bool quiet = false;
};

class Log {
 public:
  explicit Log(bool quiet) : quiet_(quiet) {}
  void operator()(const std::string& line) const {
    if (!quiet_) std::cerr << "firesim: " << line << '\n';
  }

 private:
  bool quiet_;
};

inline void validate_keys(const CliConfig& cfg) {
  const auto own = command_keys(cfg.command);
  for (const auto& [key, value] : cfg.values.entries()) {
    const auto known = [&](std::span<const std::string_view> set) {
      return std::find(set.begin(), set.end(), key) != set.end();
    };
    if (!known(own) && !known(kParamKeys) && !known(kSimKeys))
      fail(ErrorCode::BadConfig, "unknown setting '" + key + "' for " + cfg.command);
  }
  for (std::string_view key : required_keys(cfg.command))
    require(cfg.values.contains(key), ErrorCode::BadConfig, cfg.command + " needs '" + std::string(key) + "'");
  if (cfg.command == "export-vcu")
    require(cfg.values.contains("fields") || cfg.values.contains("obs"), ErrorCode::BadConfig,
            "export-vcu needs 'fields' or 'obs'");
}

inline PriorSourceMode parse_source_mode(std::string_view s) {
  if (s == "autoregressive") return PriorSourceMode::Autoregressive;
  if (s == "frozen") return PriorSourceMode::Frozen;
  fail(ErrorCode::BadConfig, "source_mode must be 'autoregressive' or 'frozen', got '" + std::string(s) + "'");
}

inline Boundary parse_boundary(std::string_view s, double ambient) {
  if (s == "zero_flux") return {BoundaryMode::ZeroFlux, ambient};
  if (s == "dirichlet_ambient") return {BoundaryMode::DirichletAmbient, ambient};
  fail(ErrorCode::BadConfig, "boundary must be 'zero_flux' or 'dirichlet_ambient', got '" + std::string(s) + "'");
}

/// Integrator settings for a run driven at `dt_frame`. Without explicit dt /
/// steps_per_frame the step is derived from the stability bounds; an explicit
/// step is validated as given.
inline SimConfig sim_config_from(const KeyValues& kv, double dt_frame, const PhysicalParams& params,
                                 const Environment& env) {
  SimConfig cfg;
  if (kv.contains("horizon")) cfg.horizon_frames = kv.get_uint("horizon");
  if (kv.contains("threshold_theta")) cfg.threshold_theta = kv.get_double("threshold_theta");
  if (kv.contains("fuel_depletion")) cfg.fuel_depletion = kv.get_bool("fuel_depletion");
  if (kv.contains("beta_fuel")) cfg.beta_fuel = kv.get_double("beta_fuel");
  if (kv.contains("smooth_radius")) cfg.smooth_radius = kv.get_double("smooth_radius");
  if (kv.contains("source_mode")) cfg.source_mode = parse_source_mode(kv.at("source_mode"));
  if (kv.contains("tol")) cfg.fit.tol = kv.get_double("tol");
  if (kv.contains("max_iters")) cfg.fit.max_iters = kv.get_uint("max_iters");
  cfg.boundary = parse_boundary(kv.contains("boundary") ? kv.at("boundary") : "zero_flux", params.t_ambient);
  const bool has_dt = kv.contains("dt");
  const bool has_steps = kv.contains("steps_per_frame");
  if (!has_dt && !has_steps) return config_for_frame_interval(dt_frame, params, env, cfg);
  if (has_dt) cfg.dt = kv.get_double("dt");
  if (has_steps) cfg.steps_per_frame = kv.get_uint("steps_per_frame");
  if (has_dt && !has_steps) {
    const double ratio = dt_frame / cfg.dt;
    const double rounded = std::round(ratio);
    require(rounded >= 1.0 && std::abs(ratio - rounded) * cfg.dt <= 1e-6, ErrorCode::BadRange,
            "dt does not divide dt_frame evenly");
    cfg.steps_per_frame = static_cast<std::size_t>(rounded);
  } else if (!has_dt) {
    require(cfg.steps_per_frame >= 1, ErrorCode::BadRange, "steps_per_frame must be >= 1");
    cfg.dt = dt_frame / static_cast<double>(cfg.steps_per_frame);
  }
  cfg.validate(dt_frame, params, env);
  return cfg;
}

/// Parameters stored next to an environment (if any), then overrides.
inline PhysicalParams params_from(const KeyValues& kv, const fs::path& env_dir) {
  PhysicalParams p;
  if (fs::is_regular_file(env_dir / kParamsName)) p = read_params(env_dir / kParamsName);
  apply_params(p, kv);
  p.validate();
  return p;
}

inline double env_dt_frame(const fs::path& env_dir) {
  return detail::read_manifest(env_dir).get_double("dt_frame");
}

/// Stage 1 + stage 2 from in-memory inputs; the one code path behind both the
/// `gen-prior` command and the array API.
inline PriorResult generate_prior(const MaskSequence& observed, const Environment& env, const KeyValues& settings) {
  PhysicalParams params;
  apply_params(params, settings);
  params.validate();
  require(env.wind.size() == observed.size(), ErrorCode::WindFrameCountMismatch,
          std::to_string(env.wind.size()) + " wind frames for " + std::to_string(observed.size()) + " observed frames");
  const SimConfig cfg = sim_config_from(settings, observed.dt_frame(), params, env);
  return run_prior(observed, env, params, cfg);
}

/// Settings with the environment's stored parameters filled in underneath.
inline KeyValues with_env_params(const KeyValues& kv, const fs::path& env_dir) {
  const PhysicalParams p = params_from(kv, env_dir);
  KeyValues merged = kv;
  const KeyValues stored = params_to_kv(p);
  for (const auto& [k, v] : stored.entries()) merged.set(k, v);
  return merged;
}

inline fs::path path_setting(const KeyValues& kv, std::string_view key) {
  const std::string& v = kv.at(key);
  require(!v.empty(), ErrorCode::BadConfig, "empty path for '" + std::string(key) + "'");
  return fs::path(v);
}

// ---------------------------------------------------------------- commands

inline void run_synth(const CliConfig& cfg, const Log& log) {
  const KeyValues& kv = cfg.values;
  const ScenarioKind kind = parse_scenario_kind(kv.contains("kind") ? kv.at("kind") : "circular");
  const std::size_t size = kv.contains("size") ? kv.get_uint("size") : 128;
  const std::size_t height = kv.contains("height") ? kv.get_uint("height") : size;
  const std::size_t width = kv.contains("width") ? kv.get_uint("width") : size;
  const GridSpec spec(height, width, kv.contains("dx") ? kv.get_double("dx") : 1.0);
  ScenarioOptions opt;
  if (kv.contains("observed_frames")) opt.observed_frames = kv.get_uint("observed_frames");
  if (kv.contains("truth_frames")) opt.truth_frames = kv.get_uint("truth_frames");
  if (kv.contains("dt_frame")) opt.dt_frame = kv.get_double("dt_frame");
  if (kv.contains("threshold_theta")) opt.threshold_theta = kv.get_double("threshold_theta");
  apply_params(opt.params, kv);
  opt.params.validate();
  const std::uint64_t seed = kv.contains("seed") ? kv.get_uint("seed") : 0;
  const fs::path out = path_setting(kv, "out");

  log("synth " + std::string(scenario_kind_name(kind)) + " " + describe(spec) + " seed " + std::to_string(seed));
  const Scenario s = synth_scenario(kind, spec, seed, opt);

  write_mask_sequence(s.observed, out / "observed");
  write_mask_sequence(s.truth, out / "truth");
  write_environment(s.env, opt.dt_frame, out / "env");
  write_params(s.params, out / "env" / kParamsName);
  write_field_sequence(s.observed_fields, opt.dt_frame, out / "fields");
  KeyValues meta;
  meta.set("kind", std::string(scenario_kind_name(kind)));
  meta.set("seed", std::to_string(seed));
  detail::put_spec(meta, spec);
  meta.set("observed_frames", opt.observed_frames);
  meta.set("truth_frames", opt.truth_frames);
  meta.set("dt_frame", opt.dt_frame);
  meta.set("dt", s.sim.dt);
  meta.set("steps_per_frame", s.sim.steps_per_frame);
  meta.set("fuel_depletion", s.sim.fuel_depletion);
  write_kv_file(out / "scenario.txt", meta, "firesim synthetic scenario");
  log("wrote " + out.string());
}

inline void run_simulate(const CliConfig& cfg, const Log& log) {
  const KeyValues& kv = cfg.values;
  const fs::path env_dir = path_setting(kv, "env");
  const fs::path out = path_setting(kv, "out");
  const double dt_frame = env_dt_frame(env_dir);
  const Environment env = read_environment(env_dir);
  const PhysicalParams params = params_from(kv, env_dir);
  const MaskFrame init = read_mask_pgm(path_setting(kv, "init"), env.spec().dx);
  require_same_spec(init.spec(), env.spec(), "simulate initial mask");
  const SimConfig sim = sim_config_from(kv, dt_frame, params, env);
  const std::size_t frames = kv.contains("frames") ? kv.get_uint("frames") : sim.horizon_frames;
  require(frames >= 1, ErrorCode::BadRange, "frames must be >= 1");
  log("simulate " + std::to_string(frames) + " frames, dt " + format_double(sim.dt) + " x " +
      std::to_string(sim.steps_per_frame));
  const SimState initial{field_from_mask(init, params.t_ambient, params.t_burn, 0.0), env.fuel0, 0.0};
  const SimulationResult run = simulate(initial, env, params, sim, frames);
  std::vector<ScalarField> temps;
  for (const auto& s : run.states) temps.push_back(s.temp);
  write_mask_sequence(run.masks, out / "masks");
  write_field_sequence(temps, dt_frame, out / "fields");
  log("wrote " + out.string());
}

inline void run_fit_source(const CliConfig& cfg, const Log& log) {
  const KeyValues& kv = cfg.values;
  const fs::path obs_dir = path_setting(kv, "obs");
  const fs::path env_dir = path_setting(kv, "env");
  const fs::path out = path_setting(kv, "out");
  const MaskSequence observed = read_mask_sequence(obs_dir);
  const Environment env = read_environment(env_dir);
  require(env.wind.size() == observed.size(), ErrorCode::WindFrameCountMismatch,
          "environment has " + std::to_string(env.wind.size()) + " wind frames, observed " +
              std::to_string(observed.size()));
  const PhysicalParams params = params_from(kv, env_dir);
  const SimConfig sim = sim_config_from(kv, observed.dt_frame(), params, env);
  require(observed.size() >= 3, ErrorCode::TooFewFrames, "source fit needs >= 3 observed frames");
  std::vector<ScalarField> lifted;
  for (const auto& m : observed.frames())
    lifted.push_back(field_from_mask(m, params.t_ambient, params.t_burn, sim.smooth_radius));
  const ScalarField s_obs =
      estimate_observed_source(lifted, env.wind_at(observed.size() - 2), env.terrain, params, observed.dt_frame());
  const FitReport report = fit_source_weights(lifted, s_obs, sim.fit);
  log("fit: " + std::to_string(report.iterations) + " iterations, residual " + format_double(report.residual_norm) +
      (report.converged ? "" : " (not converged)"));
  if (out.has_parent_path()) ensure_directory(out.parent_path());
  write_fit_report(report, out);
}

inline void run_gen_prior(const CliConfig& cfg, const Log& log) {
  const KeyValues& kv = cfg.values;
  const fs::path out = path_setting(kv, "out");
  const fs::path env_dir = path_setting(kv, "env");
  const MaskSequence observed = read_mask_sequence(path_setting(kv, "obs"));
  const Environment env = read_environment(env_dir);
  const PriorResult result = generate_prior(observed, env, with_env_params(kv, env_dir));
  log("fit: " + std::to_string(result.fit.iterations) + " iterations, residual " +
      format_double(result.fit.residual_norm) + (result.fit.converged ? "" : " (not converged, using best weights)"));
  write_mask_sequence(result.priors, out);
  write_fit_report(result.fit, out / "fit_report.txt");
  log("wrote " + std::to_string(result.priors.size()) + " prior frames to " + out.string());
}

inline void run_export_vcu(const CliConfig& cfg, const Log& log) {
  const KeyValues& kv = cfg.values;
  const fs::path out = path_setting(kv, "out");
  const MaskSequence priors = read_mask_sequence(path_setting(kv, "priors"));
  std::vector<ScalarField> observed;
  std::vector<std::pair<std::string, std::string>> provenance;
  if (kv.contains("fields")) {
    require(!kv.contains("obs"), ErrorCode::BadConfig, "give either fields or obs, not both");
    observed = read_field_sequence(path_setting(kv, "fields")).fields;
    provenance.emplace_back("observed", "fields:" + kv.at("fields"));
  } else {
    const MaskSequence obs = read_mask_sequence(path_setting(kv, "obs"));
    for (const auto& m : obs.frames()) observed.push_back(mask_to_field(m));
    provenance.emplace_back("observed", "masks:" + kv.at("obs"));
  }
  provenance.emplace_back("priors", kv.at("priors"));
  const VcuBundle b = export_vcu_bundle(observed, priors, out, provenance);
  log("bundle a=" + std::to_string(b.a) + " b=" + std::to_string(b.b) + " -> " + out.string());
}

inline MetricReport run_evaluate(const CliConfig& cfg, const Log& log) {
  const KeyValues& kv = cfg.values;
  const MaskSequence pred = read_mask_sequence(path_setting(kv, "pred"));
  const MaskSequence truth = read_mask_sequence(path_setting(kv, "truth"));
  const MetricReport report = evaluate_sequences(pred, truth);
  if (kv.contains("out")) {
    const fs::path out = path_setting(kv, "out");
    if (out.has_parent_path()) ensure_directory(out.parent_path());
    write_metric_report(report, out);
    log("wrote " + out.string());
  } else {
    std::cout << metric_report_to_kv(report).serialize("firesim evaluation");
  }
  return report;
}

/// Runs one command. Returns the metric report for `evaluate`.
inline std::optional<MetricReport> run_pipeline(const CliConfig& cfg) {
  validate_keys(cfg);
  const Log log(cfg.quiet);
  if (cfg.command == "synth") run_synth(cfg, log);
  else if (cfg.command == "simulate") run_simulate(cfg, log);
  else if (cfg.command == "fit-source") run_fit_source(cfg, log);
  else if (cfg.command == "gen-prior") run_gen_prior(cfg, log);
  else if (cfg.command == "export-vcu") run_export_vcu(cfg, log);
  else if (cfg.command == "evaluate") return run_evaluate(cfg, log);
  return std::nullopt;
}

/// 2 for invalid inputs or settings, 3 for runtime and file failures.
inline int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFinite:
    case ErrorCode::FitDiverged:
    case ErrorCode::BadMagic:
    case ErrorCode::NonBinaryPixel:
    case ErrorCode::TruncatedPayload:
    case ErrorCode::MissingManifest:
    case ErrorCode::MissingComponent:
    case ErrorCode::Io:
      return 3;
    default:
      return 2;
  }
}

}  // namespace firesim
