#pragma once

// Seeded synthetic fire scenarios with ground-truth continuation frames.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "firesim/fields.hpp"
#include "firesim/pde.hpp"
#include "firesim/random.hpp"
#include "firesim/simulator.hpp"

namespace firesim {

enum class ScenarioKind { Circular, WindDriven, SlopeDriven };

inline std::string_view scenario_kind_name(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::Circular: return "circular";
    case ScenarioKind::WindDriven: return "wind_driven";
    case ScenarioKind::SlopeDriven: return "slope_driven";
  }
  return "circular";
}

inline ScenarioKind parse_scenario_kind(std::string_view name) {
  if (name == "circular") return ScenarioKind::Circular;
  if (name == "wind_driven") return ScenarioKind::WindDriven;
  if (name == "slope_driven") return ScenarioKind::SlopeDriven;
  fail(ErrorCode::UnknownKind, "unknown scenario kind '" + std::string(name) + "'");
}

struct ScenarioOptions {
  std::size_t observed_frames = SimConfig::kDefaultHorizon;
  std::size_t truth_frames = SimConfig::kDefaultHorizon;
  double dt_frame = SimConfig::kDefaultFrameInterval;
  double wind_speed = 2.0;  ///< m/s, wind_driven only
  double slope = 0.1;       ///< rise per metre, slope_driven only
  double min_radius = 1.8;  ///< ignition disk radius range, cells
  double max_radius = 3.5;
  double threshold_theta = 0.5;
  PhysicalParams params{};
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::Circular;
  PhysicalParams params;
  Environment env;                          ///< one wind frame per observed frame
  MaskSequence observed;                    ///< frames that are fed to the prior generator
  MaskSequence truth;                       ///< continuation frames
  std::vector<ScalarField> observed_fields; ///< simulated temperature at each observed frame
  SimConfig sim;                            ///< integrator settings that produced the sequence
};

/// The first observed frame is the ignition disk. The disk sits near the grid
/// centre, shifted a quarter of the grid upwind (or downslope) so the fire has
/// room to run. Environment values are rounded to float32 so that a file
/// round trip reproduces the scenario exactly. Ground truth runs without fuel
/// depletion.
inline Scenario synth_scenario(ScenarioKind kind, const GridSpec& spec, std::uint64_t seed,
                               const ScenarioOptions& options = {}) {
  require(options.observed_frames >= 1 && options.truth_frames >= 1, ErrorCode::BadRange,
          "scenario needs observed and truth frames");
  require(options.min_radius > 0.0 && options.max_radius >= options.min_radius, ErrorCode::BadRange,
          "bad ignition radius range");
  options.params.validate();

  SplitRng rng = SplitRng(seed).split("scenario").split(scenario_kind_name(kind));
  const double h = static_cast<double>(spec.height);
  const double w = static_cast<double>(spec.width);
  double centre_col = w / 2.0 + rng.uniform(-4.0, 4.0);
  double centre_row = h / 2.0 + rng.uniform(-4.0, 4.0);
  const double radius = rng.uniform(options.min_radius, options.max_radius);

  const auto f32 = [](double v) { return static_cast<double>(static_cast<float>(v)); };
  ScalarField terrain(spec, 0.0);
  VectorField wind = VectorField::zero(spec);
  if (kind != ScenarioKind::Circular) {
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double ex = std::cos(angle);
    const double ey = std::sin(angle);
    // rows grow southward
    centre_col -= 0.25 * w * ex;
    centre_row += 0.25 * h * ey;
    if (kind == ScenarioKind::WindDriven) {
      wind = VectorField::uniform(spec, f32(options.wind_speed * ex), f32(options.wind_speed * ey));
    } else {
      terrain = ScalarField::generate(spec, [&](double x, double y) {
        return f32(options.slope * (x * ex + y * ey));
      });
    }
  }

  std::vector<double> ignition(spec.cells(), options.params.t_ambient);
  for (std::size_t r = 0; r < spec.height; ++r) {
    for (std::size_t c = 0; c < spec.width; ++c) {
      const double dr = static_cast<double>(r) - centre_row;
      const double dc = static_cast<double>(c) - centre_col;
      if (dr * dr + dc * dc <= radius * radius) ignition[spec.index(r, c)] = options.params.t_burn;
    }
  }

  Scenario out;
  out.kind = kind;
  out.params = options.params;
  out.env = Environment(terrain, std::vector<VectorField>(options.observed_frames, wind), ScalarField(spec, 1.0));
  SimConfig base;
  base.fuel_depletion = false;
  base.threshold_theta = options.threshold_theta;
  out.sim = config_for_frame_interval(options.dt_frame, out.params, out.env, base);

  const std::size_t total = options.observed_frames + options.truth_frames;
  const SimState initial{ScalarField(spec, std::move(ignition)), out.env.fuel0, 0.0};
  const SimulationResult run = simulate(initial, out.env, out.params, out.sim, total);
  const auto& frames = run.masks.frames();
  out.observed = MaskSequence({frames.begin(), frames.begin() + static_cast<long>(options.observed_frames)},
                              options.dt_frame);
  out.truth = MaskSequence({frames.begin() + static_cast<long>(options.observed_frames), frames.end()},
                           options.dt_frame);
  for (std::size_t i = 0; i < options.observed_frames; ++i) out.observed_fields.push_back(run.states[i].temp);
  return out;
}

}  // namespace firesim
