// firesim command-line driver.
//
// Exit status: 0 success, 1 usage error, 2 invalid input or settings,
// 3 runtime or file failure.

#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "firesim/pipeline.hpp"

namespace {

std::string flag_for(std::string_view key) {
  std::string f = "--" + std::string(key);
  for (char& ch : f)
    if (ch == '_') ch = '-';
  return f;
}

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d = {
      {"kind", "scenario kind: circular, wind_driven or slope_driven"},
      {"size", "grid edge length in cells (square grid)"},
      {"height", "grid rows (overrides --size)"},
      {"width", "grid columns (overrides --size)"},
      {"dx", "cell edge length in metres"},
      {"seed", "random seed"},
      {"out", "output path"},
      {"observed_frames", "number of observed frames"},
      {"truth_frames", "number of ground-truth continuation frames"},
      {"dt_frame", "seconds between frames"},
      {"env", "environment directory"},
      {"init", "initial mask PGM"},
      {"frames", "frames to emit, including the initial one"},
      {"obs", "observed mask sequence directory"},
      {"fields", "observed field sequence directory"},
      {"priors", "prior mask sequence directory"},
      {"pred", "predicted mask sequence directory"},
      {"truth", "ground-truth mask sequence directory"},
      {"horizon", "number of prior frames"},
      {"c", "heat capacity"},
      {"k", "thermal conductivity"},
      {"gamma", "terrain coefficient, m/s per unit slope"},
      {"a_coeff", "reaction coefficient"},
      {"c_cool", "cooling coefficient"},
      {"b_arrhenius", "activation constant of the reaction rate"},
      {"t_ambient", "ambient temperature"},
      {"t_burn", "reference burning temperature"},
      {"dt", "integration step in seconds (default: derived from the stability bounds)"},
      {"steps_per_frame", "integration steps per frame interval"},
      {"threshold_theta", "mask threshold as a fraction of t_burn - t_ambient"},
      {"fuel_depletion", "deplete fuel while burning (true/false)"},
      {"beta_fuel", "fuel depletion coefficient"},
      {"smooth_radius", "Gaussian radius in cells for lifting masks to fields"},
      {"source_mode", "prior source: autoregressive or frozen"},
      {"tol", "source fit convergence tolerance"},
      {"max_iters", "source fit iteration limit"},
      {"boundary", "zero_flux or dirichlet_ambient"},
  };
  return d;
}

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  bool quiet = false;
  std::map<std::string, std::string> values;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-based fire-spread simulator and prior-mask generator"};
  app.require_subcommand(1);

  const std::map<std::string_view, std::string> summaries = {
      {"synth", "generate a seeded synthetic scenario"},
      {"simulate", "integrate the physical model from an initial mask"},
      {"fit-source", "fit source weights to an observed sequence"},
      {"gen-prior", "generate prior masks from observations and environment"},
      {"export-vcu", "assemble observed frames and priors into a conditioning bundle"},
      {"evaluate", "score predicted masks against ground truth"},
  };

  std::map<std::string, Command> commands;
  for (std::string_view name : firesim::kCommands) {
    Command& cmd = commands[std::string(name)];
    cmd.app = app.add_subcommand(std::string(name), summaries.at(name));
    cmd.app->add_option("--config", cmd.config_path, "flat key = value settings file; flags override it");
    cmd.app->add_flag("-q,--quiet", cmd.quiet, "suppress progress output");
    std::vector<std::string_view> keys = firesim::command_keys(name);
    keys.insert(keys.end(), std::begin(firesim::kParamKeys), std::end(firesim::kParamKeys));
    keys.insert(keys.end(), std::begin(firesim::kSimKeys), std::end(firesim::kSimKeys));
    for (std::string_view key : keys) {
      const auto it = descriptions().find(std::string(key));
      cmd.app->add_option(flag_for(key), cmd.values[std::string(key)],
                          it != descriptions().end() ? it->second : std::string(key));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  for (auto& [name, cmd] : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      firesim::CliConfig cfg;
      cfg.command = name;
      cfg.quiet = cmd.quiet;
      if (!cmd.config_path.empty()) cfg.values = firesim::read_kv_file(cmd.config_path);
      for (const auto& [key, value] : cmd.values)
        if (cmd.app->count(flag_for(key)) > 0) cfg.values.set(key, value);
      for (std::string_view key : firesim::required_keys(name)) {
        if (!cfg.values.contains(key)) {
          std::cerr << "firesim " << name << ": missing " << flag_for(key) << "\n" << cmd.app->help();
          return 1;
        }
      }
      if (name == "export-vcu" && !cfg.values.contains("fields") && !cfg.values.contains("obs")) {
        std::cerr << "firesim export-vcu: give --fields or --obs\n" << cmd.app->help();
        return 1;
      }
      firesim::run_pipeline(cfg);
      return 0;
    } catch (const firesim::Error& e) {
      std::cerr << "firesim " << name << ": " << e.what() << '\n';
      return firesim::exit_code_for(e.code());
    } catch (const std::exception& e) {
      std::cerr << "firesim " << name << ": " << e.what() << '\n';
      return 3;
    }
  }
  return 1;
}
