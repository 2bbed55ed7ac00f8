#pragma once

// Named experiments driven by a RunConfig. Each run writes its tables and a
// manifest.json into the output directory.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "thouless/dynamics.hpp"
#include "thouless/model.hpp"

namespace thouless {

enum class Experiment { Bands, Chern, Flatness, Phases, PumpTraditional, PumpEcho, PumpSuppressed, EffectiveCompare };

const std::vector<std::string>& experiment_names();
std::string to_string(Experiment e);
// Throws InvalidArgument for unknown names.
Experiment parse_experiment(const std::string& name);

struct RunConfig {
  ModelParams model;
  Experiment experiment = Experiment::Chern;
  int n_cycles = 0;  // 0: 2 for pump-echo, 1 otherwise
  InitialState initial = InitialState::at_site(27);
  double dt = 0.0;  // 0: default step count per cycle
  int n_t = 240;    // time samples per cycle for band experiments
  int n_t_phases = 4000;
  int band = -1;  // -1: highest band
  int samples_per_cycle = 400;
  std::filesystem::path output_dir = "out";
};

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
  bool required = true;  // required checks decide the exit status
};

struct RunResult {
  nlohmann::json manifest;
  std::vector<std::filesystem::path> files;
  std::vector<Check> checks;
  bool passed() const;
};

// Executes the experiment and writes its files. Throws thouless::Error on
// invalid configuration or numerical failure.
RunResult run(const RunConfig& config, std::ostream& log);

// Wraps run(): 0 on success, 1 on numerical/validation failure (including a
// failed required check).
int run_with_status(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace thouless
