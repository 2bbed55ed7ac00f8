// Command-line driver. Configuration comes from an optional key = value file
// (first positional argument) and from flags; flags win.
//
//   thouless_pump run.cfg --experiment pump-echo --out results/echo
//
// Config file grammar: one `key = value` per line, keys are the long flag
// names without dashes, '#' starts a comment.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "thouless/experiment.hpp"

int main(int argc, char** argv) {
  using namespace thouless;
  RunConfig cfg;
  std::string experiment = "chern";
  std::string tunneling = "uniform";
  std::string sign = "plus";
  std::string out = "out";
  int site = 27;
  int mlws_band = -1;
  int mlws_cell = 9;

  CLI::App app{"Thouless pumping in the commensurate Aubry-Andre-Harper model"};
  app.option_defaults()->always_capture_default();
  app.set_config("config", "", "key = value configuration file");
  app.allow_config_extras(false);

  app.add_option("--experiment", experiment, "Experiment to run")->check(CLI::IsMember(experiment_names()));
  app.add_option("--out", out, "Output directory");
  app.add_option("--J", cfg.model.J, "Tunneling strength");
  app.add_option("--V0", cfg.model.V0, "On-site modulation amplitude");
  app.add_option("--p", cfg.model.p, "Numerator of beta = p/q");
  app.add_option("--q", cfg.model.q, "Sites per cell");
  app.add_option("--L", cfg.model.L, "Number of cells");
  app.add_option("--phi0", cfg.model.phi0, "Initial phase");
  app.add_option("--omega", cfg.model.omega, "Modulation frequency");
  app.add_option("--tunneling", tunneling, "Tunneling mode")->check(CLI::IsMember({"uniform", "sine"}));
  app.add_option("--sign", sign, "Overall sign of H")->check(CLI::IsMember({"plus", "minus"}));
  app.add_option("--cycles", cfg.n_cycles, "Pumping cycles (0: experiment default)")->check(CLI::NonNegativeNumber);
  app.add_option("--site", site, "Initial site (1-based)");
  app.add_option("--mlws-band", mlws_band, "Start from the MLWS of this band (0-based) instead of a site");
  app.add_option("--mlws-cell", mlws_cell, "Cell of the initial MLWS (1-based)");
  app.add_option("--dt", cfg.dt, "Time step (0: default)")->check(CLI::NonNegativeNumber);
  app.add_option("--nt", cfg.n_t, "Time samples per cycle for band experiments")->check(CLI::PositiveNumber);
  app.add_option("--nt-phases", cfg.n_t_phases, "Time samples per cycle for phases")->check(CLI::PositiveNumber);
  app.add_option("--band", cfg.band, "Band index for phases (-1: highest)");
  app.add_option("--samples-per-cycle", cfg.samples_per_cycle, "Recorded samples per cycle")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  cfg.experiment = parse_experiment(experiment);
  cfg.model.tunneling_mode = tunneling == "sine" ? TunnelingMode::SineModulated : TunnelingMode::Uniform;
  cfg.model.sign = sign == "minus" ? Sign::Minus : Sign::Plus;
  cfg.initial = mlws_band >= 0 ? InitialState::mlws(mlws_band, mlws_cell) : InitialState::at_site(site);
  cfg.output_dir = out;
  return run_with_status(cfg, std::cout, std::cerr);
}
