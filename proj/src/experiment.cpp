#include "thouless/experiment.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "thouless/effective.hpp"
#include "thouless/observables.hpp"
#include "thouless/spectrum.hpp"
#include "thouless/table_io.hpp"
#include "thouless/wannier.hpp"

namespace thouless {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kNormDriftLimit = 1e-8;
constexpr double kSeamThreshold = 1e-3;

const char* mode_name(TunnelingMode m) { return m == TunnelingMode::Uniform ? "uniform" : "sine"; }

json model_json(const ModelParams& p) {
  return {{"J", p.J},       {"V0", p.V0},       {"p", p.p},
          {"q", p.q},       {"L", p.L},         {"N", p.num_sites()},
          {"phi0", p.phi0}, {"omega", p.omega}, {"tunneling", mode_name(p.tunneling_mode)},
          {"sign", p.sign == Sign::Plus ? "plus" : "minus"}};
}

json initial_json(const InitialState& s) {
  if (s.kind == InitialState::Kind::Site) return {{"kind", "site"}, {"site", s.site}};
  return {{"kind", "mlws"}, {"band", s.band}, {"cell", s.cell}};
}

class Runner {
 public:
  Runner(const RunConfig& config, std::ostream& log) : cfg_(config), log_(log) {}

  RunResult execute() {
    cfg_.model.validate();
    fs::create_directories(cfg_.output_dir);
    result_.manifest["experiment"] = to_string(cfg_.experiment);
    result_.manifest["model"] = model_json(cfg_.model);
    result_.manifest["tolerances"] = {{"band_gap", 1e-6 * std::abs(cfg_.model.V0)},
                                      {"chern_integrality", 1e-6},
                                      {"phase_step_limit", 0.9 * std::numbers::pi},
                                      {"time_overlap_min", 0.99},
                                      {"spread_closure", 1e-10},
                                      {"krylov", 1e-14},
                                      {"norm_drift_limit", kNormDriftLimit},
                                      {"seam_threshold", kSeamThreshold}};
    switch (cfg_.experiment) {
      case Experiment::Bands:
        bands();
        break;
      case Experiment::Chern:
        chern();
        break;
      case Experiment::Flatness:
        flatness_experiment();
        break;
      case Experiment::Phases:
        phases();
        break;
      case Experiment::PumpTraditional:
        pump(Protocol::Traditional);
        break;
      case Experiment::PumpEcho:
        pump(Protocol::Echo);
        break;
      case Experiment::PumpSuppressed:
        pump(Protocol::Suppressed);
        break;
      case Experiment::EffectiveCompare:
        effective_compare();
        break;
    }
    json checks = json::array();
    for (const Check& c : result_.checks) {
      checks.push_back(
          {{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}, {"required", c.required}});
    }
    result_.manifest["checks"] = checks;
    json files = json::array();
    for (const fs::path& f : result_.files) files.push_back(f.filename().string());
    files.push_back("manifest.json");
    result_.manifest["files"] = files;
    const fs::path manifest_path = cfg_.output_dir / "manifest.json";
    std::ofstream out(manifest_path);
    if (!out) throw Error("cannot write " + manifest_path.string());
    out << result_.manifest.dump(2) << '\n';
    result_.files.push_back(manifest_path);
    return std::move(result_);
  }

 private:
  int band_index() const {
    const int m = cfg_.band < 0 ? cfg_.model.q - 1 : cfg_.band;
    if (m >= cfg_.model.q) throw InvalidArgument("band index " + std::to_string(m) + " out of range");
    return m;
  }

  int cycles(Protocol p) const {
    if (cfg_.n_cycles > 0) return cfg_.n_cycles;
    return p == Protocol::Echo ? 2 : 1;
  }

  void check(std::string name, double value, double limit, bool pass, bool required = true) {
    log_ << (pass ? "  ok    " : "  FAIL  ") << name << " = " << format_number(value) << " (limit "
         << format_number(limit) << ")\n";
    result_.checks.push_back({std::move(name), value, limit, pass, required});
  }

  fs::path file(const std::string& name) {
    result_.files.push_back(cfg_.output_dir / name);
    return result_.files.back();
  }

  BandSolution solve(const ModelParams& p, int n_t) {
    const std::vector<double> grid = periodic_time_grid(p, n_t);
    return solve_bands(p, grid);
  }

  void bands() {
    const ModelParams& p = cfg_.model;
    const BandSolution b = solve(p, cfg_.n_t);
    std::vector<Column> cols{{"t", "1/J", {}}, {"phi", "rad", {}}, {"k", "1/site", {}}};
    for (int m = 0; m < p.q; ++m) cols.push_back({"E" + std::to_string(m), "J", {}});
    for (int it = 0; it < b.num_t(); ++it) {
      for (int ik = 0; ik < b.num_k(); ++ik) {
        cols[0].values.push_back(b.t_grid()[it]);
        cols[1].values.push_back(p.phase(b.t_grid()[it]));
        cols[2].values.push_back(b.k_grid()[ik]);
        for (int m = 0; m < p.q; ++m) cols[3 + m].values.push_back(b.energy(m, ik, it));
      }
    }
    write_columns(file("bands.tsv"), "band energies on the (t, k) grid", cols);
    result_.manifest["grid"] = {{"n_t", cfg_.n_t}, {"n_k", p.L}};
    result_.manifest["results"] = {{"min_gap", b.min_gap()}};
    log_ << "min gap " << format_number(b.min_gap()) << '\n';
  }

  void chern() {
    const ModelParams& p = cfg_.model;
    ModelParams fine = p;
    fine.L = 2 * p.L;
    const BandSolution coarse = solve(p, cfg_.n_t);
    const BandSolution refined = solve(fine, 2 * cfg_.n_t);
    Column band{"band", "", {}}, c0{"chern", "", {}}, c1{"chern_refined", "", {}};
    std::vector<int> cs;
    int total = 0;
    bool stable = true;
    log_ << "C = (";
    for (int m = 0; m < p.q; ++m) {
      const int a = chern_number(coarse, m);
      const int b = chern_number(refined, m);
      cs.push_back(a);
      total += a;
      stable = stable && a == b;
      band.values.push_back(m);
      c0.values.push_back(a);
      c1.values.push_back(b);
      log_ << (m ? ", " : "") << a;
    }
    log_ << ")\n";
    write_columns(file("chern.tsv"), "Chern numbers per band (ascending energy)", {band, c0, c1});
    result_.manifest["grid"] = {{"n_t", cfg_.n_t}, {"n_k", p.L}, {"n_t_refined", 2 * cfg_.n_t},
                                {"n_k_refined", fine.L}};
    result_.manifest["results"] = {{"chern", cs}};
    check("chern_sum", total, 0, total == 0);
    check("chern_refinement_stable", stable ? 1 : 0, 1, stable);
  }

  void flatness_experiment() {
    const ModelParams uni = cfg_.model.with_mode(TunnelingMode::Uniform);
    const ModelParams sine = cfg_.model.with_mode(TunnelingMode::SineModulated);
    const FlatnessReport fu = flatness(solve(uni, cfg_.n_t));
    const FlatnessReport fs = flatness(solve(sine, cfg_.n_t));
    std::vector<Column> cols{{"t", "1/J", fu.times}, {"phi", "rad", fu.phases}};
    const int q = cfg_.model.q;
    for (int m = 0; m < q; ++m) {
      Column wu{"width_uniform_" + std::to_string(m), "J", {}}, ru{"ratio_uniform_" + std::to_string(m), "", {}};
      Column ws{"width_sine_" + std::to_string(m), "J", {}}, rs{"ratio_sine_" + std::to_string(m), "", {}};
      for (Eigen::Index it = 0; it < fu.ratios.rows(); ++it) {
        wu.values.push_back(fu.bandwidths(it, m));
        ru.values.push_back(fu.ratios(it, m));
        ws.values.push_back(fs.bandwidths(it, m));
        rs.values.push_back(fs.ratios(it, m));
      }
      cols.insert(cols.end(), {wu, ru, ws, rs});
    }
    write_columns(file("flatness.tsv"), "bandwidths and flatness ratios, uniform vs sine-modulated tunneling", cols);
    double worst = -1e300;
    for (Eigen::Index it = 0; it < fu.ratios.rows(); ++it) {
      worst = std::max(worst, fs.ratios(it, q - 1) - fu.ratios(it, q - 1));
    }
    result_.manifest["grid"] = {{"n_t", cfg_.n_t}, {"n_k", cfg_.model.L}};
    result_.manifest["results"] = {{"max_ratio_sine_minus_uniform_highest_band", worst},
                                   {"max_ratio_uniform_highest_band", fu.ratios.col(q - 1).maxCoeff()},
                                   {"max_ratio_sine_highest_band", fs.ratios.col(q - 1).maxCoeff()}};
    check("highest_band_sine_flatter", worst, 0.0, worst <= 0.0, false);
  }

  void phases() {
    const ModelParams& p = cfg_.model;
    const int m = band_index();
    const PhaseRecord rec = accumulate_phases(solve(p, cfg_.n_t_phases), m);
    write_columns(file("phases.tsv"), "one-cycle phases of band " + std::to_string(m),
                  {{"k", "1/site", rec.k},
                   {"gamma_b", "rad", rec.gamma_b},
                   {"gamma_d", "rad", rec.gamma_d},
                   {"gamma", "rad", rec.gamma},
                   {"x_b", "site", rec.x_b},
                   {"x_d", "site", rec.x_d},
                   {"xi", "site", rec.xi}});
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    auto max_abs = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s = std::max(s, std::abs(x));
      return s;
    };
    const double dk = 2.0 * std::numbers::pi / p.num_sites();
    const double predicted = predict_dispersion(rec.gamma, dk);
    result_.manifest["grid"] = {{"n_t", cfg_.n_t_phases}, {"n_k", p.L}};
    result_.manifest["results"] = {{"band", m},
                                   {"chern", rec.chern},
                                   {"mean_x_b", mean(rec.x_b)},
                                   {"mean_x_d", mean(rec.x_d)},
                                   {"max_abs_x_d", max_abs(rec.x_d)},
                                   {"max_abs_xi", max_abs(rec.xi)},
                                   {"predicted_dispersion", predicted}};
    log_ << "band " << m << " C = " << rec.chern << ", predicted Omega_D(T) = " << format_number(predicted) << '\n';
    check("mean_x_b_minus_qC", std::abs(mean(rec.x_b) - p.q * rec.chern), 1e-2,
          std::abs(mean(rec.x_b) - p.q * rec.chern) < 1e-2);
  }

  long long steps_per_cycle(const ModelParams& p) const {
    if (cfg_.dt <= 0.0) return default_steps_per_cycle(p);
    const double dt_max = max_time_step(p);
    if (cfg_.dt > dt_max) {
      throw InvalidArgument("dt " + format_number(cfg_.dt) + " exceeds dt_max " + format_number(dt_max));
    }
    return static_cast<long long>(std::ceil(p.period() / cfg_.dt - 1e-9));
  }

  void record_integration(const ModelParams& p, long long per_cycle, int n) {
    result_.manifest["grid"] = {{"steps_per_cycle", per_cycle},
                                {"dt", p.period() / static_cast<double>(per_cycle)},
                                {"dt_max", max_time_step(p)},
                                {"samples_per_cycle", cfg_.samples_per_cycle},
                                {"n_cycles", n},
                                {"integrator", "exponential midpoint, Lanczos exponential"}};
  }

  void write_density(const PumpTrajectory& traj, const std::string& stem) {
    Eigen::MatrixXd rho(traj.size(), traj.density.front().size());
    for (std::size_t i = 0; i < traj.size(); ++i) rho.row(i) = traj.density[i].transpose();
    write_matrix(file(stem + ".tsv"), "site density, rows = times, columns = sites", rho);
    write_columns(file(stem + "_times.tsv"), "row axis of " + stem + ".tsv", {{"t", "1/J", traj.times}});
    std::vector<double> sites(rho.cols());
    for (Eigen::Index j = 0; j < rho.cols(); ++j) sites[j] = static_cast<double>(j + 1);
    write_columns(file(stem + "_sites.tsv"), "column axis of " + stem + ".tsv", {{"site", "", sites}});
  }

  void pump(Protocol protocol) {
    const int n = cycles(protocol);
    check_protocol(cfg_.model, protocol, n);
    const ModelParams p0 = protocol_params(cfg_.model, protocol, 0.0);
    const long long per_cycle = steps_per_cycle(p0);
    record_integration(p0, per_cycle, n);

    // Band populations are taken against the band that starts occupied.
    const BandSolution bands0 = solve(p0, cfg_.n_t);
    const int q = p0.q;
    int band = q - 1;
    if (cfg_.initial.kind == InitialState::Kind::Mlws) {
      band = cfg_.initial.band;
    } else {
      const Eigen::VectorXd pop = band_population(prepare_initial(p0, cfg_.initial), bands0, 0);
      pop.maxCoeff(&band);
    }
    const int c = chern_number(bands0, band);
    const int shift = c * n;  // cells moved after n cycles (Echo reverses the energy, not the curvature)

    ProtocolOptions po;
    po.steps_per_cycle = per_cycle;
    po.samples_per_cycle = cfg_.samples_per_cycle;
    po.track_band_population = true;
    const Eigen::VectorXcd psi0 = prepare_initial(p0, cfg_.initial);
    const PumpTrajectory traj = run_protocol(cfg_.model, protocol, n, psi0, po);

    // Targets: the starting site and the starting cell's Wannier state, both
    // moved by the pumped number of cells.
    Eigen::Index peak = 0;
    psi0.cwiseAbs2().maxCoeff(&peak);
    const int start_site = static_cast<int>(peak) + 1;
    const int start_cell = cfg_.initial.kind == InitialState::Kind::Mlws ? cfg_.initial.cell : cell_of(p0, start_site);
    const int target_site = start_site + q * shift;
    const int target_cell = start_cell + shift;
    if (target_site < 1 || target_site > p0.num_sites() || target_cell < 1 || target_cell > p0.L) {
      throw InvalidArgument("pumped target lies outside the ring; enlarge L or move the initial state");
    }
    const std::vector<double> t0{0.0};
    const std::vector<LabeledState> refs{
        {"initial", psi0},
        {"site", site_state(p0.num_sites(), target_site)},
        {"mlws", maximally_localize(solve_bands(p0, t0), 0, band, target_cell).state.amplitudes}};

    std::vector<Column> cols{{"t", "1/J", traj.times},       {"phi", "rad", {}},
                             {"delta_p", "cells", traj.delta_p}, {"mean_x", "site", traj.mean_x},
                             {"d_w", "site", traj.d_w},        {"proj_initial", "", {}},
                             {"proj_site_" + std::to_string(target_site), "", {}},
                             {"proj_mlws_cell_" + std::to_string(target_cell), "", {}}};
    for (int m = 0; m < q; ++m) cols.push_back({"population_" + std::to_string(m), "", {}});
    double max_dw = 0.0;
    double worst_population_sum = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const ObservableSample s = measure(traj.states[i], refs, traj.times[i]);
      cols[1].values.push_back(cfg_.model.phase(traj.times[i]));
      cols[5].values.push_back(s.projections.at("initial"));
      cols[6].values.push_back(s.projections.at("site"));
      cols[7].values.push_back(s.projections.at("mlws"));
      for (int m = 0; m < q; ++m) cols[8 + m].values.push_back(traj.band_population[i](m));
      worst_population_sum = std::max(worst_population_sum, std::abs(traj.band_population[i].sum() - 1.0));
      max_dw = std::max(max_dw, traj.d_w[i]);
    }
    write_columns(file("observables.tsv"), to_string(protocol) + " protocol", cols);
    write_density(traj, "density");

    result_.manifest["initial"] = initial_json(cfg_.initial);
    result_.manifest["results"] = {{"protocol", to_string(protocol)},
                                   {"occupied_band", band},
                                   {"chern", c},
                                   {"target_site", target_site},
                                   {"target_cell", target_cell},
                                   {"final_delta_p", traj.delta_p.back()},
                                   {"final_d_w", traj.d_w.back()},
                                   {"max_d_w", max_dw},
                                   {"final_projection_site", cols[6].values.back()},
                                   {"final_projection_mlws", cols[7].values.back()},
                                   {"final_projection_initial", cols[5].values.back()},
                                   {"final_band_population", traj.band_population.back().maxCoeff()},
                                   {"max_norm_drift", traj.max_norm_drift},
                                   {"max_seam_density", traj.max_seam_density}};
    log_ << to_string(protocol) << ": delta_p(" << n << "T) = " << format_number(traj.delta_p.back())
         << " cells, D_W = " << format_number(traj.d_w.back()) << "\n  projection on site " << target_site << " = "
         << format_number(cols[6].values.back()) << ", on the Wannier state of cell " << target_cell << " = "
         << format_number(cols[7].values.back()) << '\n';
    check("norm_drift", traj.max_norm_drift, kNormDriftLimit, traj.max_norm_drift < kNormDriftLimit);
    check("seam_density", traj.max_seam_density, kSeamThreshold, traj.max_seam_density < kSeamThreshold);
    check("band_population_sum", worst_population_sum, 1e-8, worst_population_sum < 1e-8);
  }

  void effective_compare() {
    const ModelParams& p = cfg_.model;
    const int n = cycles(Protocol::Traditional);
    const long long per_cycle = steps_per_cycle(p);
    record_integration(p, per_cycle, n);
    ProtocolOptions po;
    po.steps_per_cycle = per_cycle;
    po.samples_per_cycle = cfg_.samples_per_cycle;
    const EffectiveComparison cmp = compare_effective(p, cfg_.initial, n, po);

    write_columns(file("observables.tsv"), "full vs piecewise effective Hamiltonian",
                  {{"t", "1/J", cmp.full.times},
                   {"delta_p_full", "cells", cmp.full.delta_p},
                   {"delta_p_effective", "cells", cmp.effective.delta_p},
                   {"d_w_full", "site", cmp.full.d_w},
                   {"d_w_effective", "site", cmp.effective.d_w}});
    write_density(cmp.full, "density_full");
    write_density(cmp.effective, "density_effective");

    std::vector<Column> cols{{"t", "1/J", {}},    {"phi", "rad", {}},   {"region", "", {}},   {"V_A", "J", {}},
                             {"V_B", "J", {}},    {"V_C", "J", {}},     {"V_eff_A", "J", {}}, {"V_eff_B", "J", {}},
                             {"V_eff_C", "J", {}}, {"J1", "J", {}},     {"J2", "J", {}},      {"J3", "J", {}},
                             {"J_first", "J", {}}, {"J_second", "J", {}}, {"J_third", "J", {}}};
    const std::vector<double> grid = periodic_time_grid(p, cfg_.n_t);
    for (double t : grid) {
      const EffectiveParams e = effective_params(p, t);
      const double row[] = {t,     p.phase(t), static_cast<double>(static_cast<int>(e.region) + 1),
                            e.V_A, e.V_B,      e.V_C,
                            e.eff_A, e.eff_B,  e.eff_C,
                            e.J1,  e.J2,       e.J3,
                            e.J_first, e.J_second, e.J_third};
      for (std::size_t c = 0; c < cols.size(); ++c) cols[c].values.push_back(row[c]);
    }
    write_columns(file("effective_params.tsv"), "effective couplings over one cycle (region 1 = I, 2 = II, 3 = III)",
                  cols);

    result_.manifest["initial"] = initial_json(cfg_.initial);
    result_.manifest["results"] = {{"final_delta_p_full", cmp.full.delta_p.back()},
                                   {"final_delta_p_effective", cmp.effective.delta_p.back()},
                                   {"max_abs_delta_p_difference", cmp.max_delta_p_difference},
                                   {"max_abs_d_w_difference", cmp.max_d_w_difference},
                                   {"final_fidelity", cmp.final_fidelity},
                                   {"effective_generator",
                                    "piecewise in phi; discontinuous at region boundaries pi/6 + n pi/3"}};
    log_ << "max |delta_p difference| = " << format_number(cmp.max_delta_p_difference)
         << " cells, max |D_W difference| = " << format_number(cmp.max_d_w_difference) << " sites\n";
    check("norm_drift_full", cmp.full.max_norm_drift, kNormDriftLimit, cmp.full.max_norm_drift < kNormDriftLimit);
    check("norm_drift_effective", cmp.effective.max_norm_drift, kNormDriftLimit,
          cmp.effective.max_norm_drift < kNormDriftLimit);
    check("delta_p_agreement", cmp.max_delta_p_difference, 0.05, cmp.max_delta_p_difference < 0.05, false);
    check("d_w_agreement", cmp.max_d_w_difference, 0.1, cmp.max_d_w_difference < 0.1, false);
  }

  const RunConfig& cfg_;
  std::ostream& log_;
  RunResult result_;
};

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"bands",      "chern",           "flatness",        "phases",
                                              "pump-traditional", "pump-echo", "pump-suppressed", "effective-compare"};
  return names;
}

std::string to_string(Experiment e) { return experiment_names()[static_cast<std::size_t>(e)]; }

Experiment parse_experiment(const std::string& name) {
  const auto& names = experiment_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Experiment>(i);
  }
  throw InvalidArgument("unknown experiment '" + name + "'");
}

bool RunResult::passed() const {
  for (const Check& c : checks) {
    if (c.required && !c.pass) return false;
  }
  return true;
}

RunResult run(const RunConfig& config, std::ostream& log) { return Runner(config, log).execute(); }

int run_with_status(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    const RunResult r = run(config, log);
    if (!r.passed()) {
      err << "error: a required check failed (see manifest.json)\n";
      return 1;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace thouless
