// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance -c 3       run criterion 3 only

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "thouless/dynamics.hpp"
#include "thouless/effective.hpp"
#include "thouless/observables.hpp"
#include "thouless/spectrum.hpp"
#include "thouless/wannier.hpp"

using namespace thouless;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what, double value, double limit) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "    %-4s %-52s value=% .6g  limit=% .6g", ok ? "ok" : "FAIL", what.c_str(),
                  value, limit);
    lines.emplace_back(buf);
    pass = pass && ok;
  }
};

ModelParams paper_model(TunnelingMode mode = TunnelingMode::Uniform) {
  ModelParams p;
  p.tunneling_mode = mode;
  return p;
}

int highest_band(const ModelParams& p) { return p.q - 1; }

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

double projection(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return std::norm(a.dot(b)); }

Eigen::VectorXcd mlws_at_start(const ModelParams& p, int band, int cell) {
  return prepare_initial(p, InitialState::mlws(band, cell));
}

int model_chern(const ModelParams& p, int m) {
  const auto t = periodic_time_grid(p, 240);
  return chern_number(solve_bands(p, t), m);
}

Outcome chern_criterion() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  ModelParams p = paper_model(TunnelingMode::SineModulated);
  const auto coarse = solve_bands(p, periodic_time_grid(p, 240));
  std::vector<int> c;
  for (int m = 0; m < p.q; ++m) c.push_back(chern_number(coarse, m));
  for (int m = 0; m < p.q; ++m) {
    const double total = berry_curvature_grid(coarse, m).sum() / (2 * kPi);
    out.check(std::abs(total - std::round(total)) < 1e-9, "curvature sum integral, band " + std::to_string(m + 1),
              total, std::round(total));
  }
  out.check(c[2] == -1, "highest band Chern number", c[2], -1);
  out.check(c[0] + c[1] + c[2] == 0, "Chern numbers sum to zero", c[0] + c[1] + c[2], 0);

  ModelParams fine = p;
  fine.L = 2 * p.L;
  const auto refined = solve_bands(fine, periodic_time_grid(fine, 480));
  int changed = 0;
  for (int m = 0; m < p.q; ++m) changed += chern_number(refined, m) != c[m];
  out.check(changed == 0, "bands changed by 2x (k,t) refinement", changed, 0);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.check(seconds < 10.0, "runtime [s]", seconds, 10.0);
  return out;
}

Outcome transport_criterion() {
  Outcome out;
  for (auto mode : {TunnelingMode::Uniform, TunnelingMode::SineModulated}) {
    const ModelParams p = paper_model(mode);
    const int c = model_chern(p, highest_band(p));
    const auto traj = run_protocol(p, Protocol::Traditional, 1, InitialState::at_site(27));
    const std::string name = mode == TunnelingMode::Uniform ? "uniform" : "sine";
    out.check(std::abs(traj.delta_p.back() - c) < 1e-2, "traditional |dP(T) - C|, " + name,
              std::abs(traj.delta_p.back() - c), 1e-2);
  }
  const auto sup = run_protocol(paper_model(), Protocol::Suppressed, 1, InitialState::at_site(27));
  out.check(std::abs(sup.delta_p.back() + 0.999) <= 0.005, "suppressed dP(T) = -0.999 +- 0.005", sup.delta_p.back(),
            -0.999);
  return out;
}

Outcome echo_criterion() {
  Outcome out;
  const ModelParams p = paper_model();
  const auto echo = run_protocol(p, Protocol::Echo, 2, InitialState::at_site(27));
  const double proj = projection(mlws_at_start(p, highest_band(p), 7), echo.final_state());
  out.check(std::abs(proj - 0.989) <= 0.01, "echo projection on Wannier state of cell 7", proj, 0.989);
  const double peak = max_of(echo.d_w);
  out.check(echo.d_w.back() < 0.05 * peak, "echo D_W(2T) < 0.05 max D_W", echo.d_w.back(), 0.05 * peak);

  const auto trad = run_protocol(p, Protocol::Traditional, 2, InitialState::at_site(27));
  const std::size_t half = (trad.size() - 1) / 2;
  out.check(trad.d_w.back() > trad.d_w[half], "traditional D_W(2T) > D_W(T)", trad.d_w.back(), trad.d_w[half]);
  return out;
}

Outcome suppression_criterion() {
  Outcome out;
  const ModelParams p = paper_model();
  const auto sup = run_protocol(p, Protocol::Suppressed, 1, InitialState::at_site(27));
  const double proj = projection(site_state(p.num_sites(), 24), sup.final_state());
  out.check(std::abs(proj - 0.999) <= 0.005, "suppressed projection on site 24", proj, 0.999);
  const auto trad = run_protocol(p, Protocol::Traditional, 1, InitialState::at_site(27));
  out.check(max_of(sup.d_w) < max_of(trad.d_w), "max D_W sine < max D_W uniform", max_of(sup.d_w),
            max_of(trad.d_w));
  return out;
}

Outcome phase_criterion() {
  Outcome out;
  const ModelParams p = paper_model();
  const auto bands = solve_bands(p, periodic_time_grid(p, 4000));
  const auto rec = accumulate_phases(bands, highest_band(p));
  const auto abs_max = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double xd_max = abs_max(rec.x_d);
  out.check(std::abs(mean(rec.x_d)) < 1e-3 * xd_max, "|mean X_d| < 1e-3 max |X_d|", std::abs(mean(rec.x_d)),
            1e-3 * xd_max);
  const double qc = static_cast<double>(rec.q * rec.chern);
  out.check(std::abs(mean(rec.x_b) - qc) <= 1e-2, "mean X_b = qC", mean(rec.x_b), qc);
  out.check(xd_max > 10.0 * abs_max(rec.xi), "max |X_d| > 10 max |xi|", xd_max, 10.0 * abs_max(rec.xi));
  return out;
}

Outcome dispersion_criterion() {
  Outcome out;
  const ModelParams p = paper_model();
  const int m = highest_band(p);
  const auto bands = solve_bands(p, periodic_time_grid(p, 4000));
  const auto rec = accumulate_phases(bands, m);
  const double predicted = predict_dispersion(rec.gamma, 2 * kPi / p.num_sites());

  const auto start = maximally_localize(bands, 0, m, 9);
  const auto traj = run_protocol(p, Protocol::Traditional, 1, start.state.amplitudes);
  const double measured = traj.d_w.back() * traj.d_w.back() - start.spread.omega_I;
  const double rel = std::abs(predicted - measured) / std::abs(measured);
  out.check(rel < 0.02, "predicted vs evolved D_W^2 - Omega_I (relative)", rel, 0.02);
  return out;
}

// Coefficient-wise match of two matrices: nonzero entries to `rel` relative,
// zero entries to an absolute floor.
double relative_mismatch(const Eigen::MatrixXcd& closed, const Eigen::MatrixXcd& engine, double scale) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < closed.rows(); ++i) {
    for (Eigen::Index j = 0; j < closed.cols(); ++j) {
      const double a = std::abs(closed(i, j));
      const double d = std::abs(closed(i, j) - engine(i, j));
      worst = std::max(worst, a > 1e-14 * scale ? d / a : d / scale);
    }
  }
  return worst;
}

Outcome sw_criterion() {
  Outcome out;
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int draws = 0;
  for (; draws < 200; ++draws) {
    ModelParams p = paper_model(draws % 2 ? TunnelingMode::SineModulated : TunnelingMode::Uniform);
    p.V0 = 10.0 + 40.0 * unit(rng);
    p.J = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.005 + 0.095 * unit(rng)) * p.V0;
    p.phi0 = 2 * kPi * unit(rng);
    const Region r = region_at(p, 0.0);
    const auto closed = effective_hamiltonian(p, 0.0, r).matrix();
    const auto engine = sw_ring(p, 0.0, r, 3).matrix();
    worst = std::max(worst, relative_mismatch(closed, engine, std::abs(p.V0)));
  }
  out.check(worst < 1e-10, "closed forms vs engine, 200 draws (relative)", worst, 1e-10);

  ModelParams p = paper_model(TunnelingMode::SineModulated);
  for (double phi : {0.0, kPi / 3, 2 * kPi / 3}) {
    p.phi0 = phi;
    const auto e = effective_params(p, 0.0, region_at(p, 0.0));
    const double residual = std::max(std::abs(e.J_second), std::abs(e.J_third));
    out.check(residual < 1e-12, "resonance " + to_string(e.region) + ": |J^(2)|, |J^(3)|", residual, 1e-12);
  }
  return out;
}

Outcome effective_criterion() {
  Outcome out;
  const auto cmp = compare_effective(paper_model(), InitialState::at_site(27), 1);
  out.check(cmp.max_delta_p_difference < 0.05, "max |dP full - dP effective|", cmp.max_delta_p_difference, 0.05);
  out.check(cmp.max_d_w_difference < 0.1, "max |D_W full - D_W effective|", cmp.max_d_w_difference, 0.1);
  return out;
}

Outcome hygiene_criterion() {
  Outcome out;
  const ModelParams p = paper_model();
  const int m = highest_band(p);
  const Eigen::VectorXcd target = mlws_at_start(p, m, 8);

  const auto base = run_protocol(p, Protocol::Traditional, 1, InitialState::at_site(27));
  out.check(base.max_norm_drift < 1e-10, "norm drift per cycle", base.max_norm_drift, 1e-10);

  ProtocolOptions fine;
  fine.steps_per_cycle = 2 * base.steps;
  const auto halved = run_protocol(p, Protocol::Traditional, 1, InitialState::at_site(27), fine);
  const double change = std::abs(projection(target, base.final_state()) - projection(target, halved.final_state()));
  out.check(change < 1e-8, "final fidelity change under dt/2", change, 1e-8);

  const auto bands = solve_bands(p, periodic_time_grid(p, 8));
  double omega_d = 0.0;
  double spread = 0.0;
  for (int band = 0; band < p.q; ++band) {
    const auto w = maximally_localize(bands, 0, band, 9);
    omega_d = std::max(omega_d, w.spread.omega_D);
    const auto a = link_connection(bands, 0, band, w.theta);
    const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    spread = std::max(spread, *hi - *lo);
  }
  out.check(omega_d < 1e-8, "MLWS Omega_D", omega_d, 1e-8);
  out.check(spread < 1e-10, "MLWS link connection uniform (max - min)", spread, 1e-10);
  return out;
}

Outcome flatness_criterion() {
  Outcome out;
  const ModelParams p = paper_model();
  const auto t = periodic_time_grid(p, 240);
  const auto uniform = flatness(solve_bands(p, t));
  const auto sine = flatness(solve_bands(p.with_mode(TunnelingMode::SineModulated), t));
  const int m = highest_band(p);
  const double excess = (sine.ratios.col(m) - uniform.ratios.col(m)).maxCoeff();
  out.check(excess <= 0.0, "max over phi of delta_sine - delta_uniform", excess, 0.0);
  return out;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the Thouless pump library"};
  int only = 0;
  app.add_option("-c,--criterion", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "Chern numbers integral, highest band -1, stable under refinement", chern_criterion},
      {2, "quantized transport per cycle", transport_criterion},
      {3, "echo re-localization", echo_criterion},
      {4, "suppressed dispersion fidelity", suppression_criterion},
      {5, "Berry / dynamical phase structure", phase_criterion},
      {6, "dispersion prediction from accumulated phases", dispersion_criterion},
      {7, "Schrieffer-Wolff engine vs closed forms", sw_criterion},
      {8, "effective vs full dynamics", effective_criterion},
      {9, "numerical hygiene", hygiene_criterion},
      {10, "flatness of the highest band", flatness_criterion},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.lines.push_back(std::string("    error: ") + e.what());
    }
    for (const auto& line : o.lines) std::printf("%s\n", line.c_str());
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
