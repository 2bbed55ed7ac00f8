#include "thouless/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <type_traits>

#include "thouless/observables.hpp"
#include "thouless/propagator.hpp"
#include "thouless/wannier.hpp"

namespace thouless {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Traditional:
      return "traditional";
    case Protocol::Echo:
      return "echo";
    case Protocol::Suppressed:
      return "suppressed";
  }
  return "unknown";
}

double max_spectral_norm(const Generator& h, double t0, double t1, int samples) {
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = samples > 1 ? t0 + (t1 - t0) * i / (samples - 1) : t0;
    best = std::max(best, h(t).eigenvalues().cwiseAbs().maxCoeff());
  }
  return best;
}

double max_time_step(const ModelParams& params) {
  const Generator h = [&](double t) { return real_space_hamiltonian(params, t); };
  const double span = params.omega == 0.0 ? 0.0 : params.period();
  const double norm = max_spectral_norm(h, 0.0, span, params.omega == 0.0 ? 1 : 64);
  return 0.05 / norm;
}

long long default_steps_per_cycle(const ModelParams& params) {
  const double needed = std::ceil(params.period() / max_time_step(params));
  return std::max<long long>(200000, static_cast<long long>(needed));
}

namespace {

template <typename Gen>
PumpTrajectory evolve_impl(const Gen& h, const Eigen::VectorXcd& initial, double t_start, double t_end, double dt,
                           int q, const EvolveOptions& options) {
  if (!(t_end > t_start)) throw InvalidArgument("evolve: t_end must exceed t_start");
  if (!(dt > 0.0)) throw InvalidArgument("evolve: dt must be positive");
  if (std::abs(initial.squaredNorm() - 1.0) > 1e-10) throw InvalidArgument("evolve: initial state not normalized");
  const double span = t_end - t_start;
  const long long steps = static_cast<long long>(std::ceil(span / dt - 1e-9));
  const double step = span / static_cast<double>(steps);
  const int stride = std::max(1, options.sample_stride);

  PumpTrajectory traj;
  traj.q = q;
  traj.dt = step;
  traj.steps = steps;

  Eigen::VectorXcd psi = initial;
  const double x0 = measure(psi, {}, t_start).mean_x;
  auto record = [&](double t) {
    const ObservableSample s = measure(psi, {}, t, x0, q);
    traj.times.push_back(t);
    traj.states.push_back(psi);
    traj.mean_x.push_back(s.mean_x);
    traj.delta_p.push_back(s.delta_p);
    traj.d_w.push_back(s.d_w);
    const double seam = std::max(s.density(0), s.density(s.density.size() - 1));
    traj.max_seam_density = std::max(traj.max_seam_density, seam);
    traj.density.push_back(s.density);
    if (options.band_population) traj.band_population.push_back(options.band_population(t, psi));
    if (seam > options.seam_threshold && options.abort_on_seam) {
      throw SeamError("evolve: density " + std::to_string(seam) + " at the index seam at t=" + std::to_string(t) +
                      "; enlarge L or move the initial cell");
    }
  };
  record(t_start);

  KrylovPropagator prop;
  for (long long n = 0; n < steps; ++n) {
    const double t_mid = t_start + (static_cast<double>(n) + 0.5) * step;
    const auto hm = h(t_mid);
    if (hm.dim() != psi.size()) throw InvalidArgument("evolve: generator dimension mismatch");
    if constexpr (std::is_same_v<decltype(hm), const HermitianMatrix>) {
      if (hm.is_real()) {
        const Eigen::SparseMatrix<double> sparse = hm.real_part().sparseView();
        prop.step(sparse, psi, step);
      } else {
        prop.step(hm.matrix(), psi, step);
      }
    } else {
      prop.step(hm, psi, step);
    }
    const bool last = n + 1 == steps;
    if ((n + 1) % stride == 0 || last) {
      const double drift = std::abs(psi.norm() - 1.0);
      traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
      if (drift > 1e-8) throw IntegratorError("evolve: norm drift " + std::to_string(drift));
      record(last ? t_end : t_start + static_cast<double>(n + 1) * step);
    }
  }
  return traj;
}

}  // namespace

PumpTrajectory evolve(const Generator& h, const Eigen::VectorXcd& initial, double t_start, double t_end, double dt,
                      int q, const EvolveOptions& options) {
  return evolve_impl(h, initial, t_start, t_end, dt, q, options);
}

PumpTrajectory evolve(const RingGenerator& h, const Eigen::VectorXcd& initial, double t_start, double t_end,
                      double dt, int q, const EvolveOptions& options) {
  return evolve_impl(h, initial, t_start, t_end, dt, q, options);
}

PumpTrajectory evolve(const ModelParams& params, const Eigen::VectorXcd& initial, double t_start, double t_end,
                      double dt, const EvolveOptions& options) {
  params.validate();
  const double dt_max = max_time_step(params);
  if (dt > dt_max * (1.0 + 1e-12)) {
    throw InvalidArgument("evolve: dt " + std::to_string(dt) + " exceeds dt_max " + std::to_string(dt_max));
  }
  const RingGenerator h = [params](double t) { return ring_hamiltonian(params, t); };
  PumpTrajectory traj = evolve(h, initial, t_start, t_end, dt, params.q, options);
  traj.period = params.omega == 0.0 ? 0.0 : params.period();
  return traj;
}

Eigen::VectorXcd prepare_initial(const ModelParams& params, const InitialState& initial) {
  if (initial.kind == InitialState::Kind::Site) return site_state(params.num_sites(), initial.site);
  const std::vector<double> t0{0.0};
  const BandSolution bands = solve_bands(params, t0);
  return maximally_localize(bands, 0, initial.band, initial.cell).state.amplitudes;
}

void check_protocol(const ModelParams& params, Protocol protocol, int n_cycles) {
  params.validate();
  if (n_cycles < 1) throw InvalidArgument("protocol needs at least one cycle");
  if (params.omega == 0.0) throw InvalidArgument("protocol runs need omega != 0");
  if (protocol == Protocol::Echo && n_cycles % 2 != 0) {
    throw InvalidArgument("echo protocol needs an even number of cycles");
  }
}

ModelParams protocol_params(const ModelParams& params, Protocol protocol, double t) {
  ModelParams out = params;
  if (protocol == Protocol::Suppressed) out.tunneling_mode = TunnelingMode::SineModulated;
  if (protocol == Protocol::Echo) {
    const long long cycle = static_cast<long long>(std::floor(t / params.period()));
    if (cycle % 2 != 0) out.sign = params.sign == Sign::Plus ? Sign::Minus : Sign::Plus;
  }
  return out;
}

PumpTrajectory run_protocol(const ModelParams& params, Protocol protocol, int n_cycles,
                            const Eigen::VectorXcd& initial, const ProtocolOptions& options) {
  check_protocol(params, protocol, n_cycles);
  const double period = params.period();
  const ModelParams base = protocol_params(params, protocol, 0.0);
  const long long per_cycle = options.steps_per_cycle > 0 ? options.steps_per_cycle : default_steps_per_cycle(base);
  const double dt = period / static_cast<double>(per_cycle);
  const double dt_max = max_time_step(base);
  if (dt > dt_max * (1.0 + 1e-12)) {
    throw InvalidArgument("run_protocol: " + std::to_string(per_cycle) + " steps per cycle exceed dt_max " +
                          std::to_string(dt_max));
  }

  EvolveOptions eo;
  eo.sample_stride = static_cast<int>(std::max<long long>(1, per_cycle / std::max(1, options.samples_per_cycle)));
  eo.abort_on_seam = options.abort_on_seam;
  if (options.track_band_population) {
    eo.band_population = [&](double t, const Eigen::VectorXcd& psi) {
      const ModelParams now = protocol_params(params, protocol, std::min(t, n_cycles * period * (1 - 1e-15)));
      const std::vector<double> tt{t};
      return band_population(psi, solve_bands(now, tt), 0);
    };
  }
  // Midpoints never sit on a cycle boundary because dt divides the period.
  const RingGenerator h = [&](double t) { return ring_hamiltonian(protocol_params(params, protocol, t), t); };
  PumpTrajectory traj = evolve(h, initial, 0.0, n_cycles * period, dt, params.q, eo);
  traj.protocol = protocol;
  traj.period = period;
  return traj;
}

PumpTrajectory run_protocol(const ModelParams& params, Protocol protocol, int n_cycles, const InitialState& initial,
                            const ProtocolOptions& options) {
  return run_protocol(params, protocol, n_cycles, prepare_initial(protocol_params(params, protocol, 0.0), initial),
                      options);
}

PhaseRecord accumulate_phases(const BandSolution& bands, int m) {
  if (!bands.closed_in_t()) throw InvalidArgument("accumulate_phases: time grid must close over one period");
  const int nk = bands.num_k();
  const int nt = bands.num_t();
  const ModelParams& params = bands.params();
  const double h = params.period() / nt;
  const double dk = 2.0 * std::numbers::pi / (params.q * params.L);

  PhaseRecord rec;
  rec.band = m;
  rec.q = params.q;
  rec.chern = chern_number(bands, m);
  rec.k = bands.k_grid();
  rec.gamma_b.resize(nk);
  rec.gamma_d.resize(nk);
  rec.gamma.resize(nk);
  for (int ik = 0; ik < nk; ++ik) {
    double energy_sum = 0.0;
    cplx loop = 1.0;
    for (int it = 0; it < nt; ++it) {
      energy_sum += bands.energy(m, ik, it);
      const cplx z = bands.state(m, ik, it).dot(bands.state(m, ik, (it + 1) % nt));
      if (std::abs(z) < 0.99) {
        throw Error("accumulate_phases: time-gauge discontinuity (|overlap| = " + std::to_string(std::abs(z)) +
                    "); refine the time grid");
      }
      loop *= z / std::abs(z);
    }
    rec.gamma_d[ik] = -h * energy_sum;
    rec.gamma_b[ik] = -std::arg(loop);
    rec.gamma[ik] = rec.gamma_b[ik] + rec.gamma_d[ik];
  }
  rec.x_b = negative_phase_derivative(rec.gamma_b, dk);
  rec.x_d = negative_phase_derivative(rec.gamma_d, dk);
  rec.xi.resize(nk);
  for (int ik = 0; ik < nk; ++ik) rec.xi[ik] = rec.x_b[ik] - params.q * rec.chern;
  return rec;
}

PhaseTrace dynamical_phase_trace(const ModelParams& params, int m, Protocol protocol, int n_cycles,
                                 std::span<const int> k_indices, int n_t_per_cycle) {
  check_protocol(params, protocol, n_cycles);
  if (m < 0 || m >= params.q) throw InvalidArgument("band index out of range");
  for (int ik : k_indices) {
    if (ik < 0 || ik >= params.L) throw InvalidArgument("k index out of range");
  }
  const double period = params.period();
  const double h = period / n_t_per_cycle;
  const int nk = static_cast<int>(k_indices.size());

  PhaseTrace trace;
  trace.k_indices.assign(k_indices.begin(), k_indices.end());
  trace.gamma_d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_cycles) * n_t_per_cycle + 1, nk);
  trace.times.push_back(0.0);
  Eigen::VectorXd running = Eigen::VectorXd::Zero(nk);
  for (int c = 0; c < n_cycles; ++c) {
    const ModelParams now = protocol_params(params, protocol, (c + 0.5) * period);
    const bool reversed = now.sign != params.sign;
    const int band = reversed ? params.q - 1 - m : m;
    const std::vector<double> grid = periodic_time_grid(now, n_t_per_cycle);
    const BandSolution bands = solve_bands(now, grid);
    for (int it = 0; it < n_t_per_cycle; ++it) {
      for (int i = 0; i < nk; ++i) {
        const double e0 = bands.energy(band, k_indices[i], it);
        const double e1 = bands.energy(band, k_indices[i], (it + 1) % n_t_per_cycle);
        running(i) -= 0.5 * h * (e0 + e1);
      }
      const Eigen::Index row = static_cast<Eigen::Index>(c) * n_t_per_cycle + it + 1;
      trace.gamma_d.row(row) = running.transpose();
      trace.times.push_back(c * period + (it + 1) * h);
    }
  }
  return trace;
}

}  // namespace thouless
