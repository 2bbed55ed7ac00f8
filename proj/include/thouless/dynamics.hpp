#pragma once

// Adiabatic pumping dynamics: unitary time stepping, the three pumping
// protocols and the per-k Berry / dynamical phases accumulated over a cycle.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "thouless/model.hpp"
#include "thouless/spectrum.hpp"

namespace thouless {

enum class Protocol { Traditional, Echo, Suppressed };

std::string to_string(Protocol p);

using Generator = std::function<HermitianMatrix(double)>;
using RingGenerator = std::function<RingHamiltonian(double)>;

struct PumpTrajectory {
  Protocol protocol = Protocol::Traditional;
  int q = 1;
  double period = 0.0;
  double dt = 0.0;
  long long steps = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> states;
  std::vector<Eigen::VectorXd> density;
  std::vector<double> mean_x;
  std::vector<double> delta_p;  // cells
  std::vector<double> d_w;      // sites
  std::vector<Eigen::VectorXd> band_population;  // empty unless requested
  double max_norm_drift = 0.0;
  double max_seam_density = 0.0;

  const Eigen::VectorXcd& final_state() const { return states.back(); }
  std::size_t size() const { return times.size(); }
};

struct EvolveOptions {
  int sample_stride = 1;  // record every n-th step (the final step is always recorded)
  double seam_threshold = 1e-3;
  bool abort_on_seam = true;
  // Optional per-sample band weights, called with (t, state).
  std::function<Eigen::VectorXd(double, const Eigen::VectorXcd&)> band_population;
};

// Largest spectral norm of h(t) over `samples` equally spaced times in [t0, t1].
double max_spectral_norm(const Generator& h, double t0, double t1, int samples = 64);

// dt_max = 0.05 / max_t |H(t)|_2 over one period (or at t = 0 if omega = 0).
double max_time_step(const ModelParams& params);

// Steps per period: at least 2e5, more if the period / dt_max demands it.
long long default_steps_per_cycle(const ModelParams& params);

// Propagates `initial` from t_start to t_end with the exponential midpoint rule
// psi <- exp(-i H(t + dt/2) dt) psi. The step is shrunk so it divides the
// interval exactly. Throws IntegratorError on norm drift above 1e-8 and
// SeamError when the density on sites 1 or N exceeds the seam threshold.
PumpTrajectory evolve(const Generator& h, const Eigen::VectorXcd& initial, double t_start, double t_end,
                      double dt, int q, const EvolveOptions& options = {});
PumpTrajectory evolve(const RingGenerator& h, const Eigen::VectorXcd& initial, double t_start, double t_end,
                      double dt, int q, const EvolveOptions& options = {});
PumpTrajectory evolve(const ModelParams& params, const Eigen::VectorXcd& initial, double t_start,
                      double t_end, double dt, const EvolveOptions& options = {});

struct InitialState {
  enum class Kind { Site, Mlws };
  Kind kind = Kind::Site;
  int site = 27;  // 1-based, Kind::Site
  int band = 2;   // 0-based, Kind::Mlws
  int cell = 9;   // 1-based, Kind::Mlws

  static InitialState at_site(int j) { return {Kind::Site, j, 0, 1}; }
  static InitialState mlws(int band, int cell) { return {Kind::Mlws, 0, band, cell}; }
};

// Site delta or maximally localized Wannier state of H(0).
Eigen::VectorXcd prepare_initial(const ModelParams& params, const InitialState& initial);

struct ProtocolOptions {
  long long steps_per_cycle = 0;  // 0: default_steps_per_cycle
  int samples_per_cycle = 400;
  bool track_band_population = false;
  bool abort_on_seam = true;
};

// The Hamiltonian at time t under a protocol: Echo reverses the sign in every
// odd-numbered cycle, Suppressed forces sine-modulated tunneling.
ModelParams protocol_params(const ModelParams& params, Protocol protocol, double t);
void check_protocol(const ModelParams& params, Protocol protocol, int n_cycles);

PumpTrajectory run_protocol(const ModelParams& params, Protocol protocol, int n_cycles,
                            const InitialState& initial, const ProtocolOptions& options = {});
PumpTrajectory run_protocol(const ModelParams& params, Protocol protocol, int n_cycles,
                            const Eigen::VectorXcd& initial, const ProtocolOptions& options = {});

struct PhaseRecord {
  int band = 0;
  int chern = 0;
  int q = 1;
  std::vector<double> k;
  std::vector<double> gamma_b;
  std::vector<double> gamma_d;
  std::vector<double> gamma;  // gamma_b + gamma_d
  std::vector<double> x_b;    // -d gamma_b / dk
  std::vector<double> x_d;    // -d gamma_d / dk
  std::vector<double> xi;     // x_b - q C
};

// One-cycle phases of band m from a time-closed BandSolution. gamma_d is the
// periodic trapezoid rule for -int E dt; gamma_b is the Berry phase of the
// closed time loop from overlap products. Throws if adjacent time overlaps drop
// below 0.99 in modulus.
PhaseRecord accumulate_phases(const BandSolution& bands, int m);

struct PhaseTrace {
  std::vector<double> times;
  std::vector<int> k_indices;
  Eigen::MatrixXd gamma_d;  // (time, k)
};

// Running dynamical phase -int_0^t E(k, t') dt' of the band occupied under the
// protocol (band q-1-m in reversed cycles of Echo).
PhaseTrace dynamical_phase_trace(const ModelParams& params, int m, Protocol protocol, int n_cycles,
                                 std::span<const int> k_indices, int n_t_per_cycle = 2400);

}  // namespace thouless
