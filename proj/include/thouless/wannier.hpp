#pragma once

// Wannier states of a single isolated band on the ring.
//
// Gauge phases theta(k) multiply the Bloch states psi_m(k) -> e^{i theta} psi_m(k).
// Berry connections are reported in the position-aware convention in which the
// Bloch phase is exp(ikj) for site j, so that <X> = q(R-1) + mean connection
// for the Wannier state labeled by 1-based cell R.

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "thouless/spectrum.hpp"

namespace thouless {

struct WannierState {
  Eigen::VectorXcd amplitudes;
  int band = 0;
  int cell = 1;  // 1-based home cell
};

struct SpreadReport {
  double omega = 0.0;    // <X^2> - <X>^2
  double omega_I = 0.0;  // weight of X|W> on the other bands
  double omega_D = 0.0;  // weight of X|W> on the same band, other cells
  double center = 0.0;   // <X>, in sites
  double dispersion_width() const;
};

// |W_m(R)> = L^{-1/2} sum_k exp(-ikq(R-1)) e^{i theta(k)} |psi_m(k, t_it)>.
WannierState wannier_from_bloch(const BandSolution& bands, int it, int m, int cell,
                                std::span<const double> theta);

// Overlaps <u(k_n)|u(k_{n+1})> of band m in the position-aware convention,
// cyclic in n (the last link closes across the zone boundary).
std::vector<cplx> k_links(const BandSolution& bands, int it, int m);

// Berry connection <u|i d/dk|u> at every grid k for the gauged band, using the
// trigonometric-interpolation derivative on the k-grid.
std::vector<double> berry_connection(const BandSolution& bands, int it, int m,
                                     std::span<const double> theta);

// Link-based connection -arg(<u_n|u_{n+1}>)/dk between neighbouring grid points.
std::vector<double> link_connection(const BandSolution& bands, int it, int m,
                                    std::span<const double> theta);

struct LocalizedWannier {
  WannierState state;
  SpreadReport spread;
  std::vector<double> theta;
};

// Parallel transport along the k-grid with the residual loop phase spread
// uniformly over all links; the branch is chosen so the center falls in the
// home cell. The spread report is computed against the full MLWS basis.
LocalizedWannier maximally_localize(const BandSolution& bands, int it, int m, int cell);

// Parallel-transport gauge only (no spread evaluation). The same phases serve
// every home cell.
std::vector<double> parallel_transport_gauge(const BandSolution& bands, int it, int m);

// MLWS of every band in every cell at time t_it, ordered band-major.
std::vector<WannierState> wannier_basis(const BandSolution& bands, int it);

// Omega, Omega_I and Omega_D of a state tagged (band, cell) against a complete
// orthonormal Wannier basis. Throws if the basis is incomplete or if the
// decomposition fails to close.
SpreadReport spread_decomposition(const Eigen::VectorXcd& state, int band, int cell,
                                  std::span<const WannierState> basis);
SpreadReport spread_decomposition(const WannierState& state, std::span<const WannierState> basis);

// Gauge-dependent spread after one cycle from the accumulated phase gamma(k):
// the variance over the grid of -d gamma/dk. dk is the grid spacing.
double predict_dispersion(std::span<const double> gamma, double dk);

// Unwraps a cyclic phase sequence and returns the principal differences
// gamma_{n+1} - gamma_n (last entry closes the loop). Throws if a step is
// ambiguous (|difference| > 0.9 pi).
std::vector<double> phase_steps(std::span<const double> gamma);

// -d gamma/dk at each grid point: the mean slope from the unwrapped winding
// plus the trigonometric-interpolation derivative of the periodic remainder.
std::vector<double> negative_phase_derivative(std::span<const double> gamma, double dk);

// Direct minimization of <X^2> - <X>^2 over theta(k) by BFGS starting from
// theta0. Cross-check for the parallel-transport result.
struct SpreadMinimum {
  std::vector<double> theta;
  double omega = 0.0;
  int iterations = 0;
};
SpreadMinimum minimize_spread(const BandSolution& bands, int it, int m, int cell,
                              std::span<const double> theta0, double gradient_tol = 1e-11,
                              int max_iterations = 2000);

}  // namespace thouless
