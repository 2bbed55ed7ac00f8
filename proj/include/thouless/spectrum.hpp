#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "thouless/model.hpp"

namespace thouless {

// Band energies and cell-periodic Bloch vectors on a (k, t) grid.
//
// Storage is indexed as (ik, it); for each point the q eigenvectors are the
// columns of a q x q matrix, bands sorted by ascending energy. Each column is
// gauge fixed so that its largest-magnitude component is real and positive.
class BandSolution {
 public:
  BandSolution(ModelParams params, std::vector<double> k_grid, std::vector<double> t_grid,
               std::vector<Eigen::VectorXd> energies, std::vector<Eigen::MatrixXcd> states);

  const ModelParams& params() const { return params_; }
  int num_bands() const { return params_.q; }
  int num_k() const { return static_cast<int>(k_grid_.size()); }
  int num_t() const { return static_cast<int>(t_grid_.size()); }
  const std::vector<double>& k_grid() const { return k_grid_; }
  const std::vector<double>& t_grid() const { return t_grid_; }

  // True when t_grid is uniform and its next point after the last would be
  // t_grid[0] + T, i.e. the grid samples a closed loop in time.
  bool closed_in_t() const { return closed_in_t_; }

  double energy(int m, int ik, int it) const { return energies_[flat(ik, it)](m); }
  const Eigen::VectorXd& energies(int ik, int it) const { return energies_[flat(ik, it)]; }
  Eigen::VectorXcd state(int m, int ik, int it) const { return states_[flat(ik, it)].col(m); }
  const Eigen::MatrixXcd& states(int ik, int it) const { return states_[flat(ik, it)]; }

  // Smallest E_{m+1} - E_m over the whole grid and all adjacent band pairs.
  double min_gap() const;

  // Real-space Bloch state psi_m(k_ik, t_it), normalized over all N sites.
  Eigen::VectorXcd bloch_state(int m, int ik, int it) const;

 private:
  std::size_t flat(int ik, int it) const {
    return static_cast<std::size_t>(it) * k_grid_.size() + static_cast<std::size_t>(ik);
  }

  ModelParams params_;
  std::vector<double> k_grid_;
  std::vector<double> t_grid_;
  std::vector<Eigen::VectorXd> energies_;
  std::vector<Eigen::MatrixXcd> states_;
  bool closed_in_t_ = false;
};

// n_t equally spaced times t_n = n T / n_t, n = 0..n_t-1.
std::vector<double> periodic_time_grid(const ModelParams& params, int n_t);

struct SolveOptions {
  // Absolute gap tolerance; a negative value selects 1e-6 * |V0|.
  double gap_tolerance = -1.0;
};

// Diagonalizes the Bloch Hamiltonian at every (k, t). Throws BandTouchingError
// when any adjacent band gap falls below the tolerance.
BandSolution solve_bands(const ModelParams& params, std::span<const double> t_grid,
                         const SolveOptions& options = {});

// Lattice field strength F(k, t) on plaquettes with lower-left corner (ik, it);
// row ik, column it. Requires a time-closed grid. Sum / (2 pi) is C_m.
Eigen::MatrixXd berry_curvature_grid(const BandSolution& bands, int m);

// Integer Chern number of band m over the (k, t) torus.
int chern_number(const BandSolution& bands, int m);

struct FlatnessReport {
  std::vector<double> times;
  std::vector<double> phases;         // phi(t)
  Eigen::MatrixXd gaps;               // (it, m) G_m, m = 0..q-2
  Eigen::MatrixXd bandwidths;         // (it, m) W_m
  Eigen::MatrixXd ratios;             // (it, m) delta_m
};

// Gaps, bandwidths and flatness ratios per time sample. The ratio of band m
// divides its width by the smaller of its adjacent gaps; the edge bands have
// one gap only.
FlatnessReport flatness(const BandSolution& bands);

}  // namespace thouless
