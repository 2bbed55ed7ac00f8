#pragma once

// Third-order Schrieffer-Wolff effective Hamiltonians of the q = 3 ring near
// the three sublattice resonances. Sublattices A, B, C are sites 1, 2, 3 of a
// cell; J1 couples A-B, J2 couples B-C inside a cell and J3 couples C to the
// A site of the next cell.

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "thouless/dynamics.hpp"
#include "thouless/model.hpp"

namespace thouless {

// I: V_A = V_B, II: V_B = V_C, III: V_A = V_C.
enum class Region { I, II, III };

std::string to_string(Region r);

struct EffectiveParams {
  Region region = Region::I;
  double V_A = 0.0, V_B = 0.0, V_C = 0.0;
  double J1 = 0.0, J2 = 0.0, J3 = 0.0;
  double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;  // V_A-V_B, V_B-V_C, V_A-V_C
  double eff_A = 0.0, eff_B = 0.0, eff_C = 0.0;     // effective on-site energies
  double J_first = 0.0, J_second = 0.0, J_third = 0.0;
};

// Closed forms for the given region. Region III uses the sign that follows
// from the third-order sums (denominator -delta1*delta2).
EffectiveParams effective_coefficients(Region region, double V_A, double V_B, double V_C, double J1, double J2,
                                       double J3);

// Region of phi (reduced to [0, 2 pi)) by the half-open interval table.
Region region_of_phase(double phi);
Region region_at(const ModelParams& params, double t);

// 0.1 |V0|.
double gap_floor(const ModelParams& params);

// Effective Hamiltonian on `subspace` (indices into H0, in the given order)
// from the literal second- and third-order matrix-element sums. Throws
// DivergentDenominatorError when a subspace level lies within gap_floor of a
// complement level that V couples to it.
HermitianMatrix sw_generic(const HermitianMatrix& h0, const HermitianMatrix& v, std::span<const int> subspace,
                           int order, double gap_floor);

// Site indices (0-based) of the two resonant sublattices of a region on the
// ring, and of the remaining sublattice.
std::vector<int> resonant_subspace(const ModelParams& params, Region region);
std::vector<int> detuned_subspace(const ModelParams& params, Region region);

// Block-diagonal N x N effective Hamiltonian from sw_generic on both
// subspaces of the region.
HermitianMatrix sw_ring(const ModelParams& params, double t, Region region, int order = 3);

// Throws InvalidArgument if phi(t) lies outside the region, or if q != 3.
EffectiveParams effective_params(const ModelParams& params, double t, Region region);
EffectiveParams effective_params(const ModelParams& params, double t);

HermitianMatrix effective_hamiltonian(const ModelParams& params, double t, Region region);
// Piecewise H_I / H_II / H_III by the region of phi(t); discontinuous at
// region boundaries.
HermitianMatrix effective_cycle_hamiltonian(const ModelParams& params, double t);

struct EffectiveComparison {
  PumpTrajectory full;
  PumpTrajectory effective;
  std::vector<double> delta_p_difference;  // full - effective
  std::vector<double> d_w_difference;
  double max_delta_p_difference = 0.0;
  double max_d_w_difference = 0.0;
  double final_fidelity = 0.0;  // |<psi_full(T)|psi_eff(T)>|^2
};

EffectiveComparison compare_effective(const ModelParams& params, const InitialState& initial, int n_cycles,
                                      const ProtocolOptions& options = {});

}  // namespace thouless
