#include "thouless/effective.hpp"

#include <cmath>
#include <numbers>

namespace thouless {

namespace {

constexpr double kPi = std::numbers::pi;

void require_three_band(const ModelParams& params) {
  params.validate();
  if (params.q != 3 || params.p != 1) {
    throw InvalidArgument("effective Hamiltonians are defined for p/q = 1/3 only");
  }
}

}  // namespace

std::string to_string(Region r) {
  switch (r) {
    case Region::I:
      return "I";
    case Region::II:
      return "II";
    case Region::III:
      return "III";
  }
  return "?";
}

EffectiveParams effective_coefficients(Region region, double V_A, double V_B, double V_C, double J1, double J2,
                                       double J3) {
  EffectiveParams e;
  e.region = region;
  e.V_A = V_A;
  e.V_B = V_B;
  e.V_C = V_C;
  e.J1 = J1;
  e.J2 = J2;
  e.J3 = J3;
  const double d1 = V_A - V_B;
  const double d2 = V_B - V_C;
  const double d3 = V_A - V_C;
  e.delta1 = d1;
  e.delta2 = d2;
  e.delta3 = d3;
  switch (region) {
    case Region::I:
      e.eff_A = V_A + J3 * J3 / d3;
      e.eff_B = V_B + J2 * J2 / d2;
      e.eff_C = V_C - J2 * J2 / d2 - J3 * J3 / d3;
      e.J_first = J1 - J1 * (J2 * J2 + J3 * J3) / (2.0 * d2 * d3);
      e.J_second = 0.5 * J2 * J3 * (1.0 / d2 + 1.0 / d3);
      e.J_third = J1 * J2 * J3 / (2.0 * d2 * d3);
      break;
    case Region::II:
      e.eff_A = V_A + J1 * J1 / d1 + J3 * J3 / d3;
      e.eff_B = V_B - J1 * J1 / d1;
      e.eff_C = V_C - J3 * J3 / d3;
      e.J_first = J2 - J2 * (J1 * J1 + J3 * J3) / (2.0 * d1 * d3);
      e.J_second = -0.5 * J1 * J3 * (1.0 / d1 + 1.0 / d3);
      e.J_third = J1 * J2 * J3 / (2.0 * d1 * d3);
      break;
    case Region::III:
      e.eff_A = V_A + J1 * J1 / d1;
      e.eff_B = V_B - J1 * J1 / d1 + J2 * J2 / d2;
      e.eff_C = V_C - J2 * J2 / d2;
      e.J_first = J3 + J3 * (J1 * J1 + J2 * J2) / (2.0 * d1 * d2);
      e.J_second = 0.5 * J1 * J2 * (1.0 / d1 - 1.0 / d2);
      e.J_third = -J1 * J2 * J3 / (2.0 * d1 * d2);
      break;
  }
  return e;
}

Region region_of_phase(double phi) {
  double x = std::fmod(phi, 2.0 * kPi);
  if (x < 0.0) x += 2.0 * kPi;
  const double sixth = kPi / 6.0;
  // Twelve slices of width pi/6: I, II, II, III, III, I, I, II, II, III, III, I.
  static constexpr Region table[12] = {Region::I,  Region::II,  Region::II,  Region::III, Region::III, Region::I,
                                       Region::I,  Region::II,  Region::II,  Region::III, Region::III, Region::I};
  const int slice = std::min(11, static_cast<int>(std::floor(x / sixth)));
  return table[slice];
}

Region region_at(const ModelParams& params, double t) { return region_of_phase(params.phase(t)); }

double gap_floor(const ModelParams& params) { return 0.1 * std::abs(params.V0); }

HermitianMatrix sw_generic(const HermitianMatrix& h0, const HermitianMatrix& v, std::span<const int> subspace,
                           int order, double gap_floor) {
  const Eigen::Index n = h0.dim();
  if (v.dim() != n) throw InvalidArgument("sw_generic: H0 and V differ in dimension");
  if (order < 1 || order > 3) throw InvalidArgument("sw_generic: order must be 1, 2 or 3");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && std::abs(h0(i, j)) > HermitianMatrix::kTolerance) {
        throw InvalidArgument("sw_generic: H0 must be diagonal");
      }
    }
  }
  std::vector<int> position(n, -1);
  for (std::size_t a = 0; a < subspace.size(); ++a) {
    const int i = subspace[a];
    if (i < 0 || i >= n || position[i] >= 0) throw InvalidArgument("sw_generic: invalid subspace index");
    position[i] = static_cast<int>(a);
  }
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = h0(i, i).real();
  for (int i : subspace) {
    for (Eigen::Index m = 0; m < n; ++m) {
      if (position[m] < 0 && std::abs(e(i) - e(m)) <= gap_floor) {
        throw DivergentDenominatorError("sw_generic: level " + std::to_string(e(i)) + " is within " +
                                        std::to_string(gap_floor) + " of complement level " +
                                        std::to_string(e(m)));
      }
    }
  }

  // Neighbour lists split by subspace membership.
  std::vector<std::vector<int>> in_p(n), in_q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (v(i, j) != 0.0) (position[j] >= 0 ? in_p : in_q)[i].push_back(static_cast<int>(j));
    }
  }

  const Eigen::Index dim = static_cast<Eigen::Index>(subspace.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i : subspace) {
    h(position[i], position[i]) += e(i);
    for (int j : in_p[i]) h(position[i], position[j]) += v(i, j);
  }
  if (order >= 2) {
    for (int i : subspace) {
      for (int m : in_q[i]) {
        for (int j : in_p[m]) {
          h(position[i], position[j]) +=
              0.5 * (1.0 / (e(i) - e(m)) + 1.0 / (e(j) - e(m))) * v(i, m) * v(m, j);
        }
      }
    }
  }
  if (order >= 3) {
    for (int a : subspace) {
      for (int m : in_q[a]) {
        for (int nn : in_q[m]) {
          for (int b : in_p[nn]) {
            const cplx path = v(a, m) * v(m, nn) * v(nn, b);
            // |a><b| from the first sum (denominators at b) and the second (at a).
            h(position[a], position[b]) += path / (2.0 * (e(b) - e(m)) * (e(b) - e(nn)));
            h(position[a], position[b]) += path / (2.0 * (e(a) - e(m)) * (e(a) - e(nn)));
          }
        }
      }
    }
    for (int k : subspace) {
      for (int m : in_q[k]) {
        for (int i : in_p[m]) {
          for (int j : in_p[i]) {
            // |k><j| with path k <- m <- i <- j, and its mirror |j><k|.
            const double denom = 2.0 * (e(i) - e(m)) * (e(j) - e(m));
            h(position[k], position[j]) -= v(k, m) * v(m, i) * v(i, j) / denom;
            h(position[j], position[k]) -= v(j, i) * v(i, m) * v(m, k) / denom;
          }
        }
      }
    }
  }
  return HermitianMatrix(0.5 * (h + h.adjoint()));
}

std::vector<int> resonant_subspace(const ModelParams& params, Region region) {
  require_three_band(params);
  std::vector<int> out;
  for (int j = 0; j < params.num_sites(); ++j) {
    const int s = j % 3;
    const bool keep = region == Region::I ? s != 2 : region == Region::II ? s != 0 : s != 1;
    if (keep) out.push_back(j);
  }
  return out;
}

std::vector<int> detuned_subspace(const ModelParams& params, Region region) {
  require_three_band(params);
  const int s = region == Region::I ? 2 : region == Region::II ? 0 : 1;
  std::vector<int> out;
  for (int j = s; j < params.num_sites(); j += 3) out.push_back(j);
  return out;
}

HermitianMatrix sw_ring(const ModelParams& params, double t, Region region, int order) {
  const RingHamiltonian ring = ring_hamiltonian(params, t);
  const Eigen::Index n = ring.dim();
  const HermitianMatrix h0(ring.onsite.cast<cplx>().asDiagonal().toDenseMatrix());
  RingHamiltonian hop = ring;
  hop.onsite.setZero();
  const HermitianMatrix v = hop.dense();

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (const std::vector<int>& block : {resonant_subspace(params, region), detuned_subspace(params, region)}) {
    const HermitianMatrix hb = sw_generic(h0, v, block, order, gap_floor(params));
    for (std::size_t a = 0; a < block.size(); ++a) {
      for (std::size_t b = 0; b < block.size(); ++b) out(block[a], block[b]) = hb(a, b);
    }
  }
  return HermitianMatrix(std::move(out));
}

EffectiveParams effective_params(const ModelParams& params, double t, Region region) {
  require_three_band(params);
  const Region actual = region_at(params, t);
  if (actual != region) {
    throw InvalidArgument("effective_params: phi(t) lies in region " + to_string(actual) + ", not " +
                          to_string(region));
  }
  return effective_coefficients(region, onsite_energy(params, 1, t), onsite_energy(params, 2, t),
                                onsite_energy(params, 3, t), tunneling(params, 1, t), tunneling(params, 2, t),
                                tunneling(params, 3, t));
}

EffectiveParams effective_params(const ModelParams& params, double t) {
  return effective_params(params, t, region_at(params, t));
}

HermitianMatrix effective_hamiltonian(const ModelParams& params, double t, Region region) {
  const EffectiveParams e = effective_params(params, t, region);
  const int L = params.L;
  const int n = params.num_sites();
  auto site = [L](int l, int s) { return 3 * (((l % L) + L) % L) + s; };
  constexpr int A = 0, B = 1, C = 2;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  auto add = [&h](int a, int b, double value) {
    h(a, b) += value;
    h(b, a) += value;
  };
  for (int l = 0; l < L; ++l) {
    h(site(l, A), site(l, A)) = e.eff_A;
    h(site(l, B), site(l, B)) = e.eff_B;
    h(site(l, C), site(l, C)) = e.eff_C;
    switch (region) {
      case Region::I:
        add(site(l, A), site(l, B), e.J_first);
        add(site(l, A), site(l - 1, B), e.J_second);
        add(site(l, A), site(l + 1, A), -e.J_third);
        add(site(l, B), site(l + 1, B), -e.J_third);
        add(site(l, C), site(l + 1, C), 2.0 * e.J_third);
        break;
      case Region::II:
        add(site(l, B), site(l, C), e.J_first);
        add(site(l + 1, B), site(l, C), e.J_second);
        add(site(l, A), site(l + 1, A), 2.0 * e.J_third);
        add(site(l, B), site(l + 1, B), -e.J_third);
        add(site(l, C), site(l + 1, C), -e.J_third);
        break;
      case Region::III:
        add(site(l + 1, A), site(l, C), e.J_first);
        add(site(l, A), site(l, C), e.J_second);
        add(site(l, A), site(l + 1, A), -e.J_third);
        add(site(l, B), site(l + 1, B), 2.0 * e.J_third);
        add(site(l, C), site(l + 1, C), -e.J_third);
        break;
    }
  }
  return HermitianMatrix(std::move(h));
}

HermitianMatrix effective_cycle_hamiltonian(const ModelParams& params, double t) {
  return effective_hamiltonian(params, t, region_at(params, t));
}

EffectiveComparison compare_effective(const ModelParams& params, const InitialState& initial, int n_cycles,
                                      const ProtocolOptions& options) {
  require_three_band(params);
  check_protocol(params, Protocol::Traditional, n_cycles);
  const Eigen::VectorXcd psi0 = prepare_initial(params, initial);

  EffectiveComparison out;
  out.full = run_protocol(params, Protocol::Traditional, n_cycles, psi0, options);

  const double period = params.period();
  const long long per_cycle = options.steps_per_cycle > 0 ? options.steps_per_cycle : default_steps_per_cycle(params);
  EvolveOptions eo;
  eo.sample_stride = static_cast<int>(std::max<long long>(1, per_cycle / std::max(1, options.samples_per_cycle)));
  eo.abort_on_seam = options.abort_on_seam;
  const Generator h = [&params](double t) { return effective_cycle_hamiltonian(params, t); };
  out.effective = evolve(h, psi0, 0.0, n_cycles * period, period / static_cast<double>(per_cycle), params.q, eo);
  out.effective.period = period;

  const std::size_t count = std::min(out.full.size(), out.effective.size());
  for (std::size_t i = 0; i < count; ++i) {
    const double dp = out.full.delta_p[i] - out.effective.delta_p[i];
    const double dw = out.full.d_w[i] - out.effective.d_w[i];
    out.delta_p_difference.push_back(dp);
    out.d_w_difference.push_back(dw);
    out.max_delta_p_difference = std::max(out.max_delta_p_difference, std::abs(dp));
    out.max_d_w_difference = std::max(out.max_d_w_difference, std::abs(dw));
  }
  out.final_fidelity = std::norm(out.full.final_state().dot(out.effective.final_state()));
  return out;
}

}  // namespace thouless
