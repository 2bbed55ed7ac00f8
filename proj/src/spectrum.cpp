#include "thouless/spectrum.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace thouless {

namespace {

void fix_gauge(Eigen::MatrixXcd& vecs) {
  for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
    Eigen::Index imax = 0;
    vecs.col(c).cwiseAbs().maxCoeff(&imax);
    const cplx pivot = vecs(imax, c);
    vecs.col(c) *= std::conj(pivot) / std::abs(pivot);
    vecs(imax, c) = std::abs(vecs(imax, c));
  }
}

bool detect_closed(const ModelParams& params, const std::vector<double>& t_grid) {
  if (params.omega == 0.0 || t_grid.size() < 3) return false;
  const double period = params.period();
  const double h = period / static_cast<double>(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double expected = t_grid.front() + h * static_cast<double>(i);
    if (std::abs(t_grid[i] - expected) > 1e-9 * period) return false;
  }
  return true;
}

cplx link(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const cplx z = a.dot(b);  // <a|b>
  const double mag = std::abs(z);
  if (mag < 1e-14) throw BandTouchingError("vanishing link overlap in lattice field strength");
  return z / mag;
}

}  // namespace

BandSolution::BandSolution(ModelParams params, std::vector<double> k_grid, std::vector<double> t_grid,
                           std::vector<Eigen::VectorXd> energies, std::vector<Eigen::MatrixXcd> states)
    : params_(std::move(params)),
      k_grid_(std::move(k_grid)),
      t_grid_(std::move(t_grid)),
      energies_(std::move(energies)),
      states_(std::move(states)) {
  if (energies_.size() != k_grid_.size() * t_grid_.size() || states_.size() != energies_.size()) {
    throw InvalidArgument("BandSolution: storage does not match grid sizes");
  }
  closed_in_t_ = detect_closed(params_, t_grid_);
}

double BandSolution::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& e : energies_) {
    for (Eigen::Index m = 0; m + 1 < e.size(); ++m) gap = std::min(gap, e(m + 1) - e(m));
  }
  return gap;
}

Eigen::VectorXcd BandSolution::bloch_state(int m, int ik, int it) const {
  const int q = params_.q;
  const int n = params_.num_sites();
  const double k = k_grid_[ik];
  const Eigen::MatrixXcd& u = states(ik, it);
  Eigen::VectorXcd psi(n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(params_.L));
  for (int l = 1; l <= params_.L; ++l) {
    const cplx phase = std::polar(norm, k * q * (l - 1));
    for (int s = 0; s < q; ++s) psi(q * (l - 1) + s) = phase * u(s, m);
  }
  return psi;
}

std::vector<double> periodic_time_grid(const ModelParams& params, int n_t) {
  if (n_t < 1) throw InvalidArgument("time grid needs at least one point");
  const double period = params.period();
  std::vector<double> ts(n_t);
  for (int n = 0; n < n_t; ++n) ts[n] = period * n / n_t;
  return ts;
}

BandSolution solve_bands(const ModelParams& params, std::span<const double> t_grid,
                         const SolveOptions& options) {
  params.validate();
  if (t_grid.empty()) throw InvalidArgument("solve_bands: empty time grid");
  const double tol = options.gap_tolerance >= 0.0 ? options.gap_tolerance : 1e-6 * std::abs(params.V0);
  const std::vector<double> ks = k_grid(params);

  std::vector<Eigen::VectorXd> energies;
  std::vector<Eigen::MatrixXcd> states;
  energies.reserve(ks.size() * t_grid.size());
  states.reserve(ks.size() * t_grid.size());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(params.q);
  for (double t : t_grid) {
    for (double k : ks) {
      solver.compute(bloch_hamiltonian(params, k, t).matrix());
      if (solver.info() != Eigen::Success) throw Error("solve_bands: eigensolver failed");
      const Eigen::VectorXd& e = solver.eigenvalues();
      for (Eigen::Index m = 0; m + 1 < e.size(); ++m) {
        if (e(m + 1) - e(m) < tol) {
          throw BandTouchingError("band-touching: gap " + std::to_string(e(m + 1) - e(m)) +
                                  " between bands " + std::to_string(m) + " and " +
                                  std::to_string(m + 1) + " at k=" + std::to_string(k) +
                                  ", t=" + std::to_string(t));
        }
      }
      Eigen::MatrixXcd vecs = solver.eigenvectors();
      fix_gauge(vecs);
      energies.push_back(e);
      states.push_back(std::move(vecs));
    }
  }
  return BandSolution(params, ks, std::vector<double>(t_grid.begin(), t_grid.end()), std::move(energies),
                      std::move(states));
}

Eigen::MatrixXd berry_curvature_grid(const BandSolution& bands, int m) {
  if (m < 0 || m >= bands.num_bands()) throw InvalidArgument("band index out of range");
  if (!bands.closed_in_t()) {
    throw InvalidArgument("berry_curvature_grid: time grid must sample one full period uniformly");
  }
  const int nk = bands.num_k();
  const int nt = bands.num_t();
  // Plaquette orientation k then t gives F = d_t A_k - d_k A_t with
  // A = i<u|du>, i.e. the curvature whose integral is the pumped charge.
  Eigen::MatrixXd field(nk, nt);
  for (int it = 0; it < nt; ++it) {
    const int it1 = (it + 1) % nt;
    for (int ik = 0; ik < nk; ++ik) {
      const int ik1 = (ik + 1) % nk;
      const Eigen::VectorXcd u00 = bands.state(m, ik, it);
      const Eigen::VectorXcd u10 = bands.state(m, ik1, it);
      const Eigen::VectorXcd u01 = bands.state(m, ik, it1);
      const Eigen::VectorXcd u11 = bands.state(m, ik1, it1);
      const cplx loop = link(u00, u10) * link(u10, u11) * std::conj(link(u01, u11)) * std::conj(link(u00, u01));
      field(ik, it) = std::arg(loop);
    }
  }
  return field;
}

int chern_number(const BandSolution& bands, int m) {
  const double total = berry_curvature_grid(bands, m).sum() / (2.0 * std::numbers::pi);
  const double rounded = std::round(total);
  if (std::abs(total - rounded) > 1e-6) {
    throw Error("chern_number: lattice sum " + std::to_string(total) + " is not integral");
  }
  return static_cast<int>(rounded);
}

FlatnessReport flatness(const BandSolution& bands) {
  const int q = bands.num_bands();
  const int nk = bands.num_k();
  const int nt = bands.num_t();
  FlatnessReport report;
  report.times = bands.t_grid();
  report.phases.reserve(nt);
  report.gaps = Eigen::MatrixXd::Zero(nt, q - 1);
  report.bandwidths = Eigen::MatrixXd::Zero(nt, q);
  report.ratios = Eigen::MatrixXd::Zero(nt, q);
  for (int it = 0; it < nt; ++it) {
    report.phases.push_back(bands.params().phase(bands.t_grid()[it]));
    for (int m = 0; m < q; ++m) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      double gap = std::numeric_limits<double>::infinity();
      for (int ik = 0; ik < nk; ++ik) {
        const double e = bands.energy(m, ik, it);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
        if (m + 1 < q) gap = std::min(gap, bands.energy(m + 1, ik, it) - e);
      }
      report.bandwidths(it, m) = hi - lo;
      if (m + 1 < q) report.gaps(it, m) = gap;
    }
    for (int m = 0; m < q; ++m) {
      double gap = std::numeric_limits<double>::infinity();
      if (m > 0) gap = std::min(gap, report.gaps(it, m - 1));
      if (m + 1 < q) gap = std::min(gap, report.gaps(it, m));
      report.ratios(it, m) = report.bandwidths(it, m) / gap;
    }
  }
  return report;
}

}  // namespace thouless
