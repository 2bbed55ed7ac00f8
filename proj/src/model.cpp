#include "thouless/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace thouless {

namespace {

// 2 pi beta j reduced to [0, 2 pi) exactly in integer arithmetic, so that
// commensurability holds bit-for-bit (site j and j+q see the same angle).
double lattice_angle(const ModelParams& params, int j) {
  const long long r = (static_cast<long long>(params.p) * j) % params.q;
  return 2.0 * std::numbers::pi * static_cast<double>(r) / params.q;
}

void check_site(const ModelParams& params, int j) {
  if (j < 1 || j > params.num_sites()) {
    throw InvalidArgument("site index " + std::to_string(j) + " outside 1.." +
                          std::to_string(params.num_sites()));
  }
}

}  // namespace

double ModelParams::period() const {
  if (omega == 0.0) throw InvalidArgument("period undefined for omega = 0");
  return 2.0 * std::numbers::pi / std::abs(omega);
}

void ModelParams::validate() const {
  if (q < 2) throw InvalidArgument("q must be >= 2");
  if (p < 1) throw InvalidArgument("p must be positive");
  if (std::gcd(p, q) != 1) throw InvalidArgument("p and q must be coprime");
  if (L < 3) throw InvalidArgument("L must be >= 3");
  if (!std::isfinite(J) || !std::isfinite(V0) || !std::isfinite(phi0) || !std::isfinite(omega)) {
    throw InvalidArgument("model parameters must be finite");
  }
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw InvalidArgument("HermitianMatrix: matrix must be square and non-empty");
  }
  const double dev = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kTolerance) {
    throw InvalidArgument("HermitianMatrix: deviation from Hermiticity " + std::to_string(dev));
  }
}

bool HermitianMatrix::is_real() const {
  return entries_.imag().cwiseAbs().maxCoeff() == 0.0;
}

Eigen::VectorXd HermitianMatrix::eigenvalues() const {
  if (is_real()) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(entries_.real(), Eigen::EigenvaluesOnly)
        .eigenvalues();
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(entries_, Eigen::EigenvaluesOnly).eigenvalues();
}

double onsite_energy(const ModelParams& params, int j, double t) {
  check_site(params, j);
  return params.sign_factor() * params.V0 * std::cos(lattice_angle(params, j) + params.phase(t));
}

double tunneling(const ModelParams& params, int j, double t) {
  check_site(params, j);
  switch (params.tunneling_mode) {
    case TunnelingMode::Uniform:
      return -params.J * params.sign_factor();
    case TunnelingMode::SineModulated:
      return -params.J * std::sin(lattice_angle(params, j) + params.phase(t)) * params.sign_factor();
  }
  return 0.0;
}

RingHamiltonian ring_hamiltonian(const ModelParams& params, double t) {
  params.validate();
  const int n = params.num_sites();
  RingHamiltonian h{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int j = 1; j <= n; ++j) {
    h.onsite(j - 1) = onsite_energy(params, j, t);
    h.bond(j - 1) = tunneling(params, j, t);
  }
  return h;
}

Eigen::VectorXcd RingHamiltonian::apply(const Eigen::VectorXcd& v) const {
  const Eigen::Index n = dim();
  Eigen::VectorXcd out = onsite.cwiseProduct(v);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index next = (j + 1) % n;
    out(j) += bond(j) * v(next);
    out(next) += bond(j) * v(j);
  }
  return out;
}

HermitianMatrix RingHamiltonian::dense() const {
  const Eigen::Index n = dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index next = (j + 1) % n;
    h(j, j) = onsite(j);
    h(j, next) += bond(j);
    h(next, j) += bond(j);
  }
  return HermitianMatrix(std::move(h));
}

HermitianMatrix real_space_hamiltonian(const ModelParams& params, double t) {
  return ring_hamiltonian(params, t).dense();
}

std::vector<double> k_grid(const ModelParams& params) {
  // k = 2 pi m / N with -L/2 < m <= L/2, so that exp(i k N) = 1 on the ring.
  const int lowest = -(params.L - 1) / 2;
  std::vector<double> ks(params.L);
  for (int i = 0; i < params.L; ++i) {
    ks[i] = 2.0 * std::numbers::pi * (lowest + i) / (params.q * params.L);
  }
  return ks;
}

int k_index(const ModelParams& params, double k) {
  const double spacing = 2.0 * std::numbers::pi / (params.q * params.L);
  const double x = k / spacing;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) > 1e-9 * std::max(1.0, std::abs(x))) {
    throw InvalidArgument("quasi-momentum " + std::to_string(k) + " is not on the k-grid");
  }
  const long long lowest = -(params.L - 1) / 2;
  long long i = (static_cast<long long>(nearest) - lowest) % params.L;
  if (i < 0) i += params.L;
  return static_cast<int>(i);
}

HermitianMatrix bloch_hamiltonian(const ModelParams& params, double k, double t) {
  params.validate();
  k_index(params, k);
  const int q = params.q;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(q, q);
  for (int s = 0; s < q; ++s) {
    const int j = s + 1;  // representative site in cell 1
    h(s, s) += onsite_energy(params, j, t);
    const double amp = tunneling(params, j, t);
    if (s + 1 < q) {
      h(s, s + 1) += amp;
      h(s + 1, s) += amp;
    } else {
      const cplx boundary = std::polar(1.0, k * q);
      h(q - 1, 0) += amp * boundary;
      h(0, q - 1) += amp * std::conj(boundary);
    }
  }
  // q == 2: both bonds land on the same off-diagonal pair; force exact symmetry.
  Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
  return HermitianMatrix(std::move(sym));
}

}  // namespace thouless
