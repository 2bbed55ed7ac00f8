#include "thouless/propagator.hpp"

#include <cmath>

namespace thouless {

namespace {

// exp(-i T dt) e_1 for the real symmetric tridiagonal T = tri(alpha, beta).
Eigen::VectorXcd tridiagonal_exp_e1(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, double dt) {
  const Eigen::Index m = alpha.size();
  if (m == 1) {
    Eigen::VectorXcd out(1);
    out(0) = std::polar(1.0, -alpha(0) * dt);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(alpha, beta.head(m - 1));
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::VectorXcd phased(m);
  for (Eigen::Index i = 0; i < m; ++i) phased(i) = std::polar(v(0, i), -es.eigenvalues()(i) * dt);
  return v.cast<cplx>() * phased;
}

}  // namespace

void KrylovPropagator::step(const Eigen::MatrixXd& h, Eigen::VectorXcd& psi, double dt) {
  step_impl([&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return h * v; }, psi, dt);
}

void KrylovPropagator::step(const Eigen::MatrixXcd& h, Eigen::VectorXcd& psi, double dt) {
  step_impl([&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return h * v; }, psi, dt);
}

void KrylovPropagator::step(const Eigen::SparseMatrix<double>& h, Eigen::VectorXcd& psi, double dt) {
  step_impl([&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return h * v; }, psi, dt);
}

void KrylovPropagator::step(const RingHamiltonian& h, Eigen::VectorXcd& psi, double dt) {
  step_impl([&](const Eigen::VectorXcd& v) { return h.apply(v); }, psi, dt);
}

template <typename Apply>
void KrylovPropagator::step_impl(const Apply& apply, Eigen::VectorXcd& psi, double dt) {
  const Eigen::Index n = psi.size();
  const double norm = psi.norm();
  if (norm == 0.0) return;
  const int cap = static_cast<int>(std::min<Eigen::Index>(max_dim_, n));
  if (basis_.rows() != n || basis_.cols() < cap) basis_.resize(n, cap);

  Eigen::VectorXd alpha(cap);
  Eigen::VectorXd beta(cap);
  basis_.col(0) = psi / norm;
  // Running value of beta_1 ... beta_j |dt|^j / j!, a bound on the truncation error.
  double bound = 1.0;
  int dim = 0;
  for (int j = 0; j < cap; ++j) {
    Eigen::VectorXcd w = apply(basis_.col(j));
    alpha(j) = basis_.col(j).dot(w).real();
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) w -= basis_.col(i).dot(w) * basis_.col(i);
    }
    beta(j) = w.norm();
    dim = j + 1;
    bound *= beta(j) * std::abs(dt) / dim;
    if (bound < tolerance_ || beta(j) <= 1e-14 * std::max(1.0, std::abs(alpha(j))) || dim == cap) break;
    basis_.col(j + 1) = w / beta(j);
  }
  last_dim_ = dim;
  // exp(-iT dt) e_1 has unit norm; removing its rounding keeps drift from accumulating.
  Eigen::VectorXcd coeff = tridiagonal_exp_e1(alpha.head(dim), beta.head(dim), dt);
  coeff /= coeff.norm();
  psi = norm * (basis_.leftCols(dim) * coeff);
}

}  // namespace thouless
