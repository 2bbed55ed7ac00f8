#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "thouless/model.hpp"

namespace thouless {

// Computes exp(-i H dt) psi by short-iterative Lanczos with full
// reorthogonalization. The Krylov dimension grows until the error bound
// drops below `tolerance` (relative to |psi|).
class KrylovPropagator {
 public:
  explicit KrylovPropagator(double tolerance = 1e-14, int max_dim = 40)
      : tolerance_(tolerance), max_dim_(max_dim) {}

  void step(const Eigen::MatrixXd& h, Eigen::VectorXcd& psi, double dt);
  void step(const Eigen::MatrixXcd& h, Eigen::VectorXcd& psi, double dt);
  void step(const Eigen::SparseMatrix<double>& h, Eigen::VectorXcd& psi, double dt);
  void step(const RingHamiltonian& h, Eigen::VectorXcd& psi, double dt);

  int last_dimension() const { return last_dim_; }

 private:
  template <typename Apply>
  void step_impl(const Apply& apply, Eigen::VectorXcd& psi, double dt);

  double tolerance_;
  int max_dim_;
  int last_dim_ = 0;
  Eigen::MatrixXcd basis_;
};

}  // namespace thouless
