#pragma once

// Generalized commensurate Aubry-Andre-Harper lattice on a ring of N = qL
// sites. Site indices in the public API are 1-based (j = 1..N); cell labels
// are 1-based as well, cell l owning sites q(l-1)+1 .. ql.

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <vector>

#include "thouless/error.hpp"

namespace thouless {

using cplx = std::complex<double>;

enum class TunnelingMode { Uniform, SineModulated };
enum class Sign { Plus, Minus };

struct ModelParams {
  double J = 1.0;
  double V0 = 30.0;
  int p = 1;
  int q = 3;
  double phi0 = 0.0;
  double omega = 0.01;
  int L = 15;
  TunnelingMode tunneling_mode = TunnelingMode::Uniform;
  Sign sign = Sign::Plus;

  int num_sites() const { return q * L; }
  double beta() const { return static_cast<double>(p) / q; }
  double phase(double t) const { return omega * t + phi0; }
  double sign_factor() const { return sign == Sign::Plus ? 1.0 : -1.0; }
  // Pumping period 2*pi/omega; throws for omega == 0.
  double period() const;

  // Throws InvalidArgument unless gcd(p,q)=1, q>=2, L>=3.
  void validate() const;

  ModelParams with_sign(Sign s) const {
    ModelParams out = *this;
    out.sign = s;
    return out;
  }
  ModelParams with_mode(TunnelingMode m) const {
    ModelParams out = *this;
    out.tunneling_mode = m;
    return out;
  }
};

// Dense complex square matrix that is Hermitian to 1e-12 (absolute).
class HermitianMatrix {
 public:
  static constexpr double kTolerance = 1e-12;

  HermitianMatrix() = default;
  explicit HermitianMatrix(Eigen::MatrixXcd entries);

  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return entries_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  // True when every imaginary part is exactly zero.
  bool is_real() const;
  Eigen::MatrixXd real_part() const { return entries_.real(); }

  Eigen::VectorXd eigenvalues() const;

 private:
  Eigen::MatrixXcd entries_;
};

// V0 cos(2 pi beta j + phi(t)), negated for Sign::Minus.
double onsite_energy(const ModelParams& params, int j, double t);

// Amplitude on bond (j, j+1); bond N wraps to site 1.
double tunneling(const ModelParams& params, int j, double t);

HermitianMatrix real_space_hamiltonian(const ModelParams& params, double t);

// The same ring in compact form (0-based): onsite(j), and bond(j) coupling
// sites j and j+1 mod N.
struct RingHamiltonian {
  Eigen::VectorXd onsite;
  Eigen::VectorXd bond;

  Eigen::Index dim() const { return onsite.size(); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  HermitianMatrix dense() const;
};

RingHamiltonian ring_hamiltonian(const ModelParams& params, double t);

// Allowed quasi-momenta k = 2 pi m/(qL), -L/2 < m <= L/2, ascending. For even
// L this is k_n = -pi/q + 2 pi n/(qL), n = 1..L.
std::vector<double> k_grid(const ModelParams& params);

// Index (0-based) of k on the k-grid, reducing k modulo 2 pi/q first.
// Throws InvalidArgument if k is not a grid point.
int k_index(const ModelParams& params, double k);

// q x q Bloch Hamiltonian in the cell-periodic gauge: the Bloch state is
// psi_j = exp(i k q (l-1)) u_s with s the sublattice of site j, so only the
// bond crossing the cell boundary carries exp(+-ikq).
HermitianMatrix bloch_hamiltonian(const ModelParams& params, double k, double t);

// 0-based sublattice index of 1-based site j.
inline int sublattice(const ModelParams& params, int j) { return (j - 1) % params.q; }
// 1-based cell label of 1-based site j.
inline int cell_of(const ModelParams& params, int j) { return (j - 1) / params.q + 1; }
// 1-based site index of sublattice s (0-based) in cell l (1-based).
inline int site_of(const ModelParams& params, int cell, int s) { return params.q * (cell - 1) + s + 1; }

}  // namespace thouless
