#include <doctest.h>

#include <cmath>
#include <numbers>

#include "thouless/effective.hpp"

using namespace thouless;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

HermitianMatrix diag(std::initializer_list<double> e) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(e.size()));
  Eigen::Index i = 0;
  for (double x : e) d(i++) = x;
  return HermitianMatrix(d.asDiagonal().toDenseMatrix().cast<cplx>());
}

}  // namespace

TEST_CASE("region table") {
  CHECK(region_of_phase(0.0) == Region::I);
  CHECK(region_of_phase(kPi / 3) == Region::II);
  CHECK(region_of_phase(2 * kPi / 3) == Region::III);
  CHECK(region_of_phase(kPi) == Region::I);
  CHECK(region_of_phase(4 * kPi / 3) == Region::II);
  CHECK(region_of_phase(5 * kPi / 3) == Region::III);
  CHECK(region_of_phase(-kPi / 3) == Region::III);
  CHECK(region_of_phase(kPi / 6) == Region::II);
  CHECK(to_string(Region::III) == "III");
}

TEST_CASE("two-level system: second order energy shifts") {
  // H0 = diag(0, 10), V couples 0-1 with g: shifts -g^2/10 and +g^2/10.
  const double g = 0.5;
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(2, 2);
  v(0, 1) = v(1, 0) = g;
  const std::vector<int> low{0}, high{1};
  const auto a = sw_generic(diag({0.0, 10.0}), HermitianMatrix(v), low, 2, 1.0);
  const auto b = sw_generic(diag({0.0, 10.0}), HermitianMatrix(v), high, 2, 1.0);
  CHECK(a(0, 0).real() == Approx(-g * g / 10));
  CHECK(b(0, 0).real() == Approx(10.0 + g * g / 10));
  // Third order vanishes without diagonal V.
  CHECK(sw_generic(diag({0.0, 10.0}), HermitianMatrix(v), low, 3, 1.0)(0, 0).real() == Approx(-g * g / 10));
}

TEST_CASE("three-level chain: effective coupling through an intermediate level") {
  // 0 and 2 degenerate, 1 detuned by D; J_eff = g1 g2 / (0 - D).
  const double g1 = 0.3, g2 = -0.4, d = 8.0;
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(3, 3);
  v(0, 1) = v(1, 0) = g1;
  v(1, 2) = v(2, 1) = g2;
  const std::vector<int> sub{0, 2};
  const auto h = sw_generic(diag({0.0, d, 0.0}), HermitianMatrix(v), sub, 2, 1.0);
  CHECK(h(0, 1).real() == Approx(-g1 * g2 / d));
  CHECK(h(0, 0).real() == Approx(-g1 * g1 / d));
  CHECK(h(1, 1).real() == Approx(-g2 * g2 / d));
}

TEST_CASE("engine input checks") {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(2, 2);
  v(0, 1) = v(1, 0) = 0.1;
  const std::vector<int> low{0};
  CHECK_THROWS_AS(sw_generic(diag({0.0, 0.5}), HermitianMatrix(v), low, 2, 1.0), DivergentDenominatorError);
  CHECK_THROWS_AS(sw_generic(diag({0.0, 5.0}), HermitianMatrix(v), low, 4, 1.0), InvalidArgument);
  CHECK_THROWS_AS(sw_generic(HermitianMatrix(v), HermitianMatrix(v), low, 2, 1.0), InvalidArgument);
  const std::vector<int> bad{2};
  CHECK_THROWS_AS(sw_generic(diag({0.0, 5.0}), HermitianMatrix(v), bad, 2, 1.0), InvalidArgument);
}

TEST_CASE("closed forms match the engine on the ring") {
  for (auto mode : {TunnelingMode::Uniform, TunnelingMode::SineModulated}) {
    ModelParams p = ModelParams{}.with_mode(mode);
    for (int i = 0; i < 12; ++i) {
      const double t = (i + 0.37) * p.period() / 12;
      const Region r = region_at(p, t);
      const auto closed = effective_hamiltonian(p, t, r).matrix();
      const auto engine = sw_ring(p, t, r).matrix();
      CHECK((closed - engine).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("region I coefficients") {
  const auto e = effective_coefficients(Region::I, 10.0, 10.0, -20.0, 1.0, 2.0, 3.0);
  CHECK(e.delta2 == Approx(30.0));
  CHECK(e.J_first == Approx(1.0 - 13.0 / 1800.0));
  CHECK(e.J_third == Approx(6.0 / 1800.0));
  CHECK(e.J_second == Approx(2.0 * 3.0 / 30.0));
  CHECK(e.eff_C == Approx(-20.0 - (4.0 + 9.0) / 30.0));
}

TEST_CASE("effective spectrum tracks the full spectrum") {
  ModelParams p;
  for (int i = 0; i < 12; ++i) {
    const double t = (i + 0.5) * p.period() / 12;
    const Eigen::VectorXd full = real_space_hamiltonian(p, t).eigenvalues();
    const Eigen::VectorXd eff = effective_cycle_hamiltonian(p, t).eigenvalues();
    CHECK((full - eff).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("effective model restrictions") {
  ModelParams p;
  CHECK_THROWS_AS(effective_params(p, 0.0, Region::II), InvalidArgument);
  CHECK_NOTHROW(effective_params(p, 0.0, Region::I));
  ModelParams g = p;
  g.q = 5;
  g.p = 2;
  CHECK_THROWS_AS(effective_params(g, 0.0), InvalidArgument);
  CHECK(gap_floor(p) == Approx(3.0));
  const auto res = resonant_subspace(p, Region::I);
  CHECK(res.size() == 30u);
  CHECK(detuned_subspace(p, Region::I).size() == 15u);
}
