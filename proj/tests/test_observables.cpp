#include <doctest.h>

#include <cmath>

#include "thouless/observables.hpp"
#include "thouless/wannier.hpp"

using namespace thouless;
using doctest::Approx;

TEST_CASE("moments of simple states") {
  const auto s = measure(site_state(45, 27), {}, 1.5, 27.0, 3);
  CHECK(s.t == 1.5);
  CHECK(s.mean_x == Approx(27.0));
  CHECK(s.d_w == 0.0);
  CHECK(s.delta_p == 0.0);
  CHECK(s.density.sum() == Approx(1.0));

  Eigen::VectorXcd pair = (site_state(45, 24) + site_state(45, 30)) / std::sqrt(2.0);
  const auto t = measure(pair, {{"site24", site_state(45, 24)}}, 0.0, 30.0, 3);
  CHECK(t.mean_x == Approx(27.0));
  CHECK(t.d_w == Approx(3.0));
  CHECK(t.delta_p == Approx(-1.0));
  CHECK(t.projections.at("site24") == Approx(0.5));
}

TEST_CASE("measurement input checks") {
  Eigen::VectorXcd v = site_state(9, 1) * 1.1;
  CHECK_THROWS_AS(measure(v), InvalidArgument);
  CHECK_THROWS_AS(measure(site_state(9, 1), {{"short", site_state(6, 1)}}), InvalidArgument);
  CHECK_THROWS_AS(site_state(9, 0), InvalidArgument);
  CHECK_THROWS_AS(site_state(9, 10), InvalidArgument);
}

TEST_CASE("band populations of Bloch states and sites") {
  ModelParams p;
  const std::vector<double> t{0.0};
  const auto bands = solve_bands(p, t);
  const auto w = band_population(bands.bloch_state(1, 3, 0), bands, 0);
  CHECK(w(1) == Approx(1.0));
  CHECK(w.sum() == Approx(1.0));
  const auto site = band_population(site_state(p.num_sites(), 27), bands, 0);
  CHECK(site.sum() == Approx(1.0));
  CHECK(site(2) > 0.999);
}

TEST_CASE("global phase and Wannier width") {
  ModelParams p;
  const std::vector<double> t{0.0};
  const auto bands = solve_bands(p, t);
  const auto w = maximally_localize(bands, 0, 2, 9);
  const Eigen::VectorXcd rotated = std::polar(1.0, 0.7) * w.state.amplitudes;
  const auto a = measure(w.state.amplitudes, {{"w", w.state.amplitudes}});
  const auto b = measure(rotated, {{"w", w.state.amplitudes}});
  CHECK(a.mean_x == Approx(b.mean_x));
  CHECK(a.d_w == Approx(b.d_w));
  CHECK(b.projections.at("w") == Approx(1.0));
  CHECK(std::abs(a.d_w - std::sqrt(w.spread.omega_I)) < 1e-8);
}
