#include "thouless/wannier.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace thouless {

namespace {

constexpr double kPi = std::numbers::pi;

double principal(double x) { return std::remainder(x, 2.0 * kPi); }

void check_band_cell(const BandSolution& bands, int m, int cell) {
  if (m < 0 || m >= bands.num_bands()) throw InvalidArgument("band index out of range");
  if (cell < 1 || cell > bands.params().L) throw InvalidArgument("cell label out of range");
}

void check_theta(const BandSolution& bands, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != bands.num_k()) {
    throw InvalidArgument("gauge phases must be given on every k-grid point");
  }
}

// Columns a_k of the linear map theta -> W, i.e. W = sum_k a_k e^{i theta_k}.
Eigen::MatrixXcd wannier_columns(const BandSolution& bands, int it, int m, int cell) {
  const ModelParams& params = bands.params();
  const int q = params.q;
  const int L = params.L;
  const int n = params.num_sites();
  Eigen::MatrixXcd cols(n, bands.num_k());
  for (int ik = 0; ik < bands.num_k(); ++ik) {
    const double k = bands.k_grid()[ik];
    const Eigen::MatrixXcd& u = bands.states(ik, it);
    for (int l = 1; l <= L; ++l) {
      const cplx phase = std::polar(1.0 / L, k * q * (l - cell));
      for (int s = 0; s < q; ++s) cols(q * (l - 1) + s, ik) = phase * u(s, m);
    }
  }
  return cols;
}

double spread_of(const Eigen::VectorXcd& w) {
  double x1 = 0.0;
  double x2 = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double rho = std::norm(w(j));
    const double pos = static_cast<double>(j + 1);
    x1 += pos * rho;
    x2 += pos * pos * rho;
  }
  return x2 - x1 * x1;
}

}  // namespace

double SpreadReport::dispersion_width() const { return std::sqrt(std::max(omega, 0.0)); }

WannierState wannier_from_bloch(const BandSolution& bands, int it, int m, int cell,
                                std::span<const double> theta) {
  check_band_cell(bands, m, cell);
  check_theta(bands, theta);
  const Eigen::MatrixXcd cols = wannier_columns(bands, it, m, cell);
  Eigen::VectorXcd phases(bands.num_k());
  for (int ik = 0; ik < bands.num_k(); ++ik) phases(ik) = std::polar(1.0, theta[ik]);
  return WannierState{cols * phases, m, cell};
}

std::vector<cplx> k_links(const BandSolution& bands, int it, int m) {
  const int nk = bands.num_k();
  const int q = bands.params().q;
  const double dk = 2.0 * kPi / (q * bands.params().L);
  std::vector<cplx> links(nk);
  for (int ik = 0; ik < nk; ++ik) {
    const Eigen::VectorXcd a = bands.state(m, ik, it);
    const Eigen::VectorXcd b = bands.state(m, (ik + 1) % nk, it);
    cplx sum = 0.0;
    // Site j = s+1 inside the cell carries the extra factor exp(-i dk j).
    for (int s = 0; s < q; ++s) sum += std::polar(1.0, -dk * (s + 1)) * std::conj(a(s)) * b(s);
    links[ik] = sum;
  }
  return links;
}

std::vector<double> berry_connection(const BandSolution& bands, int it, int m,
                                     std::span<const double> theta) {
  check_theta(bands, theta);
  const int nk = bands.num_k();
  const int q = bands.params().q;
  // Fourier modes exp(-ikqd) with d in a window centred on zero.
  const int d_lo = -(nk / 2);
  const int d_hi = d_lo + nk - 1;
  std::vector<Eigen::VectorXcd> f(nk);
  for (int ik = 0; ik < nk; ++ik) f[ik] = std::polar(1.0, theta[ik]) * bands.state(m, ik, it);

  std::vector<Eigen::VectorXcd> coeffs;
  coeffs.reserve(nk);
  for (int d = d_lo; d <= d_hi; ++d) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(q);
    for (int ik = 0; ik < nk; ++ik) c += std::polar(1.0, bands.k_grid()[ik] * q * d) * f[ik];
    coeffs.push_back(c / static_cast<double>(nk));
  }

  std::vector<double> conn(nk);
  for (int ik = 0; ik < nk; ++ik) {
    const double k = bands.k_grid()[ik];
    Eigen::VectorXcd df = Eigen::VectorXcd::Zero(q);  // i d/dk f
    for (int d = d_lo; d <= d_hi; ++d) {
      df += static_cast<double>(q * d) * std::polar(1.0, -k * q * d) * coeffs[d - d_lo];
    }
    double intracell = 0.0;
    for (int s = 0; s < q; ++s) intracell += (s + 1) * std::norm(f[ik](s));
    conn[ik] = intracell + f[ik].dot(df).real();
  }
  return conn;
}

std::vector<double> link_connection(const BandSolution& bands, int it, int m,
                                    std::span<const double> theta) {
  check_theta(bands, theta);
  const int nk = bands.num_k();
  const double dk = 2.0 * kPi / (bands.params().q * bands.params().L);
  const std::vector<cplx> links = k_links(bands, it, m);
  std::vector<double> conn(nk);
  for (int ik = 0; ik < nk; ++ik) {
    const double dtheta = theta[(ik + 1) % nk] - theta[ik];
    conn[ik] = -principal(std::arg(links[ik]) + dtheta) / dk;
  }
  return conn;
}

std::vector<double> parallel_transport_gauge(const BandSolution& bands, int it, int m) {
  check_band_cell(bands, m, 1);
  const int nk = bands.num_k();
  const int q = bands.params().q;
  const std::vector<cplx> links = k_links(bands, it, m);
  double sum = 0.0;
  for (const cplx& z : links) {
    if (std::abs(z) < 1e-8) throw ConvergenceError("parallel transport: vanishing k-overlap", std::abs(z));
    sum += std::arg(z);
  }
  // Loop phase Phi relates to the intracell part of the center by
  // A = -q Phi / (2 pi); pick the branch with A in (1/2, q + 1/2].
  const double lo = -2.0 * kPi * (q + 0.5) / q;
  double loop = sum - 2.0 * kPi * std::floor((sum - lo) / (2.0 * kPi));
  if (loop >= -kPi / q) loop -= 2.0 * kPi;
  const double per_link = loop / nk;

  std::vector<double> theta(nk, 0.0);
  for (int ik = 0; ik + 1 < nk; ++ik) theta[ik + 1] = theta[ik] - std::arg(links[ik]) + per_link;
  return theta;
}

std::vector<WannierState> wannier_basis(const BandSolution& bands, int it) {
  std::vector<WannierState> basis;
  basis.reserve(static_cast<std::size_t>(bands.num_bands() * bands.params().L));
  for (int m = 0; m < bands.num_bands(); ++m) {
    const std::vector<double> theta = parallel_transport_gauge(bands, it, m);
    for (int cell = 1; cell <= bands.params().L; ++cell) {
      basis.push_back(wannier_from_bloch(bands, it, m, cell, theta));
    }
  }
  return basis;
}

LocalizedWannier maximally_localize(const BandSolution& bands, int it, int m, int cell) {
  std::vector<double> theta = parallel_transport_gauge(bands, it, m);
  WannierState state = wannier_from_bloch(bands, it, m, cell, theta);
  const std::vector<WannierState> basis = wannier_basis(bands, it);
  SpreadReport spread = spread_decomposition(state, basis);
  return LocalizedWannier{std::move(state), spread, std::move(theta)};
}

SpreadReport spread_decomposition(const Eigen::VectorXcd& state, int band, int cell,
                                  std::span<const WannierState> basis) {
  const Eigen::Index n = state.size();
  if (static_cast<Eigen::Index>(basis.size()) != n) {
    throw InvalidArgument("spread_decomposition: incomplete basis (" + std::to_string(basis.size()) +
                          " states for " + std::to_string(n) + " sites)");
  }
  Eigen::MatrixXcd b(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    if (basis[c].amplitudes.size() != n) throw InvalidArgument("spread_decomposition: basis size mismatch");
    b.col(c) = basis[c].amplitudes;
  }
  const double gram_dev = (b.adjoint() * b - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (gram_dev > 1e-10) {
    throw InvalidArgument("spread_decomposition: basis is not orthonormal (deviation " +
                          std::to_string(gram_dev) + ")");
  }

  Eigen::VectorXcd x_state(n);
  double center = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    x_state(j) = static_cast<double>(j + 1) * state(j);
    center += static_cast<double>(j + 1) * std::norm(state(j));
  }
  const Eigen::VectorXcd proj = b.adjoint() * x_state;

  SpreadReport r;
  r.center = center;
  r.omega = spread_of(state);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double w = std::norm(proj(c));
    if (basis[c].band != band) {
      r.omega_I += w;
    } else if (basis[c].cell != cell) {
      r.omega_D += w;
    }
  }
  const double mismatch = std::abs(r.omega - r.omega_I - r.omega_D);
  if (mismatch > 1e-10 * std::max(1.0, r.omega)) {
    throw Error("spread_decomposition: Omega - Omega_I - Omega_D = " + std::to_string(mismatch) +
                "; state is not the basis member (band " + std::to_string(band) + ", cell " +
                std::to_string(cell) + ")");
  }
  return r;
}

SpreadReport spread_decomposition(const WannierState& state, std::span<const WannierState> basis) {
  return spread_decomposition(state.amplitudes, state.band, state.cell, basis);
}

std::vector<double> phase_steps(std::span<const double> gamma) {
  const std::size_t n = gamma.size();
  if (n < 3) throw InvalidArgument("phase_steps: need at least three grid points");
  std::vector<double> steps(n);
  for (std::size_t i = 0; i < n; ++i) {
    steps[i] = principal(gamma[(i + 1) % n] - gamma[i]);
    if (std::abs(steps[i]) > 0.9 * kPi) {
      throw Error("phase unwrap failure: step " + std::to_string(steps[i]) + " at grid index " +
                  std::to_string(i) + " is ambiguous; refine the k-grid");
    }
  }
  return steps;
}

std::vector<double> negative_phase_derivative(std::span<const double> gamma, double dk) {
  const std::vector<double> steps = phase_steps(gamma);
  const int n = static_cast<int>(steps.size());
  double total = 0.0;
  for (double s : steps) total += s;
  const double slope = total / n;
  // Periodic residual after removing the winding; differentiated by
  // trigonometric interpolation (the Nyquist mode of an even grid is dropped).
  std::vector<double> residual(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    residual[i] = acc - slope * i;
    acc += steps[i];
  }
  const int d_max = (n - 1) / 2;
  std::vector<cplx> coeffs(2 * d_max + 1, 0.0);
  for (int d = -d_max; d <= d_max; ++d) {
    for (int i = 0; i < n; ++i) coeffs[d + d_max] += residual[i] * std::polar(1.0, -2.0 * kPi * d * i / n);
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    double deriv = 0.0;
    for (int d = -d_max; d <= d_max; ++d) {
      deriv += (cplx(0.0, 2.0 * kPi * d / n) * coeffs[d + d_max] * std::polar(1.0, 2.0 * kPi * d * i / n)).real();
    }
    x[i] = -(deriv / n + slope) / dk;
  }
  return x;
}

double predict_dispersion(std::span<const double> gamma, double dk) {
  const std::vector<double> x = negative_phase_derivative(gamma, dk);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  return var / static_cast<double>(x.size());
}

SpreadMinimum minimize_spread(const BandSolution& bands, int it, int m, int cell,
                              std::span<const double> theta0, double gradient_tol, int max_iterations) {
  check_band_cell(bands, m, cell);
  check_theta(bands, theta0);
  const Eigen::MatrixXcd cols = wannier_columns(bands, it, m, cell);
  const int nk = bands.num_k();
  const int dim = nk - 1;  // theta_0 fixed: global phase
  const Eigen::Index n = cols.rows();
  Eigen::VectorXd pos(n);
  for (Eigen::Index j = 0; j < n; ++j) pos(j) = static_cast<double>(j + 1);

  auto evaluate = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    Eigen::VectorXcd ph(nk);
    ph(0) = std::polar(1.0, theta0[0]);
    for (int i = 0; i < dim; ++i) ph(i + 1) = std::polar(1.0, x(i));
    const Eigen::VectorXcd w = cols * ph;
    const Eigen::VectorXd rho = w.cwiseAbs2();
    const double mean = pos.dot(rho);
    const double omega = pos.cwiseProduct(pos).dot(rho) - mean * mean;
    if (grad) {
      // d|W_j|^2/d theta_k = 2 Re(conj(W_j) i a_jk e^{i theta_k})
      const Eigen::VectorXd weight = pos.cwiseProduct(pos) - 2.0 * mean * pos;
      const Eigen::VectorXcd g = cols.adjoint() * (weight.cast<cplx>().cwiseProduct(w));
      grad->resize(dim);
      for (int i = 0; i < dim; ++i) (*grad)(i) = 2.0 * (cplx(0.0, -1.0) * std::conj(ph(i + 1)) * g(i + 1)).real();
    }
    return omega;
  };

  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x(i) = theta0[i + 1];
  Eigen::VectorXd g;
  double f = evaluate(x, &g);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim) * 0.01;
  int iter = 0;
  for (; iter < max_iterations && g.lpNorm<Eigen::Infinity>() > gradient_tol; ++iter) {
    Eigen::VectorXd dir = -hinv * g;
    if (dir.dot(g) >= 0.0) {
      hinv = Eigen::MatrixXd::Identity(dim, dim) * 0.01;
      dir = -hinv * g;
    }
    double step = 1.0;
    Eigen::VectorXd x_new;
    Eigen::VectorXd g_new;
    double f_new = f;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * dir;
      f_new = evaluate(x_new, &g_new);
      if (f_new <= f + 1e-4 * step * dir.dot(g)) break;
      step *= 0.5;
    }
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const Eigen::VectorXd hy = hinv * y;
      hinv += ((sy + y.dot(hy)) / (sy * sy)) * (s * s.transpose()) - (hy * s.transpose() + s * hy.transpose()) / sy;
    }
    if (f_new > f) break;  // line search stalled at round-off level
    x = x_new;
    g = g_new;
    f = f_new;
  }

  SpreadMinimum out;
  out.theta.assign(nk, theta0[0]);
  for (int i = 0; i < dim; ++i) out.theta[i + 1] = x(i);
  out.omega = f;
  out.iterations = iter;
  return out;
}

}  // namespace thouless
