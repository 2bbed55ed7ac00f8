#include "thouless/observables.hpp"

#include <cmath>

namespace thouless {

ObservableSample measure(const Eigen::VectorXcd& state, const std::vector<LabeledState>& references, double t,
                         double reference_mean_x, int q) {
  const double norm2 = state.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-8) {
    throw InvalidArgument("measure: state is not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
  }
  ObservableSample s;
  s.t = t;
  s.density = state.cwiseAbs2();
  double x1 = 0.0;
  double x2 = 0.0;
  for (Eigen::Index j = 0; j < s.density.size(); ++j) {
    const double pos = static_cast<double>(j + 1);
    x1 += pos * s.density(j);
    x2 += pos * pos * s.density(j);
  }
  s.mean_x = x1;
  s.d_w = std::sqrt(std::max(x2 - x1 * x1, 0.0));
  s.delta_p = (x1 - reference_mean_x) / q;
  for (const auto& ref : references) {
    if (ref.state.size() != state.size()) throw InvalidArgument("measure: reference '" + ref.label + "' has wrong size");
    s.projections[ref.label] = std::min(1.0, std::norm(ref.state.dot(state)));
  }
  return s;
}

Eigen::VectorXd band_population(const Eigen::VectorXcd& state, const BandSolution& bands, int it) {
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(bands.num_bands());
  for (int m = 0; m < bands.num_bands(); ++m) {
    for (int ik = 0; ik < bands.num_k(); ++ik) weights(m) += std::norm(bands.bloch_state(m, ik, it).dot(state));
  }
  return weights;
}

Eigen::VectorXcd site_state(int num_sites, int j) {
  if (j < 1 || j > num_sites) throw InvalidArgument("site_state: index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(num_sites);
  v(j - 1) = 1.0;
  return v;
}

}  // namespace thouless
