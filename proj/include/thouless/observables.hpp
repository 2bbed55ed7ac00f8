#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "thouless/spectrum.hpp"

namespace thouless {

struct ObservableSample {
  double t = 0.0;
  Eigen::VectorXd density;  // |psi_j|^2, sums to 1
  double mean_x = 0.0;      // sites, X = sum_j j n_j
  double delta_p = 0.0;     // cells, relative to the reference mean position
  double d_w = 0.0;         // sqrt(<X^2> - <X>^2), sites
  std::map<std::string, double> projections;
};

struct LabeledState {
  std::string label;
  Eigen::VectorXcd state;
};

// Raw site-index moments; throws InvalidArgument if |psi| deviates from 1 by
// more than 1e-8. delta_p uses reference_mean_x and the cell size q.
ObservableSample measure(const Eigen::VectorXcd& state, const std::vector<LabeledState>& references = {},
                         double t = 0.0, double reference_mean_x = 0.0, int q = 1);

// Weight of the state on each band at time index it: sum_k |<psi_m(k)|state>|^2.
Eigen::VectorXd band_population(const Eigen::VectorXcd& state, const BandSolution& bands, int it);

// Single-site basis state |j> (1-based), as in |C>_l labelling.
Eigen::VectorXcd site_state(int num_sites, int j);

}  // namespace thouless
