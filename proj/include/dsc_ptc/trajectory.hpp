#pragma once

#include <vector>

namespace dsc_ptc {

/// One logged sample of the closed loop: plant states, controller states,
/// transformed errors, the control input, and the schedule values in effect.
struct TrajectoryRecord {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> xi;
  double r = 0.0;
  std::vector<double> z;
  std::vector<double> w;
  double u = 0.0;
  std::vector<double> alpha;    // virtual controls (n-1 entries)
  std::vector<double> alpha_c;  // filter outputs
  std::vector<double> theta_hat;
  std::vector<double> gamma_hat;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double rho = 0.0;
  double e = 0.0;  // x1 - y_d
};

}  // namespace dsc_ptc
