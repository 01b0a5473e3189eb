#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dsc_ptc/trajectory.hpp"

namespace dsc_ptc {

/// Scalar summaries of one closed-loop run.
struct MetricsSummary {
  double energy = 0.0;            // integral of u^2 over the records (trapezoid)
  double e_at_T = 0.0;            // |e| linearly interpolated at the prescribed time
  double max_funnel_ratio = 0.0;  // max |e| / rho over the records
  double final_error = 0.0;       // mean |e| over the last 5% of the recorded span
  double max_abs_u = 0.0;
  std::vector<double> theta_hat_max;
  bool completed = false;
};

/// Throws std::invalid_argument on an empty record sequence.
MetricsSummary summarize(std::span<const TrajectoryRecord> records, double T, bool completed);

/// Diagnostic residual-set calculator:
///   Omega     = exp(-varsigma_bar sigma_bar T) V0
///             + (chi_bar / sigma_bar)(1 - exp(-varsigma_bar sigma_bar T))
///   z1_bound  = min(sqrt(1 - 10^(-2 g1_low Omega)), rho_T)
///   zi_bounds = sqrt(2 gi_low Omega) for the remaining steps.
/// chi_bar and V0 are analysis-side constants supplied by the user.
struct ResidualBound {
  double Omega = 0.0;
  double z1_bound = 0.0;
  std::vector<double> zi_bounds;
};

ResidualBound residual_bound(double V0, double varsigma_bar, double sigma_bar, double T,
                             double chi_bar, double rho_T, std::span<const double> gain_lower);

/// Result of a sampled inequality check. `max_violation` is the largest
/// LHS - RHS observed; anything above `tolerance` counts as a violation.
struct CheckReport {
  std::string name;
  long samples = 0;
  long violations = 0;
  double max_violation = 0.0;
  double tolerance = 1e-12;
  std::string worst;  // printable tuple for the worst sample
  bool ok = true;
};

/// s Theta'Phi <= |Theta| s^2 Phi'Phi / sqrt(s^2 Phi'Phi + tau^2) + tau |Theta|
/// over random (s, Theta, Phi, tau).
CheckReport check_normalizer_bound(long samples, std::uint64_t seed);

/// log(k^2/(k^2 - s^2)) <= s^2/(k^2 - s^2) for |s| < k, including samples
/// pushed to |s| = k(1 - 1e-6).
CheckReport check_log_barrier_bound(long samples, std::uint64_t seed);

/// z * smoothed_envelope(z, psi, eps) >= |z| psi - eps over random draws.
CheckReport check_smoothing(long samples, std::uint64_t seed);

/// Transition-function family properties over random parameter draws:
/// exact endpoints, strict monotonicity, analytic derivative vs central
/// finite difference, C1 freeze at the deadline, sigma2 continuity, and the
/// quadrature check of the eps schedule against its closed-form integral.
CheckReport check_perf_rate(long samples, std::uint64_t seed);

/// Integrates r' = -c_bar r + d from r0 with a scalar RK4 and compares
/// against the closed-form solution of the linear ODE.
CheckReport check_dyn_signal_oracle();

/// Trajectory-level check of the dynamic signal: r stays nonnegative and the
/// logged samples satisfy the ODE residual between consecutive records.
struct DynSignalCheck {
  bool ok = true;
  bool nonnegative = true;
  double max_residual = 0.0;
  double first_bad_t = -1.0;
};

DynSignalCheck check_dynamic_signal(std::span<const TrajectoryRecord> records, double c_bar,
                                    const std::function<double(double)>& upsilon_bar, double d);

}  // namespace dsc_ptc
