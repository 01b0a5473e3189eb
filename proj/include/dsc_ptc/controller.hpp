#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsc_ptc/perf_rate.hpp"
#include "dsc_ptc/plant.hpp"

namespace dsc_ptc {

/// Design gains of the n-step adaptive dynamic-surface controller.
struct ControllerGains {
  std::vector<double> varsigma_z;  // n error gains; the first should exceed 1/2
  std::vector<double> varsigma_w;  // n-1 filter gains
  std::vector<double> iota_theta;  // n adaptation rates
  std::vector<double> iota_gamma;  // n-1 filter-bound adaptation rates
  double sigma_bar = 2.0;          // terminal rate gain, > 1
  double T = 1.0;                  // prescribed time, seconds
  PerfRateParams rho;              // funnel: rho0 -> rhoT (< rho0), shape upsilon
  double upsilon_sigma = 1.0;      // shape of the rate schedule
  EpsSchedule eps;
};

/// Checks hard invariants (dimensions, positivity, sigma_bar > 1,
/// rhoT < rho0, rho.T == T, positive eps floor), throwing
/// std::invalid_argument on violation. Returns soft warnings for theory
/// preconditions that do not prevent a run (e.g. varsigma_z[0] <= 1/2).
std::vector<std::string> validate_gains(const ControllerGains& g, int n);

/// Integrated states owned by the controller.
struct ControllerState {
  std::vector<double> alpha_c;    // n-1 filter outputs
  std::vector<double> theta_hat;  // n estimates, nonnegative
  std::vector<double> gamma_hat;  // n-1 estimates, nonnegative
  double r = 0.0;                 // dynamic signal, nonnegative
};

/// Non-owning view used on the integrator hot path.
struct ControllerStateView {
  std::span<const double> alpha_c;
  std::span<const double> theta_hat;
  std::span<const double> gamma_hat;
  double r = 0.0;
};

ControllerStateView view_of(const ControllerState& s);

/// Everything one evaluation of the control law produces: the transformed
/// errors, the per-step intermediates, the control input, and the time
/// derivatives of all controller states. Buffers are sized once per run
/// and reused across integrator stages.
struct StepWorkspace {
  int n = 0;

  // Schedules sampled at the evaluation time.
  double sigma1 = 0.0, sigma2 = 0.0, rho = 0.0, rho_dot = 0.0, eps = 0.0;

  double lambda = 1.0;  // barrier factor 1 / (1 - z1^2)
  double u = 0.0;       // actual control input (== alpha[n-1])

  std::vector<double> z;          // n transformed errors; z[0] in (-1, 1)
  std::vector<double> kappa;      // n; kappa[0] = lambda/(g1_low rho), else 1/gi_low
  std::vector<double> zeta;       // n
  std::vector<double> varphi;     // n smoothed normalizers
  std::vector<double> alpha_bar;  // n
  std::vector<double> alpha;      // n virtual controls; last entry is u

  std::vector<double> w;            // n-1 filter errors
  std::vector<double> alpha_c_dot;  // n-1 filter RHS values
  std::vector<double> theta_hat_dot;
  std::vector<double> gamma_hat_dot;
  double r_dot = 0.0;

  std::vector<std::vector<double>> phi;  // raw regressors per step
  std::vector<std::vector<double>> Phi;  // augmented regressors per step

  void configure(const PlantView& view);
};

enum class EvalStatus { Ok, FunnelViolation, NonFinite };

/// Immutable per-run bundle: the plant as seen by the controller, the gains,
/// the reference, and the instantiated schedules.
struct ControllerContext {
  PlantView plant;
  ControllerGains gains;
  ReferenceSignal ref;
  PerfRateFn rho_fn;
  GainSchedule sched;
  double guard_delta = 1e-9;

  static ControllerContext make(PlantView view, ControllerGains gains, ReferenceSignal ref,
                                double guard_delta = 1e-9);
};

/// s Phi'Phi / sqrt(s^2 Phi'Phi + eps^2); magnitude never exceeds |Phi|.
double smoothed_normalizer(double s, std::span<const double> Phi, double eps);

/// psi^2 z / sqrt(z^2 psi^2 + eps^2); vanishes at z = 0 and satisfies
/// z * smoothed_envelope(z, psi, eps) >= |z| psi - eps.
double smoothed_envelope(double z, double psi, double eps);

/// Saturated virtual-control form -kappa z abar^2 / (g_low sqrt((kappa z abar)^2 + eps^2));
/// bounded by |abar| / g_low for all inputs.
double saturated_law(double kappa, double z, double alpha_bar, double g_lower, double eps);

/// Nonlinear filter RHS: -varsigma_w sigma1 w - kappa w - ghat^2 w / sqrt(ghat^2 w^2 + eps^2).
double filter_rhs(double w, double kappa, double gamma_hat, double sigma1, double varsigma_w,
                  double eps);

/// Coordinate transforms: z[0] = (x1 - y_d)/rho with the funnel guard,
/// z[i] = x[i] - alpha_c[i-1]. Returns FunnelViolation when |z[0]| reaches
/// 1 - guard_delta.
EvalStatus transform_errors(std::span<const double> x, double y_d, double rho,
                            std::span<const double> alpha_c, double guard_delta,
                            std::span<double> z_out);

/// One pass of the full control law at (t, x, state): errors, virtual
/// controls, filters, control input, and adaptive/filter/dynamic-signal
/// derivatives. Pure in its inputs; all outputs land in `ws`.
EvalStatus controller_eval(const ControllerContext& ctx, double t, std::span<const double> x,
                           const ControllerStateView& state, StepWorkspace& ws);

/// Builds the initial controller state: filter outputs matched to the
/// virtual controls at t = 0 (so all filter errors start at zero), estimates
/// and dynamic signal from the supplied initial values. Returns nullopt when
/// the initial output error does not fit inside the funnel.
std::optional<ControllerState> init_state(const ControllerContext& ctx,
                                          std::span<const double> x0,
                                          std::span<const double> theta_hat0,
                                          std::span<const double> gamma_hat0, double r0);

}  // namespace dsc_ptc
