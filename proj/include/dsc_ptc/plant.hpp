#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dsc_ptc {

/// Reference trajectory with analytic first and second derivatives.
struct ReferenceSignal {
  std::function<double(double)> y_d;
  std::function<double(double)> y_d_dot;
  std::function<double(double)> y_d_ddot;
};

/// Parameters of the auxiliary dynamic signal
///   r' = -c_bar r + upsilon_bar(x1) + d,   r(0) = r0 >= 0,
/// a computable surrogate bound for the unmodeled-dynamics energy.
struct DynSignal {
  double c_bar = 1.0;
  double d = 0.0;
  double r0 = 0.0;
  std::function<double(double)> upsilon_bar;  // of x1, nonnegative
};

/// Strict-feedback plant
///
///   x_i' = g_i(t,x) x_{i+1} + theta_i(t)' phi_i(xbar_i) + Delta_i(t,x,xi)
///   x_n' = g_n(t,x) u       + theta_n(t)' phi_n(xbar_n) + Delta_n(t,x,xi)
///   xi'  = q(t, xi, x)
///
/// split into what a controller may know (dimensions, lower gain bounds,
/// regressors, disturbance envelopes, dynamic-signal parameters) and the
/// hidden truth closures only the simulator evaluates. Step indices are
/// 0-based throughout the code.
struct PlantModel {
  int n = 1;   // strict-feedback order
  int n0 = 0;  // unmodeled-dynamics dimension

  std::vector<double> gain_lower;   // n entries, > 0
  std::vector<double> gain_upper;   // n entries; diagnostics only
  std::vector<int> regressor_dim;   // n entries

  // Designer-known structure.
  std::function<void(int, std::span<const double>, std::span<double>)> regressor;  // (i, xbar_i, out)
  std::function<double(int, std::span<const double>)> psi1;  // state envelope, >= 0
  std::function<double(int, double)> psi2;                   // envelope as a function of r, >= 0
  std::optional<DynSignal> dyn_signal;

  // Truth closures, hidden from the controller.
  std::function<double(int, double, std::span<const double>)> true_gain;        // (i, t, x)
  std::function<double(int, double, std::span<const double>)> true_param_term;  // theta_i' phi_i at (i, t, xbar_i)
  std::function<double(int, double, std::span<const double>, std::span<const double>)>
      uncertainty;  // Delta_i at (i, t, x, xi)
  std::function<void(double, std::span<const double>, std::span<const double>, std::span<double>)>
      unmodeled_rhs;  // q at (t, xi, x) -> dxi
};

/// The slice of a PlantModel the controller is allowed to see.
struct PlantView {
  int n = 1;
  std::vector<double> gain_lower;
  std::vector<int> regressor_dim;
  std::function<void(int, std::span<const double>, std::span<double>)> regressor;
  std::function<double(int, std::span<const double>)> psi1;
  std::function<double(int, double)> psi2;
  std::optional<DynSignal> dyn_signal;
};

PlantView controller_view(const PlantModel& m);

/// Evaluates the full plant right-hand side. Outputs may be non-finite if
/// the state already diverged; the simulator classifies that as a blowup.
void plant_rhs(const PlantModel& m, double t, std::span<const double> x,
               std::span<const double> xi, double u, std::span<double> dx,
               std::span<double> dxi);

/// First-order benchmark: x' = (1 - 0.5 cos(t x)) u + (1 + 0.5 sin t) x sin x,
/// regulation to the origin, no unmodeled dynamics.
std::pair<PlantModel, ReferenceSignal> builtin_example1();

/// Second-order benchmark with unmodeled dynamics:
///   xi'  = -xi + 0.5 x1^2 sin(x1 t)
///   x1'  = x1 exp(-0.5 x1) + (1 + x1^2) x2 + 0.2 xi x1 sin(x2 t)
///   x2'  = x1 x2^2 + (3 - cos(x1 x2)) u + 0.1 xi cos(0.5 x2 t)
/// tracking y_d = 0.5 (sin t + sin 0.5t).
std::pair<PlantModel, ReferenceSignal> builtin_example2();

}  // namespace dsc_ptc
