#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dsc_ptc {

/// Parameters of the C1 transition-function family used for both the
/// shrinking tracking funnel and the growing gain schedule: the function
/// moves from `mu0` at t = 0 to `muT` at t = T with zero slope at t = 0,
/// and stays frozen at `muT` for all t >= T.
struct PerfRateParams {
  double mu0 = 1.0;      // initial value, > 0
  double muT = 1.0;      // terminal (frozen) value, > 0
  double T = 1.0;        // transition deadline in seconds, > 0
  double upsilon = 1.0;  // shape parameter, > 0
};

enum class RateDirection {
  Decreasing,  // funnel boundary rho: mu0 > muT
  Increasing   // rate gain sigma: mu0 = 1 < muT
};

/// C1 rational transition function
///
///   mu(t) = muT + (mu0 - muT) (T-t)^2 / ((T-t)^2 + upsilon^2 t^2),  t < T
///   mu(t) = muT,                                                    t >= T
///
/// The denominator is written as (T-t)^2 + upsilon^2 t^2, which is
/// algebraically identical to the expanded form (upsilon^2+1)t^2 + T^2 - 2Tt
/// but manifestly positive and stable near t = T. The derivative has the
/// closed form -2 upsilon^2 (mu0-muT) T t (T-t) / D^2, so it is exactly zero
/// at t = 0 and t >= T and continuous across the junction.
class PerfRateFn {
 public:
  /// Throws std::invalid_argument on nonpositive parameters or when the
  /// declared direction contradicts mu0/muT. Equal endpoints are accepted
  /// but flagged through constant().
  PerfRateFn(PerfRateParams params, RateDirection direction);

  double value(double t) const;
  double derivative(double t) const;

  const PerfRateParams& params() const { return params_; }
  RateDirection direction() const { return direction_; }

  /// True when mu0 == muT (a constant function; allowed but usually a
  /// configuration mistake worth surfacing).
  bool constant() const { return params_.mu0 == params_.muT; }

 private:
  PerfRateParams params_;
  RateDirection direction_;
};

/// Positive integrable schedule used as the smoothing slack and, shifted,
/// as the vanishing leakage envelope. The built-in form is exp(-decay_rate t);
/// a custom evaluator can replace it (library use only). Values are clamped
/// below by `floor` because the schedule appears inside sqrt(. ^2 + eps^2)
/// denominators and must never reach a hard zero.
struct EpsSchedule {
  double decay_rate = 0.1;
  double floor = 1e-12;
  std::function<double(double)> custom;  // overrides the exponential if set

  double raw(double t) const;            // unclamped schedule value
  double value(double t) const;          // max(raw, floor)

  /// Closed-form integral of the built-in exponential over [0, horizon];
  /// used as the integrability oracle. Only valid when `custom` is unset.
  double integral_exponential(double horizon) const;
};

/// The two gain schedules derived from one rate function:
///   sigma1(t): increasing 1 -> sigma_bar over [0, T], frozen afterward;
///   sigma2(t): equals sigma1 before T, then sigma_bar * eps(t - T), so the
///              adaptive leakage vanishes after the deadline.
class GainSchedule {
 public:
  GainSchedule(double sigma_bar, double upsilon_sigma, double T, EpsSchedule eps);

  double sigma1(double t) const { return sigma1_.value(t); }
  double sigma2(double t) const;
  double eps(double t) const { return eps_.value(t); }

  double sigma_bar() const { return sigma1_.params().muT; }
  double prescribed_time() const { return sigma1_.params().T; }
  const EpsSchedule& eps_schedule() const { return eps_; }

  /// Non-fatal configuration findings, e.g. a custom eps with eps(0) != 1,
  /// which breaks the continuity of sigma2 at t = T.
  std::vector<std::string> warnings() const;

 private:
  PerfRateFn sigma1_;
  EpsSchedule eps_;
};

}  // namespace dsc_ptc
