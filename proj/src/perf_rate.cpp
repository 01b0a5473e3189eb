#include "dsc_ptc/perf_rate.hpp"

#include <cmath>
#include <stdexcept>

namespace dsc_ptc {

PerfRateFn::PerfRateFn(PerfRateParams params, RateDirection direction)
    : params_(params), direction_(direction) {
  if (!(params.mu0 > 0.0) || !(params.muT > 0.0)) {
    throw std::invalid_argument("PerfRateFn: mu0 and muT must be positive");
  }
  if (!(params.T > 0.0)) {
    throw std::invalid_argument("PerfRateFn: T must be positive");
  }
  if (!(params.upsilon > 0.0)) {
    throw std::invalid_argument("PerfRateFn: upsilon must be positive");
  }
  if (direction == RateDirection::Decreasing && params.muT > params.mu0) {
    throw std::invalid_argument("PerfRateFn: decreasing function requires muT <= mu0");
  }
  if (direction == RateDirection::Increasing && params.muT < params.mu0) {
    throw std::invalid_argument("PerfRateFn: increasing function requires muT >= mu0");
  }
}

double PerfRateFn::value(double t) const {
  // Endpoints are returned exactly; the rational form only evaluates on the
  // open transition interval where its denominator is bounded away from zero.
  if (t <= 0.0) return params_.mu0;
  if (t >= params_.T) return params_.muT;
  const double w = params_.T - t;
  const double ut = params_.upsilon * t;
  const double denom = w * w + ut * ut;
  return params_.muT + (params_.mu0 - params_.muT) * w * w / denom;
}

double PerfRateFn::derivative(double t) const {
  if (t <= 0.0 || t >= params_.T) return 0.0;
  const double w = params_.T - t;
  const double ut = params_.upsilon * t;
  const double denom = w * w + ut * ut;
  const double u2 = params_.upsilon * params_.upsilon;
  return -2.0 * u2 * (params_.mu0 - params_.muT) * params_.T * t * w / (denom * denom);
}

double EpsSchedule::raw(double t) const {
  if (custom) return custom(t);
  return std::exp(-decay_rate * t);
}

double EpsSchedule::value(double t) const {
  const double v = raw(t);
  return v > floor ? v : floor;
}

double EpsSchedule::integral_exponential(double horizon) const {
  return (1.0 - std::exp(-decay_rate * horizon)) / decay_rate;
}

GainSchedule::GainSchedule(double sigma_bar, double upsilon_sigma, double T, EpsSchedule eps)
    : sigma1_(PerfRateParams{1.0, sigma_bar, T, upsilon_sigma}, RateDirection::Increasing),
      eps_(std::move(eps)) {
  if (!(eps_.floor > 0.0)) {
    throw std::invalid_argument("GainSchedule: eps floor must be positive");
  }
  if (!eps_.custom && !(eps_.decay_rate > 0.0)) {
    throw std::invalid_argument("GainSchedule: eps decay rate must be positive");
  }
}

double GainSchedule::sigma2(double t) const {
  const double T = prescribed_time();
  if (t < T) return sigma1_.value(t);
  return sigma_bar() * eps_.value(t - T);
}

std::vector<std::string> GainSchedule::warnings() const {
  std::vector<std::string> out;
  if (eps_.custom && std::abs(eps_.raw(0.0) - 1.0) > 1e-12) {
    out.push_back("eps(0) != 1: sigma2 is discontinuous at the prescribed time");
  }
  if (sigma1_.constant()) {
    out.push_back("sigma_bar == 1: the rate schedule is constant");
  }
  return out;
}

}  // namespace dsc_ptc
