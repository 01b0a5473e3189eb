#include "dsc_ptc/plant.hpp"

#include <cmath>

namespace dsc_ptc {

PlantView controller_view(const PlantModel& m) {
  PlantView v;
  v.n = m.n;
  v.gain_lower = m.gain_lower;
  v.regressor_dim = m.regressor_dim;
  v.regressor = m.regressor;
  v.psi1 = m.psi1;
  v.psi2 = m.psi2;
  v.dyn_signal = m.dyn_signal;
  return v;
}

void plant_rhs(const PlantModel& m, double t, std::span<const double> x,
               std::span<const double> xi, double u, std::span<double> dx,
               std::span<double> dxi) {
  for (int i = 0; i < m.n; ++i) {
    const auto xbar = x.first(static_cast<std::size_t>(i) + 1);
    const double gi = m.true_gain(i, t, x);
    const double next = (i + 1 < m.n) ? x[static_cast<std::size_t>(i) + 1] : u;
    dx[static_cast<std::size_t>(i)] =
        gi * next + m.true_param_term(i, t, xbar) + m.uncertainty(i, t, x, xi);
  }
  if (m.n0 > 0) m.unmodeled_rhs(t, xi, x, dxi);
}

std::pair<PlantModel, ReferenceSignal> builtin_example1() {
  PlantModel m;
  m.n = 1;
  m.n0 = 0;
  m.gain_lower = {0.5};  // range of 1 - 0.5 cos(.)
  m.gain_upper = {1.5};
  m.regressor_dim = {1};
  m.regressor = [](int, std::span<const double> xbar, std::span<double> out) {
    out[0] = xbar[0] * std::sin(xbar[0]);
  };
  m.psi1 = [](int, std::span<const double>) { return 0.0; };
  m.psi2 = [](int, double) { return 0.0; };
  m.dyn_signal = std::nullopt;
  m.true_gain = [](int, double t, std::span<const double> x) {
    return 1.0 - 0.5 * std::cos(t * x[0]);
  };
  m.true_param_term = [](int, double t, std::span<const double> xbar) {
    return (1.0 + 0.5 * std::sin(t)) * xbar[0] * std::sin(xbar[0]);
  };
  m.uncertainty = [](int, double, std::span<const double>, std::span<const double>) {
    return 0.0;
  };
  m.unmodeled_rhs = [](double, std::span<const double>, std::span<const double>,
                       std::span<double>) {};

  ReferenceSignal ref;
  ref.y_d = [](double) { return 0.0; };
  ref.y_d_dot = [](double) { return 0.0; };
  ref.y_d_ddot = [](double) { return 0.0; };
  return {std::move(m), std::move(ref)};
}

std::pair<PlantModel, ReferenceSignal> builtin_example2() {
  PlantModel m;
  m.n = 2;
  m.n0 = 1;
  // g1 = 1 + x1^2 and g2 = 3 - cos(x1 x2). Only the lower bounds enter the
  // control law; the upper bound for g1 assumes |x1| <= 2 on the verified
  // operating region and is used for runtime diagnostics only.
  m.gain_lower = {1.0, 2.0};
  m.gain_upper = {5.0, 4.0};
  m.regressor_dim = {1, 1};
  m.regressor = [](int i, std::span<const double> xbar, std::span<double> out) {
    if (i == 0) {
      out[0] = xbar[0] * std::exp(-0.5 * xbar[0]);
    } else {
      out[0] = xbar[0] * xbar[1] * xbar[1];
    }
  };
  m.psi1 = [](int i, std::span<const double> xbar) {
    return i == 0 ? std::sqrt(xbar[0] * xbar[0] + 0.1) : 0.0;
  };
  m.psi2 = [](int, double r) { return std::sqrt(r * r + 0.1); };
  DynSignal dyn;
  dyn.c_bar = 1.0;
  dyn.d = 0.625;
  dyn.r0 = 0.0;
  dyn.upsilon_bar = [](double x1) {
    const double s = x1 * x1;
    return 2.5 * s * s;
  };
  m.dyn_signal = std::move(dyn);
  m.true_gain = [](int i, double, std::span<const double> x) {
    return i == 0 ? 1.0 + x[0] * x[0] : 3.0 - std::cos(x[0] * x[1]);
  };
  m.true_param_term = [](int i, double, std::span<const double> xbar) {
    if (i == 0) return xbar[0] * std::exp(-0.5 * xbar[0]);
    return xbar[0] * xbar[1] * xbar[1];
  };
  m.uncertainty = [](int i, double t, std::span<const double> x, std::span<const double> xi) {
    if (xi.empty()) return 0.0;
    if (i == 0) return 0.2 * xi[0] * x[0] * std::sin(x[1] * t);
    return 0.1 * xi[0] * std::cos(0.5 * x[1] * t);
  };
  m.unmodeled_rhs = [](double t, std::span<const double> xi, std::span<const double> x,
                       std::span<double> out) {
    out[0] = -xi[0] + 0.5 * x[0] * x[0] * std::sin(x[0] * t);
  };

  ReferenceSignal ref;
  ref.y_d = [](double t) { return 0.5 * (std::sin(t) + std::sin(0.5 * t)); };
  ref.y_d_dot = [](double t) { return 0.5 * (std::cos(t) + 0.5 * std::cos(0.5 * t)); };
  ref.y_d_ddot = [](double t) { return 0.5 * (-std::sin(t) - 0.25 * std::sin(0.5 * t)); };
  return {std::move(m), std::move(ref)};
}

}  // namespace dsc_ptc
