#include "dsc_ptc/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace dsc_ptc {
namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> validate_gains(const ControllerGains& g, int n) {
  const auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(n >= 1, "gains: plant order must be >= 1");
  require(g.varsigma_z.size() == static_cast<std::size_t>(n), "gains: varsigma_z size != n");
  require(g.varsigma_w.size() == static_cast<std::size_t>(n - 1), "gains: varsigma_w size != n-1");
  require(g.iota_theta.size() == static_cast<std::size_t>(n), "gains: iota_theta size != n");
  require(g.iota_gamma.size() == static_cast<std::size_t>(n - 1), "gains: iota_gamma size != n-1");
  for (double v : g.varsigma_z) require(v > 0.0, "gains: varsigma_z entries must be positive");
  for (double v : g.varsigma_w) require(v > 0.0, "gains: varsigma_w entries must be positive");
  for (double v : g.iota_theta) require(v > 0.0, "gains: iota_theta entries must be positive");
  for (double v : g.iota_gamma) require(v > 0.0, "gains: iota_gamma entries must be positive");
  require(g.sigma_bar > 1.0, "gains: sigma_bar must exceed 1");
  require(g.T > 0.0, "gains: T must be positive");
  require(g.rho.T == g.T, "gains: funnel deadline must equal T");
  require(g.rho.mu0 > 0.0 && g.rho.muT > 0.0, "gains: funnel bounds must be positive");
  require(g.rho.muT < g.rho.mu0, "gains: rhoT must be smaller than rho0");
  require(g.rho.upsilon > 0.0, "gains: upsilon_rho must be positive");
  require(g.upsilon_sigma > 0.0, "gains: upsilon_sigma must be positive");
  require(g.eps.floor > 0.0, "gains: eps floor must be positive");
  if (!g.eps.custom) require(g.eps.decay_rate > 0.0, "gains: eps decay rate must be positive");

  std::vector<std::string> warnings;
  if (g.varsigma_z[0] <= 0.5) {
    warnings.push_back("varsigma_z[0] <= 1/2: outside the analyzed gain range");
  }
  GainSchedule sched(g.sigma_bar, g.upsilon_sigma, g.T, g.eps);
  auto sw = sched.warnings();
  warnings.insert(warnings.end(), sw.begin(), sw.end());
  return warnings;
}

ControllerStateView view_of(const ControllerState& s) {
  return ControllerStateView{s.alpha_c, s.theta_hat, s.gamma_hat, s.r};
}

void StepWorkspace::configure(const PlantView& view) {
  n = view.n;
  const auto nn = static_cast<std::size_t>(n);
  z.assign(nn, 0.0);
  kappa.assign(nn, 0.0);
  zeta.assign(nn, 0.0);
  varphi.assign(nn, 0.0);
  alpha_bar.assign(nn, 0.0);
  alpha.assign(nn, 0.0);
  w.assign(nn - 1, 0.0);
  alpha_c_dot.assign(nn - 1, 0.0);
  theta_hat_dot.assign(nn, 0.0);
  gamma_hat_dot.assign(nn - 1, 0.0);
  phi.resize(nn);
  Phi.resize(nn);
  for (int i = 0; i < n; ++i) {
    const auto ri = static_cast<std::size_t>(view.regressor_dim[static_cast<std::size_t>(i)]);
    phi[static_cast<std::size_t>(i)].assign(ri, 0.0);
    // step 0 appends [psi-hat sum, z/4]; later steps also prepend the
    // cross-coupling term (kappa_{i-1}/kappa_i) z_{i-1}.
    Phi[static_cast<std::size_t>(i)].assign(ri + (i == 0 ? 2 : 3), 0.0);
  }
}

ControllerContext ControllerContext::make(PlantView view, ControllerGains gains,
                                          ReferenceSignal ref, double guard_delta) {
  PerfRateFn rho_fn(gains.rho, RateDirection::Decreasing);
  GainSchedule sched(gains.sigma_bar, gains.upsilon_sigma, gains.T, gains.eps);
  return ControllerContext{std::move(view), std::move(gains), std::move(ref),
                           std::move(rho_fn), std::move(sched), guard_delta};
}

double smoothed_normalizer(double s, std::span<const double> Phi, double eps) {
  double pp = 0.0;
  for (double v : Phi) pp += v * v;
  return s * pp / std::sqrt(s * s * pp + eps * eps);
}

double smoothed_envelope(double z, double psi, double eps) {
  const double zp = z * psi;
  return psi * zp / std::sqrt(zp * zp + eps * eps);
}

double saturated_law(double kappa, double z, double alpha_bar, double g_lower, double eps) {
  const double s = kappa * z * alpha_bar;
  return -s * alpha_bar / (g_lower * std::sqrt(s * s + eps * eps));
}

double filter_rhs(double w, double kappa, double gamma_hat, double sigma1, double varsigma_w,
                  double eps) {
  const double gw = gamma_hat * w;
  return -varsigma_w * sigma1 * w - kappa * w - gamma_hat * gw / std::sqrt(gw * gw + eps * eps);
}

EvalStatus transform_errors(std::span<const double> x, double y_d, double rho,
                            std::span<const double> alpha_c, double guard_delta,
                            std::span<double> z_out) {
  const double z1 = (x[0] - y_d) / rho;
  if (!std::isfinite(z1)) return EvalStatus::NonFinite;
  if (std::abs(z1) >= 1.0 - guard_delta) return EvalStatus::FunnelViolation;
  z_out[0] = z1;
  for (std::size_t i = 1; i < x.size(); ++i) z_out[i] = x[i] - alpha_c[i - 1];
  return all_finite(z_out) ? EvalStatus::Ok : EvalStatus::NonFinite;
}

namespace {

// Single pass of the recursive design. When `init_alpha_c` is non-empty the
// filter outputs are being created: each one is set equal to the virtual
// control just computed, which makes every filter error start at zero.
EvalStatus eval_impl(const ControllerContext& ctx, double t, std::span<const double> x,
                     std::span<const double> alpha_c, std::span<const double> theta_hat,
                     std::span<const double> gamma_hat, double r, StepWorkspace& ws,
                     std::span<double> init_alpha_c) {
  const PlantView& view = ctx.plant;
  const ControllerGains& g = ctx.gains;
  const int n = view.n;
  const bool initializing = !init_alpha_c.empty();

  ws.rho = ctx.rho_fn.value(t);
  ws.rho_dot = ctx.rho_fn.derivative(t);
  ws.sigma1 = ctx.sched.sigma1(t);
  ws.sigma2 = ctx.sched.sigma2(t);
  ws.eps = ctx.sched.eps(t);
  const double y_d = ctx.ref.y_d(t);
  const double y_d_dot = ctx.ref.y_d_dot(t);

  const double z1 = (x[0] - y_d) / ws.rho;
  if (!std::isfinite(z1)) return EvalStatus::NonFinite;
  if (std::abs(z1) >= 1.0 - ctx.guard_delta) return EvalStatus::FunnelViolation;
  ws.z[0] = z1;
  ws.lambda = 1.0 / (1.0 - z1 * z1);

  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    ws.kappa[ui] = (i == 0) ? ws.lambda / (view.gain_lower[0] * ws.rho)
                            : 1.0 / view.gain_lower[ui];
  }

  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (i > 0) {
      const std::size_t j = ui - 1;  // filter feeding this step
      const double ac = initializing ? init_alpha_c[j] : alpha_c[j];
      ws.z[ui] = x[ui] - ac;
      ws.w[j] = initializing ? 0.0 : ac - ws.alpha[j];
      ws.alpha_c_dot[j] =
          filter_rhs(ws.w[j], ws.kappa[j], gamma_hat[j], ws.sigma1, g.varsigma_w[j], ws.eps);
      ws.zeta[ui] = ws.z[ui] / 4.0 - ws.alpha_c_dot[j];
    } else {
      ws.zeta[0] = z1 / (4.0 * ws.rho) - y_d_dot - ws.rho_dot * z1;
    }

    const auto xbar = x.first(ui + 1);
    auto& phi = ws.phi[ui];
    view.regressor(i, xbar, phi);
    const double psi_state = view.psi1(i, xbar);
    const double psi_dyn = view.psi2(i, r);
    const double psi_hat = smoothed_envelope(ws.z[ui], psi_state, ws.eps) +
                           smoothed_envelope(ws.z[ui], psi_dyn, ws.eps);

    auto& Phi = ws.Phi[ui];
    std::size_t k = 0;
    if (i > 0) Phi[k++] = (ws.kappa[ui - 1] / ws.kappa[ui]) * ws.z[ui - 1];
    for (double v : phi) Phi[k++] = v;
    Phi[k++] = psi_hat;
    Phi[k++] = ws.z[ui] / 4.0;

    ws.varphi[ui] = smoothed_normalizer(ws.kappa[ui] * ws.z[ui], Phi, ws.eps);
    const double track_gain =
        (i == 0) ? g.varsigma_z[0] * ws.sigma1 * ws.rho : g.varsigma_z[ui] * ws.sigma1;
    ws.alpha_bar[ui] = track_gain * ws.z[ui] + ws.zeta[ui] + theta_hat[ui] * ws.varphi[ui];
    ws.alpha[ui] =
        saturated_law(ws.kappa[ui], ws.z[ui], ws.alpha_bar[ui], view.gain_lower[ui], ws.eps);
    if (initializing && i + 1 < n) init_alpha_c[ui] = ws.alpha[ui];
  }
  ws.u = ws.alpha[static_cast<std::size_t>(n) - 1];

  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double drive = ws.kappa[ui] * ws.z[ui] * ws.varphi[ui];  // >= 0 by construction
    ws.theta_hat_dot[ui] =
        g.iota_theta[ui] * drive - 2.0 * g.iota_theta[ui] * ws.sigma2 * theta_hat[ui];
  }
  for (int j = 0; j + 1 < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    ws.gamma_hat_dot[uj] = g.iota_gamma[uj] * std::abs(ws.w[uj]) -
                           2.0 * g.iota_gamma[uj] * ws.sigma2 * gamma_hat[uj];
  }
  if (view.dyn_signal) {
    const DynSignal& d = *view.dyn_signal;
    ws.r_dot = -d.c_bar * r + d.upsilon_bar(x[0]) + d.d;
  } else {
    ws.r_dot = 0.0;
  }

  if (!std::isfinite(ws.u) || !all_finite(ws.alpha) || !all_finite(ws.theta_hat_dot) ||
      !all_finite(ws.alpha_c_dot) || !all_finite(ws.gamma_hat_dot) || !std::isfinite(ws.r_dot)) {
    return EvalStatus::NonFinite;
  }
  return EvalStatus::Ok;
}

}  // namespace

EvalStatus controller_eval(const ControllerContext& ctx, double t, std::span<const double> x,
                           const ControllerStateView& state, StepWorkspace& ws) {
  return eval_impl(ctx, t, x, state.alpha_c, state.theta_hat, state.gamma_hat, state.r, ws, {});
}

std::optional<ControllerState> init_state(const ControllerContext& ctx,
                                          std::span<const double> x0,
                                          std::span<const double> theta_hat0,
                                          std::span<const double> gamma_hat0, double r0) {
  const int n = ctx.plant.n;
  ControllerState s;
  s.alpha_c.assign(static_cast<std::size_t>(n) - 1, 0.0);
  s.theta_hat.assign(theta_hat0.begin(), theta_hat0.end());
  s.gamma_hat.assign(gamma_hat0.begin(), gamma_hat0.end());
  s.r = r0;

  StepWorkspace ws;
  ws.configure(ctx.plant);
  const EvalStatus status =
      eval_impl(ctx, 0.0, x0, s.alpha_c, s.theta_hat, s.gamma_hat, s.r, ws,
                n > 1 ? std::span<double>(s.alpha_c) : std::span<double>());
  if (status != EvalStatus::Ok) return std::nullopt;
  return s;
}

}  // namespace dsc_ptc
