#include "dsc_ptc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "dsc_ptc/controller.hpp"
#include "dsc_ptc/perf_rate.hpp"

namespace dsc_ptc {

MetricsSummary summarize(std::span<const TrajectoryRecord> records, double T, bool completed) {
  if (records.empty()) throw std::invalid_argument("summarize: empty trajectory");
  MetricsSummary m;
  m.completed = completed;
  m.theta_hat_max.assign(records[0].theta_hat.size(), 0.0);

  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& rec = records[k];
    if (k + 1 < records.size()) {
      const auto& next = records[k + 1];
      m.energy += 0.5 * (rec.u * rec.u + next.u * next.u) * (next.t - rec.t);
    }
    m.max_abs_u = std::max(m.max_abs_u, std::abs(rec.u));
    m.max_funnel_ratio = std::max(m.max_funnel_ratio, std::abs(rec.e) / rec.rho);
    for (std::size_t i = 0; i < m.theta_hat_max.size(); ++i) {
      m.theta_hat_max[i] = std::max(m.theta_hat_max[i], std::abs(rec.theta_hat[i]));
    }
  }

  // |e| at the prescribed time, interpolated between the bracketing records.
  if (T <= records.front().t) {
    m.e_at_T = std::abs(records.front().e);
  } else if (T >= records.back().t) {
    m.e_at_T = std::abs(records.back().e);
  } else {
    auto it = std::lower_bound(records.begin(), records.end(), T,
                               [](const TrajectoryRecord& r, double tt) { return r.t < tt; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (T - lo.t) / (hi.t - lo.t);
    m.e_at_T = std::abs(lo.e + f * (hi.e - lo.e));
  }

  const double t_last = records.back().t;
  const double window_start = t_last - 0.05 * t_last;
  double sum = 0.0;
  long count = 0;
  for (auto it = records.rbegin(); it != records.rend() && it->t >= window_start; ++it) {
    sum += std::abs(it->e);
    ++count;
  }
  m.final_error = count > 0 ? sum / static_cast<double>(count) : std::abs(records.back().e);
  return m;
}

ResidualBound residual_bound(double V0, double varsigma_bar, double sigma_bar, double T,
                             double chi_bar, double rho_T, std::span<const double> gain_lower) {
  ResidualBound b;
  const double decay = std::exp(-varsigma_bar * sigma_bar * T);
  b.Omega = decay * V0 + (chi_bar / sigma_bar) * (1.0 - decay);
  b.z1_bound = std::min(std::sqrt(1.0 - std::pow(10.0, -2.0 * gain_lower[0] * b.Omega)), rho_T);
  for (std::size_t i = 1; i < gain_lower.size(); ++i) {
    b.zi_bounds.push_back(std::sqrt(2.0 * gain_lower[i] * b.Omega));
  }
  return b;
}

namespace {

std::string format_tuple(const char* fmt, double a, double b, double c, double d) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

void record_sample(CheckReport& rep, double violation, const std::string& tuple) {
  if (violation > rep.max_violation || rep.samples == 0) {
    rep.max_violation = violation;
    rep.worst = tuple;
  }
  if (violation > rep.tolerance) ++rep.violations;
  ++rep.samples;
}

}  // namespace

CheckReport check_normalizer_bound(long samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "normalizer_bound";
  rep.max_violation = -1e300;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-10.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto eval = [&rep](double s, const double (&Theta)[4], const double (&Phi)[4],
                           double tau) {
    double dot = 0.0, pp = 0.0, th2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      dot += Theta[k] * Phi[k];
      pp += Phi[k] * Phi[k];
      th2 += Theta[k] * Theta[k];
    }
    const double vartheta = std::sqrt(th2);
    const double lhs = s * dot;
    const double rhs = vartheta * s * s * pp / std::sqrt(s * s * pp + tau * tau) + tau * vartheta;
    record_sample(rep, lhs - rhs,
                  format_tuple("s=%.17g tau=%.17g |Theta|=%.17g Phi.Phi=%.17g", s, tau, vartheta,
                               pp));
  };

  const double zeros[4] = {0.0, 0.0, 0.0, 0.0};
  double probe[4] = {1.0, -2.0, 3.0, -4.0};
  eval(0.0, probe, probe, 0.5);   // s = 0 edge
  eval(2.0, zeros, probe, 0.5);   // Theta = 0 edge
  for (long it = 0; it < samples; ++it) {
    double Theta[4], Phi[4];
    for (int k = 0; k < 4; ++k) {
      Theta[k] = sym(rng);
      Phi[k] = sym(rng);
    }
    const double s = sym(rng);
    const double tau = 1.0 - unit(rng);  // in (0, 1]
    eval(s, Theta, Phi, tau);
  }
  rep.ok = rep.violations == 0;
  return rep;
}

CheckReport check_log_barrier_bound(long samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "log_barrier_bound";
  rep.max_violation = -1e300;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> frac(-1.0, 1.0);

  const auto eval = [&rep](double k, double s) {
    const double gap = k * k - s * s;
    const double lhs = std::log(k * k / gap);
    const double rhs = s * s / gap;
    record_sample(rep, lhs - rhs, format_tuple("k=%.17g s=%.17g lhs=%.17g rhs=%.17g", k, s, lhs,
                                               rhs));
  };

  eval(1.0, 0.0);                      // equality at the origin
  eval(3.0, 3.0 * (1.0 - 1e-6));       // near the boundary, both sides large
  eval(3.0, -3.0 * (1.0 - 1e-6));
  for (long it = 0; it < samples; ++it) {
    const double k = 10.0 * (1.0 - unit(rng));  // (0, 10]
    const double s = k * (1.0 - 1e-6) * frac(rng);
    eval(k, s);
  }
  rep.ok = rep.violations == 0;
  return rep;
}

CheckReport check_smoothing(long samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "smoothed_envelope_slack";
  rep.max_violation = -1e300;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> zdist(-10.0, 10.0);
  std::uniform_real_distribution<double> pdist(0.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto eval = [&rep](double z, double psi, double eps) {
    const double lhs = std::abs(z) * psi - eps;
    const double rhs = z * smoothed_envelope(z, psi, eps);
    record_sample(rep, lhs - rhs, format_tuple("z=%.17g psi=%.17g eps=%.17g rhs=%.17g", z, psi,
                                               eps, rhs));
  };

  eval(0.0, 5.0, 0.5);  // envelope vanishes at z = 0
  eval(2.0, 0.0, 0.5);
  for (long it = 0; it < samples; ++it) {
    eval(zdist(rng), pdist(rng), 1.0 - unit(rng));
  }
  rep.ok = rep.violations == 0;
  return rep;
}

CheckReport check_perf_rate(long samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "perf_rate_properties";
  rep.max_violation = -1e300;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(0.05, 20.0);
  std::uniform_real_distribution<double> horizon(0.1, 10.0);
  std::uniform_real_distribution<double> shape(0.2, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const long draws = std::max<long>(10, samples / 100);
  for (long d = 0; d < draws; ++d) {
    double mu0 = level(rng), muT = level(rng);
    while (std::abs(mu0 - muT) < 0.05) muT = level(rng);
    const double T = horizon(rng);
    const double ups = shape(rng);
    const auto dir = mu0 > muT ? RateDirection::Decreasing : RateDirection::Increasing;
    PerfRateFn fn({mu0, muT, T, ups}, dir);
    const double sign = mu0 > muT ? 1.0 : -1.0;  // sign of mu0 - muT

    // Exact endpoints and frozen tail.
    record_sample(rep, std::abs(fn.value(0.0) - mu0), "endpoint t=0");
    record_sample(rep, std::abs(fn.value(T) - muT), "endpoint t=T");
    record_sample(rep, std::abs(fn.value(1.5 * T) - muT), "frozen tail");
    record_sample(rep, std::abs(fn.derivative(0.0)), "derivative at 0");
    record_sample(rep, std::abs(fn.derivative(1.5 * T)), "derivative after T");

    // Strict monotonicity on a sorted random grid (resolvably separated).
    double grid[20];
    for (double& g : grid) g = unit(rng) * T * (1.0 - 1e-4);
    std::sort(std::begin(grid), std::end(grid));
    double prev_t = 0.0, prev_v = fn.value(0.0);
    for (double g : grid) {
      if (g - prev_t < 1e-5 * T) continue;
      const double v = fn.value(g);
      // decreasing: v < prev strictly; flip sign for increasing
      record_sample(rep, sign * (v - prev_v),
                    format_tuple("monotone mu0=%.17g muT=%.17g T=%.17g t=%.17g", mu0, muT, T, g));
      prev_t = g;
      prev_v = v;
    }

    // Analytic derivative vs central finite difference.
    const double h = 1e-6 * T;
    for (int k = 0; k < 8; ++k) {
      const double t = 2.0 * h + unit(rng) * (T - 4.0 * h);
      const double fd = (fn.value(t + h) - fn.value(t - h)) / (2.0 * h);
      const double an = fn.derivative(t);
      const double tol = 1e-6 * std::max(1.0, std::abs(an));
      record_sample(rep, std::abs(an - fd) - tol + rep.tolerance,
                    format_tuple("fd mu0=%.17g muT=%.17g T=%.17g t=%.17g", mu0, muT, T, t));
    }

    // C1 junction: the slope must already be negligible just before T.
    const double junction = std::abs(fn.derivative(T - 1e-6));
    const double jtol = 1e-3 * std::abs(mu0 - muT) / T;
    record_sample(rep, junction - jtol + rep.tolerance, "c1 junction");
  }

  // sigma2 continuity at T and the eps integrability quadrature.
  for (int d = 0; d < 16; ++d) {
    const double sb = 1.0 + 99.0 * unit(rng) + 1e-3;
    const double T = horizon(rng);
    EpsSchedule eps;
    eps.decay_rate = 0.05 + 1.95 * unit(rng);
    GainSchedule sched(sb, shape(rng), T, eps);
    const double jump = std::abs(sched.sigma2(T - 1e-9) - sched.sigma2(T));
    record_sample(rep, jump - 1e-9 * sb + rep.tolerance, "sigma2 continuity");

    const double H = 10.0;
    const int N = 20000;  // Simpson
    double acc = eps.value(0.0) + eps.value(H);
    for (int k = 1; k < N; ++k) {
      acc += eps.value(H * k / N) * (k % 2 == 1 ? 4.0 : 2.0);
    }
    const double quad = acc * (H / N) / 3.0;
    const double closed = eps.integral_exponential(H);
    record_sample(rep, std::abs(quad - closed) / closed - 1e-6 + rep.tolerance,
                  "eps quadrature");
  }

  rep.ok = rep.violations == 0;
  return rep;
}

CheckReport check_dyn_signal_oracle() {
  CheckReport rep;
  rep.name = "dyn_signal_closed_form";
  rep.max_violation = -1e300;
  rep.tolerance = 1e-6;

  // r' = -c r + d: RK4 against the closed-form solution.
  const auto run_case = [&rep](double c, double d, double r0, const char* label) {
    const double dt = 1e-3;
    double r = r0;
    for (int k = 0; k <= 10000; ++k) {
      const double t = k * dt;
      const double exact = d / c + (r0 - d / c) * std::exp(-c * t);
      const double err = std::abs(r - exact) / std::max(1.0, std::abs(exact));
      record_sample(rep, err - 1e-6 + rep.tolerance, label);
      const auto f = [&](double rr) { return -c * rr + d; };
      const double k1 = f(r);
      const double k2 = f(r + 0.5 * dt * k1);
      const double k3 = f(r + 0.5 * dt * k2);
      const double k4 = f(r + dt * k3);
      r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  };
  run_case(1.0, 0.625, 0.0, "forced from rest");
  run_case(1.0, 0.0, 1.0, "pure decay");
  rep.ok = rep.violations == 0;
  return rep;
}

DynSignalCheck check_dynamic_signal(std::span<const TrajectoryRecord> records, double c_bar,
                                    const std::function<double(double)>& upsilon_bar, double d) {
  DynSignalCheck out;
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (records[k].r < 0.0) {
      out.nonnegative = false;
      out.ok = false;
      if (out.first_bad_t < 0.0) out.first_bad_t = records[k].t;
    }
    if (k + 1 == records.size()) break;
    const auto& a = records[k];
    const auto& b = records[k + 1];
    const double dt = b.t - a.t;
    if (dt <= 0.0) continue;
    const double slope = (b.r - a.r) / dt;
    const double r_mid = 0.5 * (a.r + b.r);
    const double x1_mid = 0.5 * (a.x[0] + b.x[0]);
    const double rhs = -c_bar * r_mid + upsilon_bar(x1_mid) + d;
    const double residual = std::abs(slope - rhs) / std::max(1.0, std::abs(rhs));
    out.max_residual = std::max(out.max_residual, residual);
    if (residual > 1e-3) {
      out.ok = false;
      if (out.first_bad_t < 0.0) out.first_bad_t = a.t;
    }
  }
  return out;
}

}  // namespace dsc_ptc
