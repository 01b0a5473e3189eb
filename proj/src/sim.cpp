#include "dsc_ptc/sim.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace dsc_ptc {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "Completed";
    case RunStatus::FunnelViolation: return "FunnelViolation";
    case RunStatus::NumericalBlowup: return "NumericalBlowup";
    case RunStatus::InitialFunnelViolation: return "InitialFunnelViolation";
  }
  return "Unknown";
}

namespace {

// Layout of the augmented state vector: [x, xi, alpha_c, theta_hat, gamma_hat, r].
struct Layout {
  int n, n0;
  std::size_t x, xi, ac, th, gh, r, size;

  Layout(int n_, int n0_) : n(n_), n0(n0_) {
    x = 0;
    xi = x + static_cast<std::size_t>(n);
    ac = xi + static_cast<std::size_t>(n0);
    th = ac + static_cast<std::size_t>(n - 1);
    gh = th + static_cast<std::size_t>(n);
    r = gh + static_cast<std::size_t>(n - 1);
    size = r + 1;
  }

  ControllerStateView state_view(std::span<const double> y) const {
    return ControllerStateView{y.subspan(ac, static_cast<std::size_t>(n - 1)),
                               y.subspan(th, static_cast<std::size_t>(n)),
                               y.subspan(gh, static_cast<std::size_t>(n - 1)), y[r]};
  }
};

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

struct StageResult {
  EvalStatus status = EvalStatus::Ok;
};

class Integrator {
 public:
  Integrator(const Scenario& sc, const ControllerContext& ctx)
      : sc_(sc), ctx_(ctx), layout_(sc.plant.n, sc.plant.n0) {
    ws_.configure(ctx.plant);
    y_.assign(layout_.size, 0.0);
    for (auto& k : k_) k.assign(layout_.size, 0.0);
    stage_.assign(layout_.size, 0.0);
  }

  RunOutcome integrate() {
    RunOutcome out;
    const SimConfig& cfg = sc_.sim;
    const int n = layout_.n;

    std::vector<double> th0 = sc_.init.theta_hat0;
    std::vector<double> gh0 = sc_.init.gamma_hat0;
    th0.resize(static_cast<std::size_t>(n), 0.0);
    gh0.resize(static_cast<std::size_t>(n - 1), 0.0);
    double r0 = sc_.init.r0;
    if (sc_.plant.dyn_signal && r0 == 0.0) r0 = sc_.plant.dyn_signal->r0;

    auto state0 = init_state(ctx_, sc_.init.x0, th0, gh0, r0);
    if (!state0) {
      out.status = RunStatus::InitialFunnelViolation;
      out.event_time = 0.0;
      return out;
    }

    // Pack the initial augmented state.
    for (int i = 0; i < n; ++i) y_[layout_.x + static_cast<std::size_t>(i)] = sc_.init.x0[static_cast<std::size_t>(i)];
    for (int i = 0; i < layout_.n0; ++i) y_[layout_.xi + static_cast<std::size_t>(i)] = sc_.init.xi0[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < n; ++i) y_[layout_.ac + static_cast<std::size_t>(i)] = state0->alpha_c[static_cast<std::size_t>(i)];
    for (int i = 0; i < n; ++i) y_[layout_.th + static_cast<std::size_t>(i)] = state0->theta_hat[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < n; ++i) y_[layout_.gh + static_cast<std::size_t>(i)] = state0->gamma_hat[static_cast<std::size_t>(i)];
    y_[layout_.r] = state0->r;

    const auto steps = static_cast<long>(std::llround(cfg.horizon / cfg.dt));
    out.records.reserve(static_cast<std::size_t>(steps / cfg.log_stride) + 2);

    for (long k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * cfg.dt;

      if (auto st = rhs(t, y_, k_[0]); st != EvalStatus::Ok) {
        finish(out, classify(st), t);
        return out;
      }
      if (k % cfg.log_stride == 0) log_record(out, t);

      if (auto st = stage(t + 0.5 * cfg.dt, 0.5 * cfg.dt, k_[0], k_[1]); st != EvalStatus::Ok) {
        finish(out, classify(st), t + 0.5 * cfg.dt);
        return out;
      }
      if (auto st = stage(t + 0.5 * cfg.dt, 0.5 * cfg.dt, k_[1], k_[2]); st != EvalStatus::Ok) {
        finish(out, classify(st), t + 0.5 * cfg.dt);
        return out;
      }
      if (auto st = stage(t + cfg.dt, cfg.dt, k_[2], k_[3]); st != EvalStatus::Ok) {
        finish(out, classify(st), t + cfg.dt);
        return out;
      }

      for (std::size_t j = 0; j < layout_.size; ++j) {
        y_[j] += cfg.dt / 6.0 * (k_[0][j] + 2.0 * k_[1][j] + 2.0 * k_[2][j] + k_[3][j]);
      }
      const double t_next = static_cast<double>(k + 1) * cfg.dt;
      if (!accepted_state_ok()) {
        finish(out, RunStatus::NumericalBlowup, t_next);
        return out;
      }
      check_gain_bounds(out, t_next);
    }

    // Final sample at the horizon.
    const double t_end = static_cast<double>(steps) * cfg.dt;
    if (auto st = rhs(t_end, y_, k_[0]); st != EvalStatus::Ok) {
      finish(out, classify(st), t_end);
      return out;
    }
    log_record(out, t_end);
    finish(out, RunStatus::Completed, t_end);
    return out;
  }

 private:
  static RunStatus classify(EvalStatus st) {
    return st == EvalStatus::FunnelViolation ? RunStatus::FunnelViolation
                                             : RunStatus::NumericalBlowup;
  }

  EvalStatus rhs(double t, std::span<const double> y, std::span<double> dy) {
    const auto sv = layout_.state_view(y);
    const auto x = y.subspan(layout_.x, static_cast<std::size_t>(layout_.n));
    const auto xi = y.subspan(layout_.xi, static_cast<std::size_t>(layout_.n0));
    if (auto st = controller_eval(ctx_, t, x, sv, ws_); st != EvalStatus::Ok) return st;
    plant_rhs(sc_.plant, t, x, xi, ws_.u, dy.subspan(layout_.x, static_cast<std::size_t>(layout_.n)),
              dy.subspan(layout_.xi, static_cast<std::size_t>(layout_.n0)));
    for (int i = 0; i + 1 < layout_.n; ++i) {
      dy[layout_.ac + static_cast<std::size_t>(i)] = ws_.alpha_c_dot[static_cast<std::size_t>(i)];
      dy[layout_.gh + static_cast<std::size_t>(i)] = ws_.gamma_hat_dot[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < layout_.n; ++i) {
      dy[layout_.th + static_cast<std::size_t>(i)] = ws_.theta_hat_dot[static_cast<std::size_t>(i)];
    }
    dy[layout_.r] = ws_.r_dot;
    return all_finite(dy) ? EvalStatus::Ok : EvalStatus::NonFinite;
  }

  EvalStatus stage(double t, double h, std::span<const double> slope, std::span<double> dy) {
    for (std::size_t j = 0; j < layout_.size; ++j) stage_[j] = y_[j] + h * slope[j];
    return rhs(t, stage_, dy);
  }

  // Builds one record from the current state and the stage-1 workspace.
  void log_record(RunOutcome& out, double t) {
    TrajectoryRecord rec;
    const int n = layout_.n;
    rec.t = t;
    rec.x.assign(y_.begin() + static_cast<long>(layout_.x),
                 y_.begin() + static_cast<long>(layout_.x) + n);
    rec.xi.assign(y_.begin() + static_cast<long>(layout_.xi),
                  y_.begin() + static_cast<long>(layout_.xi) + layout_.n0);
    rec.r = y_[layout_.r];
    rec.z.assign(ws_.z.begin(), ws_.z.end());
    rec.w.assign(ws_.w.begin(), ws_.w.end());
    rec.u = ws_.u;
    rec.alpha.assign(ws_.alpha.begin(), ws_.alpha.end() - 1);
    rec.alpha_c.assign(y_.begin() + static_cast<long>(layout_.ac),
                       y_.begin() + static_cast<long>(layout_.ac) + (n - 1));
    rec.theta_hat.assign(y_.begin() + static_cast<long>(layout_.th),
                         y_.begin() + static_cast<long>(layout_.th) + n);
    rec.gamma_hat.assign(y_.begin() + static_cast<long>(layout_.gh),
                         y_.begin() + static_cast<long>(layout_.gh) + (n - 1));
    rec.sigma1 = ws_.sigma1;
    rec.sigma2 = ws_.sigma2;
    rec.rho = ws_.rho;
    rec.e = rec.x[0] - sc_.reference.y_d(t);
    out.records.push_back(std::move(rec));
  }

  bool accepted_state_ok() const {
    for (double v : y_) {
      if (!std::isfinite(v) || std::abs(v) > sc_.sim.blowup_limit) return false;
    }
    return true;
  }

  void check_gain_bounds(RunOutcome& out, double t) {
    if (!out.gain_bounds_ok) return;
    const auto x = std::span<const double>(y_).subspan(layout_.x, static_cast<std::size_t>(layout_.n));
    for (int i = 0; i < layout_.n; ++i) {
      const double g = sc_.plant.true_gain(i, t, x);
      if (g < sc_.plant.gain_lower[static_cast<std::size_t>(i)] ||
          g > sc_.plant.gain_upper[static_cast<std::size_t>(i)]) {
        out.gain_bounds_ok = false;
        out.first_gain_violation_t = t;
        return;
      }
    }
  }

  void finish(RunOutcome& out, RunStatus status, double t) {
    out.status = status;
    out.event_time = t;
    if (!out.records.empty()) {
      out.metrics = summarize(out.records, ctx_.gains.T, status == RunStatus::Completed);
    }
  }

  const Scenario& sc_;
  const ControllerContext& ctx_;
  Layout layout_;
  StepWorkspace ws_;
  std::vector<double> y_;
  std::array<std::vector<double>, 4> k_;
  std::vector<double> stage_;
};

void validate_sim_config(const SimConfig& cfg, double T) {
  const auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(cfg.dt > 0.0, "sim: dt must be positive");
  require(cfg.horizon > 0.0, "sim: horizon must be positive");
  require(cfg.log_stride >= 1, "sim: log_stride must be >= 1");
  require(cfg.dt < T / 100.0, "sim: dt must be smaller than T/100");
  require(cfg.log_stride * cfg.dt <= 0.01 * cfg.horizon + 1e-15,
          "sim: log grid too coarse (log_stride * dt must not exceed horizon/100)");
  require(cfg.guard_delta > 0.0, "sim: guard_delta must be positive");
  require(cfg.blowup_limit > 0.0, "sim: blowup_limit must be positive");
}

}  // namespace

RunOutcome run(const Scenario& sc) {
  validate_sim_config(sc.sim, sc.gains.T);
  validate_gains(sc.gains, sc.plant.n);
  if (sc.init.x0.size() != static_cast<std::size_t>(sc.plant.n)) {
    throw std::invalid_argument("sim: x0 dimension mismatch");
  }
  if (sc.init.xi0.size() != static_cast<std::size_t>(sc.plant.n0)) {
    throw std::invalid_argument("sim: xi0 dimension mismatch");
  }
  const ControllerContext ctx =
      ControllerContext::make(controller_view(sc.plant), sc.gains, sc.reference, sc.sim.guard_delta);
  Integrator integ(sc, ctx);
  return integ.integrate();
}

std::optional<SweepParam> sweep_param_from_string(std::string_view name) {
  if (name == "sigma_bar") return SweepParam::SigmaBar;
  if (name == "rho_T" || name == "rhoT") return SweepParam::RhoT;
  if (name == "T") return SweepParam::PrescribedTime;
  if (name == "eps_decay") return SweepParam::EpsDecay;
  return std::nullopt;
}

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::SigmaBar: return "sigma_bar";
    case SweepParam::RhoT: return "rho_T";
    case SweepParam::PrescribedTime: return "T";
    case SweepParam::EpsDecay: return "eps_decay";
  }
  return "unknown";
}

namespace {

Scenario with_param(const Scenario& base, SweepParam param, double value) {
  Scenario sc = base;
  switch (param) {
    case SweepParam::SigmaBar:
      sc.gains.sigma_bar = value;
      break;
    case SweepParam::RhoT:
      sc.gains.rho.muT = value;
      break;
    case SweepParam::PrescribedTime:
      sc.gains.T = value;
      sc.gains.rho.T = value;
      break;
    case SweepParam::EpsDecay:
      sc.gains.eps.decay_rate = value;
      break;
  }
  return sc;
}

}  // namespace

std::vector<SweepResult> sweep(const Scenario& base, SweepParam param,
                               std::span<const double> values, int jobs) {
  std::vector<SweepResult> results(values.size());
  if (values.empty()) return results;

  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 0) jobs = 1;
  jobs = std::min<int>(jobs, static_cast<int>(values.size()));

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= values.size()) return;
      SweepResult& res = results[idx];
      res.value = values[idx];
      try {
        RunOutcome outcome = run(with_param(base, param, values[idx]));
        res.status = to_string(outcome.status);
        res.outcome = std::move(outcome);
      } catch (const std::exception& e) {
        res.status = std::string("Error: ") + e.what();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace dsc_ptc
