#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dsc_ptc/metrics.hpp"
#include "dsc_ptc/scenario.hpp"
#include "dsc_ptc/sim.hpp"

using namespace dsc_ptc;

namespace {

Scenario example1_scenario() { return ScenarioConfig::defaults_for("example1").build(); }
Scenario example2_scenario() { return ScenarioConfig::defaults_for("example2").build(); }

/// A plant that stays pinned at the origin so only the dynamic-signal
/// channel evolves: x' = g u with zero regressor and y_d = 0.
Scenario quiescent_dyn_signal_scenario() {
  PlantModel m;
  m.n = 1;
  m.n0 = 0;
  m.gain_lower = {0.9};
  m.gain_upper = {1.1};
  m.regressor_dim = {1};
  m.regressor = [](int, std::span<const double>, std::span<double> out) { out[0] = 0.0; };
  m.psi1 = [](int, std::span<const double>) { return 0.0; };
  m.psi2 = [](int, double) { return 0.0; };
  DynSignal dyn;
  dyn.c_bar = 1.0;
  dyn.d = 0.625;
  dyn.r0 = 0.0;
  dyn.upsilon_bar = [](double x1) { return 2.5 * x1 * x1 * x1 * x1; };
  m.dyn_signal = dyn;
  m.true_gain = [](int, double, std::span<const double>) { return 1.0; };
  m.true_param_term = [](int, double, std::span<const double>) { return 0.0; };
  m.uncertainty = [](int, double, std::span<const double>, std::span<const double>) {
    return 0.0;
  };
  m.unmodeled_rhs = [](double, std::span<const double>, std::span<const double>,
                       std::span<double>) {};

  ReferenceSignal ref;
  ref.y_d = [](double) { return 0.0; };
  ref.y_d_dot = [](double) { return 0.0; };
  ref.y_d_ddot = [](double) { return 0.0; };

  Scenario sc;
  sc.plant = std::move(m);
  sc.reference = std::move(ref);
  sc.gains.varsigma_z = {1.0};
  sc.gains.iota_theta = {0.1};
  sc.gains.sigma_bar = 10.0;
  sc.gains.T = 0.5;
  sc.gains.rho = PerfRateParams{1.0, 0.1, 0.5, 1.0};
  sc.gains.upsilon_sigma = 1.0;
  sc.gains.eps.decay_rate = 0.1;
  sc.sim.horizon = 5.0;
  sc.init.x0 = {0.0};
  return sc;
}

}  // namespace

TEST_CASE("example 1 run completes inside the funnel") {
  Scenario sc = example1_scenario();
  const RunOutcome out = run(sc);
  REQUIRE(out.status == RunStatus::Completed);
  CHECK(out.metrics.max_funnel_ratio < 1.0);
  CHECK(out.metrics.e_at_T < 0.2);
  CHECK(out.gain_bounds_ok);
  CHECK(out.records.front().t == 0.0);
  CHECK(out.records.back().t == doctest::Approx(10.0));

  // estimates and dynamic signal stay nonnegative; control stays finite
  for (const auto& rec : out.records) {
    CHECK(rec.theta_hat[0] >= 0.0);
    CHECK(rec.r >= 0.0);
    CHECK(std::isfinite(rec.u));
    CHECK(std::abs(rec.z[0]) < 1.0);
  }
}

TEST_CASE("zero initial error stays at the equilibrium") {
  Scenario sc = example1_scenario();
  sc.init.x0 = {0.0};
  sc.sim.horizon = 2.0;
  const RunOutcome out = run(sc);
  REQUIRE(out.status == RunStatus::Completed);
  for (const auto& rec : out.records) {
    CHECK(std::abs(rec.e) <= 1e-8);
    CHECK(std::abs(rec.u) <= 1e-8);
  }
}

TEST_CASE("integration order: halving dt barely moves the trajectory") {
  Scenario sc = example2_scenario();
  sc.sim.horizon = 2.0;
  const RunOutcome coarse = run(sc);
  REQUIRE(coarse.status == RunStatus::Completed);

  sc.sim.dt = 5e-5;
  sc.sim.log_stride = 20;
  const RunOutcome fine = run(sc);
  REQUIRE(fine.status == RunStatus::Completed);
  REQUIRE(fine.records.size() == coarse.records.size());

  double max_e = 0.0, max_diff = 0.0;
  for (std::size_t k = 0; k < coarse.records.size(); ++k) {
    REQUIRE(coarse.records[k].t == doctest::Approx(fine.records[k].t).epsilon(1e-12));
    max_e = std::max(max_e, std::abs(coarse.records[k].e));
    max_diff = std::max(max_diff, std::abs(coarse.records[k].e - fine.records[k].e));
  }
  CHECK(max_diff <= 1e-6 * std::max(1.0, max_e));
}

TEST_CASE("energy is step-size robust over the default horizon") {
  Scenario sc = example2_scenario();
  sc.sim.horizon = 10.0;
  const RunOutcome coarse = run(sc);
  sc.sim.dt = 5e-5;
  sc.sim.log_stride = 20;
  const RunOutcome fine = run(sc);
  REQUIRE(coarse.status == RunStatus::Completed);
  REQUIRE(fine.status == RunStatus::Completed);
  CHECK(std::abs(coarse.metrics.energy - fine.metrics.energy) <=
        1e-3 * fine.metrics.energy);
}

TEST_CASE("reruns are bit-identical") {
  Scenario sc = example2_scenario();
  sc.sim.horizon = 2.0;
  const RunOutcome a = run(sc);
  const RunOutcome b = run(sc);
  REQUIRE(a.status == RunStatus::Completed);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].u == b.records[k].u);
    CHECK(a.records[k].x == b.records[k].x);
    CHECK(a.records[k].theta_hat == b.records[k].theta_hat);
  }
  CHECK(a.metrics.energy == b.metrics.energy);
}

TEST_CASE("example 2 keeps estimates and dynamic signal nonnegative") {
  Scenario sc = example2_scenario();
  sc.sim.horizon = 5.0;
  const RunOutcome out = run(sc);
  REQUIRE(out.status == RunStatus::Completed);
  for (const auto& rec : out.records) {
    CHECK(rec.theta_hat[0] >= 0.0);
    CHECK(rec.theta_hat[1] >= 0.0);
    CHECK(rec.gamma_hat[0] >= 0.0);
    CHECK(rec.r >= 0.0);
    CHECK(std::abs(rec.e) < rec.rho);
  }
  CHECK(out.gain_bounds_ok);
}

TEST_CASE("a violent state exits through the funnel guard mid-run") {
  Scenario sc = example2_scenario();
  sc.init.x0 = {0.2, 1e6};  // second state far from its virtual control
  const RunOutcome out = run(sc);
  CHECK(out.status == RunStatus::FunnelViolation);
  CHECK(out.event_time < 0.01);
  for (const auto& rec : out.records) CHECK(std::isfinite(rec.u));
}

TEST_CASE("escaping unmodeled dynamics end in a numerical blowup status") {
  Scenario sc = quiescent_dyn_signal_scenario();
  sc.plant.n0 = 1;
  sc.plant.unmodeled_rhs = [](double, std::span<const double> xi, std::span<const double>,
                              std::span<double> out) {
    out[0] = xi[0] * xi[0] + 1.0;  // finite-time escape
  };
  sc.init.xi0 = {1.0};
  const RunOutcome out = run(sc);  // must not throw
  CHECK(out.status == RunStatus::NumericalBlowup);
  CHECK(out.event_time > 0.0);
  for (const auto& rec : out.records) CHECK(std::isfinite(rec.xi[0]));
}

TEST_CASE("infeasible start reports an initial funnel violation") {
  Scenario sc = example1_scenario();
  sc.init.x0 = {3.5};
  const RunOutcome out = run(sc);
  CHECK(out.status == RunStatus::InitialFunnelViolation);
  CHECK(out.records.empty());
}

TEST_CASE("weak gains terminate cleanly, never with non-finite records") {
  Scenario sc = example2_scenario();
  sc.gains.varsigma_z = {0.01, 0.01};
  sc.gains.sigma_bar = 1.01;
  sc.gains.rho.mu0 = 0.7;
  sc.init.x0 = {0.6, 0.3};
  sc.init.xi0 = {0.3};
  sc.sim.horizon = 5.0;
  const RunOutcome out = run(sc);
  CHECK((out.status == RunStatus::Completed || out.status == RunStatus::FunnelViolation));
  for (const auto& rec : out.records) {
    CHECK(std::isfinite(rec.u));
    CHECK(std::isfinite(rec.x[0]));
    CHECK(std::isfinite(rec.x[1]));
    CHECK(std::abs(rec.e) < rec.rho);
  }
}

TEST_CASE("dynamic signal integrates to its closed form on a quiescent plant") {
  Scenario sc = quiescent_dyn_signal_scenario();
  const RunOutcome out = run(sc);
  REQUIRE(out.status == RunStatus::Completed);
  for (const auto& rec : out.records) {
    const double exact = 0.625 * (1.0 - std::exp(-rec.t));
    CHECK(std::abs(rec.r - exact) <= 1e-8);
  }
  const auto check = check_dynamic_signal(out.records, 1.0,
                                          sc.plant.dyn_signal->upsilon_bar, 0.625);
  CHECK(check.ok);
  CHECK(check.nonnegative);
}

TEST_CASE("config guards") {
  Scenario sc = example1_scenario();
  sc.sim.dt = 0.01;  // not below T/100
  CHECK_THROWS_AS(run(sc), std::invalid_argument);

  sc = example1_scenario();
  sc.sim.log_stride = 100000;  // log grid coarser than horizon/100
  CHECK_THROWS_AS(run(sc), std::invalid_argument);

  sc = example1_scenario();
  sc.init.x0 = {2.0, 1.0};  // dimension mismatch
  CHECK_THROWS_AS(run(sc), std::invalid_argument);
}

TEST_CASE("sweep runs values independently and in order") {
  Scenario sc = example1_scenario();
  sc.sim.horizon = 2.0;
  const double values[] = {20.0, 30.0, 50.0, 100.0};
  const auto results = sweep(sc, SweepParam::SigmaBar, values, 4);
  REQUIRE(results.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(results[k].value == values[k]);
    REQUIRE(results[k].outcome.has_value());
    CHECK(results[k].status == "Completed");
  }

  // deterministic across reruns
  const auto again = sweep(sc, SweepParam::SigmaBar, values, 2);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(again[k].outcome->metrics.energy == results[k].outcome->metrics.energy);
  }

  // empty list -> empty result
  CHECK(sweep(sc, SweepParam::SigmaBar, {}, 4).empty());
}

TEST_CASE("a failing sweep entry does not poison the others") {
  Scenario sc = example1_scenario();
  sc.sim.horizon = 2.0;
  const double values[] = {0.2, 5.0};  // 5.0 is not a valid funnel terminal value
  const auto results = sweep(sc, SweepParam::RhoT, values, 2);
  REQUIRE(results.size() == 2);
  CHECK(results[0].status == "Completed");
  REQUIRE(results[0].outcome.has_value());
  CHECK_FALSE(results[1].outcome.has_value());
  CHECK(results[1].status.find("Error:") == 0);
}
