#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dsc_ptc/metrics.hpp"

using namespace dsc_ptc;

namespace {

std::vector<TrajectoryRecord> ramp_records(int count, double dt,
                                           double (*u_of_t)(double),
                                           double (*e_of_t)(double)) {
  std::vector<TrajectoryRecord> recs(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    auto& r = recs[static_cast<std::size_t>(k)];
    r.t = k * dt;
    r.u = u_of_t(r.t);
    r.e = e_of_t(r.t);
    r.rho = 1.0;
    r.x = {r.e};
    r.theta_hat = {0.0};
  }
  return recs;
}

}  // namespace

TEST_CASE("summary of trivial control signals") {
  auto zeros = ramp_records(101, 0.1, [](double) { return 0.0; }, [](double) { return 0.0; });
  auto m = summarize(zeros, 0.5, true);
  CHECK(m.energy == 0.0);
  CHECK(m.max_abs_u == 0.0);
  CHECK(m.completed);

  auto ones = ramp_records(101, 0.1, [](double) { return 1.0; }, [](double) { return 0.0; });
  m = summarize(ones, 0.5, true);
  CHECK(m.energy == doctest::Approx(10.0).epsilon(1e-12));

  CHECK_THROWS_AS(summarize({}, 0.5, true), std::invalid_argument);
}

TEST_CASE("error at the deadline is interpolated") {
  auto recs = ramp_records(101, 0.1, [](double) { return 0.0; }, [](double t) { return t; });
  auto m = summarize(recs, 0.25, true);
  CHECK(m.e_at_T == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(m.max_funnel_ratio == doctest::Approx(10.0).epsilon(1e-12));

  // deadline beyond the records: clamp to the last sample
  m = summarize(recs, 50.0, true);
  CHECK(m.e_at_T == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("energy is monotone under pointwise domination") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> draw(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto big = ramp_records(50, 0.05, [](double) { return 0.0; }, [](double) { return 0.0; });
    auto small = big;
    for (std::size_t k = 0; k < big.size(); ++k) {
      big[k].u = draw(rng);
      small[k].u = 0.5 * big[k].u;
    }
    CHECK(summarize(small, 1.0, true).energy <= summarize(big, 1.0, true).energy + 1e-15);
  }
}

TEST_CASE("residual bound calculator") {
  const double gl1[] = {1.0};
  auto b = residual_bound(0.0, 1.0, 100.0, 0.5, 0.0, 0.2, gl1);
  CHECK(b.Omega == 0.0);
  CHECK(b.z1_bound == 0.0);
  CHECK(b.zi_bounds.empty());

  auto b2 = residual_bound(1.0, 1.0, 100.0, 0.5, 10.0, 0.2, gl1);
  CHECK(b2.Omega == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(b2.z1_bound == doctest::Approx(0.2).epsilon(1e-12));  // clamped at rho_T

  const double gl2[] = {1.0, 2.0};
  auto b3 = residual_bound(1.0, 1.0, 100.0, 0.5, 10.0, 0.2, gl2);
  REQUIRE(b3.zi_bounds.size() == 1);
  CHECK(b3.zi_bounds[0] == doctest::Approx(std::sqrt(2.0 * 2.0 * b3.Omega)).epsilon(1e-12));

  // larger sigma_bar shrinks the residual set; larger chi_bar grows it
  double prev = 1e300;
  for (double sb : {5.0, 10.0, 50.0, 100.0, 500.0}) {
    const double om = residual_bound(1.0, 1.0, sb, 0.5, 10.0, 0.2, gl1).Omega;
    CHECK(om < prev);
    prev = om;
  }
  prev = -1.0;
  for (double chi : {0.0, 1.0, 5.0, 20.0}) {
    const double om = residual_bound(1.0, 1.0, 50.0, 0.5, chi, 0.2, gl1).Omega;
    CHECK(om > prev);
    prev = om;
  }
}

TEST_CASE("sampled inequality checkers are clean at 1e5 samples") {
  const auto l4 = check_normalizer_bound(100000, 7);
  CHECK(l4.ok);
  CHECK(l4.violations == 0);
  CHECK(l4.max_violation <= 1e-12);

  const auto l5 = check_log_barrier_bound(100000, 7);
  CHECK(l5.ok);
  CHECK(l5.violations == 0);

  const auto sm = check_smoothing(100000, 7);
  CHECK(sm.ok);
  CHECK(sm.violations == 0);

  const auto pr = check_perf_rate(100000, 7);
  CHECK(pr.ok);
  CHECK(pr.violations == 0);

  // fixed seed, fixed result
  const auto l4b = check_normalizer_bound(100000, 7);
  CHECK(l4b.max_violation == l4.max_violation);
  CHECK(l4b.worst == l4.worst);
}

TEST_CASE("dynamic signal oracle and trajectory checker") {
  CHECK(check_dyn_signal_oracle().ok);

  // closed-form records r = 0.625 (1 - e^-t), x1 = 0
  std::vector<TrajectoryRecord> recs(2001);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    recs[k].t = static_cast<double>(k) * 1e-3;
    recs[k].r = 0.625 * (1.0 - std::exp(-recs[k].t));
    recs[k].x = {0.0};
  }
  const auto ups = [](double) { return 0.0; };
  auto chk = check_dynamic_signal(recs, 1.0, ups, 0.625);
  CHECK(chk.ok);
  CHECK(chk.nonnegative);
  CHECK(chk.max_residual <= 1e-3);

  // pure decay from r0 = 1
  for (std::size_t k = 0; k < recs.size(); ++k) recs[k].r = std::exp(-recs[k].t);
  chk = check_dynamic_signal(recs, 1.0, ups, 0.0);
  CHECK(chk.ok);

  // a corrupted sample is flagged
  recs[1000].r += 0.05;
  chk = check_dynamic_signal(recs, 1.0, ups, 0.0);
  CHECK_FALSE(chk.ok);
  CHECK(chk.first_bad_t >= 0.0);
}
