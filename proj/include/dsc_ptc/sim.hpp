#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsc_ptc/controller.hpp"
#include "dsc_ptc/metrics.hpp"
#include "dsc_ptc/plant.hpp"
#include "dsc_ptc/trajectory.hpp"

namespace dsc_ptc {

/// Fixed-step integration settings. The step must resolve the prescribed-time
/// transient (dt < T/100) and the log grid must cover the horizon densely
/// (log_stride * dt <= horizon / 100); run() rejects configs violating either.
struct SimConfig {
  double dt = 1e-4;
  double horizon = 10.0;
  int log_stride = 10;
  double guard_delta = 1e-9;
  double blowup_limit = 1e9;
};

struct InitialConditions {
  std::vector<double> x0;
  std::vector<double> xi0;
  std::vector<double> theta_hat0;  // empty -> zeros
  std::vector<double> gamma_hat0;  // empty -> zeros
  double r0 = 0.0;
};

/// A complete closed-loop experiment definition.
struct Scenario {
  PlantModel plant;
  ReferenceSignal reference;
  ControllerGains gains;
  SimConfig sim;
  InitialConditions init;
};

enum class RunStatus { Completed, FunnelViolation, NumericalBlowup, InitialFunnelViolation };

const char* to_string(RunStatus s);

struct RunOutcome {
  RunStatus status = RunStatus::Completed;
  double event_time = 0.0;  // guard/blowup time when status != Completed
  std::vector<TrajectoryRecord> records;
  MetricsSummary metrics;
  // Diagnostic: the hidden gains stayed inside their declared envelope at
  // every accepted step. A false value means the scenario definition is
  // inconsistent, not that the run failed.
  bool gain_bounds_ok = true;
  double first_gain_violation_t = -1.0;
};

/// Integrates plant, unmodeled dynamics, filters, estimates, and dynamic
/// signal as one augmented ODE with classical RK4. Guards are evaluated on
/// every stage; a violating stage rejects the step and ends the run. The
/// result is deterministic: identical inputs give bit-identical records.
RunOutcome run(const Scenario& sc);

enum class SweepParam { SigmaBar, RhoT, PrescribedTime, EpsDecay };

std::optional<SweepParam> sweep_param_from_string(std::string_view name);
const char* to_string(SweepParam p);

struct SweepResult {
  double value = 0.0;
  std::string status;  // RunStatus name, or "Error: ..." for setup failures
  std::optional<RunOutcome> outcome;
};

/// Runs one independent simulation per value on a small worker pool
/// (jobs <= 0 picks the hardware concurrency). Failures are isolated per
/// run; results are returned in input order.
std::vector<SweepResult> sweep(const Scenario& base, SweepParam param,
                               std::span<const double> values, int jobs);

}  // namespace dsc_ptc
