#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsc_ptc/scenario.hpp"

namespace dsc_ptc::cli {

// Exit codes are part of the tool contract:
//   0  success (all runs Completed / all checks clean)
//   1  configuration or usage error
//   2  funnel violation (initial or during the run)
//   3  numerical blowup
//   4  property-check violation
struct SimulateArgs {
  std::string config_path;
  std::optional<double> sigma_bar;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::string> out_dir;
};

struct SweepArgs {
  std::string config_path;
  std::string param;  // sigma_bar | rho_T | T | eps_decay
  std::vector<double> values;
  int jobs = 0;  // <= 0: resolve from DSC_PTC_JOBS, then hardware concurrency
  std::optional<std::string> out_dir;
};

struct CheckArgs {
  long samples = 100000;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int run_check(const CheckArgs& args, std::ostream& out, std::ostream& err);

/// `simulate|sweep|check` front end; parses flags and dispatches.
int dispatch(int argc, const char* const* argv);

std::string csv_header(int n, int n0);
void write_trajectory_csv(const std::string& path, int n, int n0,
                          std::span<const TrajectoryRecord> records);
void write_metrics_json(const std::string& path, const RunOutcome& outcome, double sigma_bar,
                        double T, double dt, double horizon);

}  // namespace dsc_ptc::cli
