#include "dsc_ptc/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsc_ptc/metrics.hpp"

namespace dsc_ptc::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

int exit_code_for(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return 0;
    case RunStatus::FunnelViolation:
    case RunStatus::InitialFunnelViolation: return 2;
    case RunStatus::NumericalBlowup: return 3;
  }
  return 3;
}

ScenarioConfig load_config(const SimulateArgs& args) {
  ScenarioConfig cfg = parse_scenario_file(args.config_path);
  if (args.sigma_bar) cfg.sigma_bar = *args.sigma_bar;
  if (args.dt) cfg.dt = *args.dt;
  if (args.horizon) cfg.horizon = *args.horizon;
  if (args.out_dir) cfg.outputs.dir = *args.out_dir;
  return cfg;
}

void write_outputs(const ScenarioConfig& cfg, const RunOutcome& outcome, const std::string& dir) {
  fs::create_directories(dir);
  const auto [n, n0] = std::pair<int, int>{static_cast<int>(cfg.x0.size()),
                                           static_cast<int>(cfg.xi0.size())};
  if (cfg.outputs.csv && !outcome.records.empty()) {
    write_trajectory_csv((fs::path(dir) / "trajectory.csv").string(), n, n0, outcome.records);
  }
  if (cfg.outputs.metrics) {
    write_metrics_json((fs::path(dir) / "metrics.json").string(), outcome, cfg.sigma_bar, cfg.T,
                       cfg.dt, cfg.horizon);
  }
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DSC_PTC_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // sweep() falls back to hardware concurrency
}

}  // namespace

std::string csv_header(int n, int n0) {
  std::string h = "t";
  for (int i = 1; i <= n; ++i) h += ",x" + std::to_string(i);
  for (int i = 1; i <= n0; ++i) h += ",xi" + std::to_string(i);
  h += ",r";
  for (int i = 1; i <= n; ++i) h += ",z" + std::to_string(i);
  for (int i = 1; i < n; ++i) h += ",w" + std::to_string(i);
  h += ",u";
  for (int i = 1; i < n; ++i) h += ",alpha" + std::to_string(i);
  for (int i = 1; i < n; ++i) h += ",alpha_c" + std::to_string(i);
  h += ",sigma1,sigma2,rho,e";
  for (int i = 1; i <= n; ++i) h += ",theta_hat" + std::to_string(i);
  for (int i = 1; i < n; ++i) h += ",gamma_hat" + std::to_string(i);
  return h;
}

void write_trajectory_csv(const std::string& path, int n, int n0,
                          std::span<const TrajectoryRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << csv_header(n, n0) << "\n";
  std::string row;
  for (const auto& rec : records) {
    row.clear();
    row += fmt17(rec.t);
    const auto append = [&row](std::span<const double> v) {
      for (double x : v) {
        row += ',';
        row += fmt17(x);
      }
    };
    append(rec.x);
    append(rec.xi);
    row += ',';
    row += fmt17(rec.r);
    append(rec.z);
    append(rec.w);
    row += ',';
    row += fmt17(rec.u);
    append(rec.alpha);
    append(rec.alpha_c);
    row += ',';
    row += fmt17(rec.sigma1);
    row += ',';
    row += fmt17(rec.sigma2);
    row += ',';
    row += fmt17(rec.rho);
    row += ',';
    row += fmt17(rec.e);
    append(rec.theta_hat);
    append(rec.gamma_hat);
    row += '\n';
    out << row;
  }
}

void write_metrics_json(const std::string& path, const RunOutcome& outcome, double sigma_bar,
                        double T, double dt, double horizon) {
  ordered_json j;
  j["status"] = to_string(outcome.status);
  j["energy"] = outcome.metrics.energy;
  j["e_at_T"] = outcome.metrics.e_at_T;
  j["max_funnel_ratio"] = outcome.metrics.max_funnel_ratio;
  j["final_error"] = outcome.metrics.final_error;
  j["max_abs_u"] = outcome.metrics.max_abs_u;
  j["sigma_bar"] = sigma_bar;
  j["T"] = T;
  j["dt"] = dt;
  j["horizon"] = horizon;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

int run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  Scenario sc;
  try {
    cfg = load_config(args);
    sc = cfg.build();
    for (const auto& warning : validate_gains(sc.gains, sc.plant.n)) {
      err << "warning: " << warning << "\n";
    }
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }

  RunOutcome outcome;
  try {
    outcome = run(sc);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    write_outputs(cfg, outcome, cfg.outputs.dir);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return 1;
  }

  out << "status=" << to_string(outcome.status);
  if (outcome.status != RunStatus::Completed) out << " t=" << outcome.event_time;
  if (!outcome.records.empty()) {
    out << " energy=" << outcome.metrics.energy << " e_at_T=" << outcome.metrics.e_at_T
        << " max_funnel_ratio=" << outcome.metrics.max_funnel_ratio;
  }
  out << "\n";
  return exit_code_for(outcome.status);
}

int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  Scenario base;
  std::optional<SweepParam> param;
  try {
    cfg = parse_scenario_file(args.config_path);
    if (args.out_dir) cfg.outputs.dir = *args.out_dir;
    base = cfg.build();
    param = sweep_param_from_string(args.param);
    if (!param) {
      throw std::invalid_argument("unknown sweep parameter '" + args.param +
                                  "' (expected sigma_bar, rho_T, T, or eps_decay)");
    }
    if (args.values.empty()) throw std::invalid_argument("sweep requires at least one value");
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }

  const auto results = sweep(base, *param, args.values, resolve_jobs(args.jobs));

  ordered_json summary;
  summary["param"] = to_string(*param);
  summary["values"] = args.values;
  summary["runs"] = ordered_json::array();
  bool all_completed = true;

  try {
    fs::create_directories(cfg.outputs.dir);
    for (const auto& res : results) {
      char tag[64];
      std::snprintf(tag, sizeof(tag), "%s_%g", to_string(*param), res.value);
      ordered_json entry;
      entry["value"] = res.value;
      entry["status"] = res.status;
      if (res.outcome) {
        ScenarioConfig run_cfg = cfg;
        switch (*param) {
          case SweepParam::SigmaBar: run_cfg.sigma_bar = res.value; break;
          case SweepParam::RhoT: run_cfg.rhoT = res.value; break;
          case SweepParam::PrescribedTime: run_cfg.T = res.value; break;
          case SweepParam::EpsDecay: run_cfg.eps_decay = res.value; break;
        }
        const std::string run_dir = (fs::path(cfg.outputs.dir) / tag).string();
        write_outputs(run_cfg, *res.outcome, run_dir);
        if (!res.outcome->records.empty()) {
          entry["energy"] = res.outcome->metrics.energy;
          entry["e_at_T"] = res.outcome->metrics.e_at_T;
          entry["max_abs_u"] = res.outcome->metrics.max_abs_u;
        }
        if (res.outcome->status != RunStatus::Completed) all_completed = false;
      } else {
        all_completed = false;
      }
      summary["runs"].push_back(std::move(entry));
    }
    std::ofstream sf(fs::path(cfg.outputs.dir) / "sweep_summary.json", std::ios::binary);
    sf << summary.dump(2) << "\n";
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return 1;
  }

  out << summary.dump(2) << "\n";
  return all_completed ? 0 : 2;
}

int run_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
  if (args.samples <= 0) {
    err << "config error: --samples must be positive\n";
    return 1;
  }

  std::vector<CheckReport> reports;
  reports.push_back(check_normalizer_bound(args.samples, args.seed));
  reports.push_back(check_log_barrier_bound(args.samples, args.seed + 1));
  reports.push_back(check_smoothing(args.samples, args.seed + 2));
  reports.push_back(check_perf_rate(args.samples, args.seed + 3));
  reports.push_back(check_dyn_signal_oracle());

  ordered_json j;
  j["samples"] = args.samples;
  j["seed"] = args.seed;
  j["checks"] = ordered_json::array();
  bool ok = true;
  for (const auto& rep : reports) {
    ordered_json entry;
    entry["name"] = rep.name;
    entry["samples"] = rep.samples;
    entry["violations"] = rep.violations;
    entry["max_violation"] = rep.max_violation;
    entry["ok"] = rep.ok;
    if (!rep.ok) entry["counterexample"] = rep.worst;
    j["checks"].push_back(std::move(entry));
    ok = ok && rep.ok;
  }
  j["ok"] = ok;
  out << j.dump(2) << "\n";

  if (!ok) {
    for (const auto& rep : reports) {
      if (!rep.ok) {
        err << "violation in " << rep.name << ": " << rep.worst << "\n";
        break;
      }
    }
    return 4;
  }
  return 0;
}

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Prescribed-time adaptive dynamic-surface control testbench"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Run one closed-loop scenario");
  sim_cmd->add_option("--config", sim_args.config_path, "Scenario config file")->required();
  double sigma_bar = 0, dt = 0, horizon = 0;
  std::string out_dir;
  auto* sb_opt = sim_cmd->add_option("--sigma-bar", sigma_bar, "Override gains.sigma_bar");
  auto* dt_opt = sim_cmd->add_option("--dt", dt, "Override sim.dt");
  auto* hz_opt = sim_cmd->add_option("--horizon", horizon, "Override sim.horizon");
  auto* out_opt = sim_cmd->add_option("--out", out_dir, "Override outputs.dir");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one scenario over a parameter list");
  sweep_cmd->add_option("--config", sweep_args.config_path, "Scenario config file")->required();
  sweep_cmd->add_option("--param", sweep_args.param, "sigma_bar | rho_T | T | eps_decay")
      ->required();
  sweep_cmd->add_option("--values", sweep_args.values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--jobs", sweep_args.jobs, "Worker count (default: DSC_PTC_JOBS or cores)");
  std::string sweep_out;
  auto* sweep_out_opt = sweep_cmd->add_option("--out", sweep_out, "Override outputs.dir");

  CheckArgs check_args;
  auto* check_cmd = app.add_subcommand("check", "Run the property/inequality checkers");
  check_cmd->add_option("--samples", check_args.samples, "Random samples per checker");
  check_cmd->add_option("--seed", check_args.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (sim_cmd->parsed()) {
    if (*sb_opt) sim_args.sigma_bar = sigma_bar;
    if (*dt_opt) sim_args.dt = dt;
    if (*hz_opt) sim_args.horizon = horizon;
    if (*out_opt) sim_args.out_dir = out_dir;
    return run_simulate(sim_args, std::cout, std::cerr);
  }
  if (sweep_cmd->parsed()) {
    if (*sweep_out_opt) sweep_args.out_dir = sweep_out;
    return run_sweep(sweep_args, std::cout, std::cerr);
  }
  return run_check(check_args, std::cout, std::cerr);
}

}  // namespace dsc_ptc::cli
