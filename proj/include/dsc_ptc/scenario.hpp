#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dsc_ptc/sim.hpp"

namespace dsc_ptc {

class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputOptions {
  std::string dir = "out";
  bool csv = true;
  bool metrics = true;
};

/// Flat key/value scenario description. Keys use dotted section prefixes
/// (plant., gains., init., sim., outputs.); vector values are comma
/// separated. Unknown keys are rejected with a line diagnostic. Built-in
/// plants come with their published parameter sets as defaults, so a config
/// only has to name the plant and override what differs.
struct ScenarioConfig {
  std::string plant = "example1";

  std::vector<double> varsigma_z, varsigma_w, iota_theta, iota_gamma;
  double sigma_bar = 100.0;
  double T = 0.5;
  double rho0 = 3.0, rhoT = 0.2;
  double upsilon_rho = 1.0, upsilon_sigma = 0.4;
  double eps_decay = 0.1, eps_floor = 1e-12;

  std::vector<double> x0, xi0, theta_hat0, gamma_hat0;
  double r0 = 0.0;

  double dt = 1e-4;
  double horizon = 10.0;
  int log_stride = 10;
  double guard_delta = 1e-9;
  double blowup_limit = 1e9;

  OutputOptions outputs;

  static ScenarioConfig defaults_for(const std::string& plant_name);

  /// Instantiates the plant and assembles a runnable Scenario.
  /// Throws std::invalid_argument on inconsistent values.
  Scenario build() const;
};

ScenarioConfig parse_scenario_text(std::string_view text, const std::string& origin);
ScenarioConfig parse_scenario_file(const std::string& path);

}  // namespace dsc_ptc
