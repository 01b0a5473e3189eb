#include "dsc_ptc/scenario.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace dsc_ptc {

ScenarioConfig ScenarioConfig::defaults_for(const std::string& plant_name) {
  ScenarioConfig c;
  c.plant = plant_name;
  if (plant_name == "example1") {
    c.varsigma_z = {1.0};
    c.varsigma_w = {};
    c.iota_theta = {0.1};
    c.iota_gamma = {};
    c.sigma_bar = 100.0;
    c.T = 0.5;
    c.rho0 = 3.0;
    c.rhoT = 0.2;
    c.upsilon_rho = 1.0;
    c.upsilon_sigma = 0.4;
    c.eps_decay = 0.1;
    c.x0 = {2.0};
    c.xi0 = {};
    c.horizon = 10.0;
  } else if (plant_name == "example2") {
    c.varsigma_z = {5.0, 5.0};
    c.varsigma_w = {1.0};
    c.iota_theta = {0.05, 0.05};
    c.iota_gamma = {0.1};
    c.sigma_bar = 100.0;
    c.T = 0.5;
    c.rho0 = 0.5;
    c.rhoT = 0.02;
    c.upsilon_rho = 0.2;
    c.upsilon_sigma = 0.2;
    c.eps_decay = 0.3;
    c.x0 = {0.2, 0.1};
    c.xi0 = {0.1};
    c.horizon = 20.0;
  } else {
    throw ScenarioParseError("unknown plant '" + plant_name +
                             "' (expected example1 or example2)");
  }
  return c;
}

Scenario ScenarioConfig::build() const {
  auto [model, ref] = plant == "example1" ? builtin_example1() : builtin_example2();
  if (plant != "example1" && plant != "example2") {
    throw std::invalid_argument("unknown plant '" + plant + "'");
  }

  Scenario sc;
  sc.plant = std::move(model);
  sc.reference = std::move(ref);

  sc.gains.varsigma_z = varsigma_z;
  sc.gains.varsigma_w = varsigma_w;
  sc.gains.iota_theta = iota_theta;
  sc.gains.iota_gamma = iota_gamma;
  sc.gains.sigma_bar = sigma_bar;
  sc.gains.T = T;
  sc.gains.rho = PerfRateParams{rho0, rhoT, T, upsilon_rho};
  sc.gains.upsilon_sigma = upsilon_sigma;
  sc.gains.eps.decay_rate = eps_decay;
  sc.gains.eps.floor = eps_floor;

  sc.init.x0 = x0;
  sc.init.xi0 = xi0;
  sc.init.theta_hat0 = theta_hat0;
  sc.init.gamma_hat0 = gamma_hat0;
  sc.init.r0 = r0;

  sc.sim.dt = dt;
  sc.sim.horizon = horizon;
  sc.sim.log_stride = log_stride;
  sc.sim.guard_delta = guard_delta;
  sc.sim.blowup_limit = blowup_limit;
  return sc;
}

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& value, const std::string& key, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ScenarioParseError("line " + std::to_string(line) + ": field '" + key +
                             "': cannot parse '" + value + "' as a number");
  }
}

std::vector<double> parse_vector(const std::string& value, const std::string& key, int line) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string token = trim(item);
    if (token.empty()) {
      throw ScenarioParseError("line " + std::to_string(line) + ": field '" + key +
                               "': empty vector element");
    }
    out.push_back(parse_double(token, key, line));
  }
  return out;
}

bool parse_bool(const std::string& value, const std::string& key, int line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ScenarioParseError("line " + std::to_string(line) + ": field '" + key +
                           "': cannot parse '" + value + "' as a boolean");
}

}  // namespace

ScenarioConfig parse_scenario_text(std::string_view text, const std::string& origin) {
  std::map<std::string, RawEntry> entries;
  {
    std::istringstream is{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
      ++line;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      const std::string stripped = trim(raw);
      if (stripped.empty()) continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos) {
        throw ScenarioParseError(origin + ": line " + std::to_string(line) +
                                 ": expected 'key = value'");
      }
      const std::string key = trim(stripped.substr(0, eq));
      const std::string value = trim(stripped.substr(eq + 1));
      if (key.empty() || value.empty()) {
        throw ScenarioParseError(origin + ": line " + std::to_string(line) +
                                 ": expected 'key = value'");
      }
      if (entries.count(key)) {
        throw ScenarioParseError(origin + ": line " + std::to_string(line) + ": duplicate key '" +
                                 key + "'");
      }
      entries[key] = RawEntry{value, line};
    }
  }

  const auto plant_it = entries.find("plant.name");
  ScenarioConfig cfg =
      ScenarioConfig::defaults_for(plant_it != entries.end() ? plant_it->second.value : "example1");
  entries.erase("plant.name");

  const auto take = [&entries](const char* key) -> const RawEntry* {
    const auto it = entries.find(key);
    return it != entries.end() ? &it->second : nullptr;
  };
  const auto scalar = [&](const char* key, double& dst) {
    if (const RawEntry* e = take(key)) {
      dst = parse_double(e->value, key, e->line);
      entries.erase(key);
    }
  };
  const auto vector = [&](const char* key, std::vector<double>& dst) {
    if (const RawEntry* e = take(key)) {
      dst = parse_vector(e->value, key, e->line);
      entries.erase(key);
    }
  };

  vector("gains.varsigma_z", cfg.varsigma_z);
  vector("gains.varsigma_w", cfg.varsigma_w);
  vector("gains.iota_theta", cfg.iota_theta);
  vector("gains.iota_gamma", cfg.iota_gamma);
  scalar("gains.sigma_bar", cfg.sigma_bar);
  scalar("gains.T", cfg.T);
  scalar("gains.rho0", cfg.rho0);
  scalar("gains.rhoT", cfg.rhoT);
  scalar("gains.upsilon_rho", cfg.upsilon_rho);
  scalar("gains.upsilon_sigma", cfg.upsilon_sigma);
  scalar("gains.eps_decay", cfg.eps_decay);
  scalar("gains.eps_floor", cfg.eps_floor);

  vector("init.x0", cfg.x0);
  vector("init.xi0", cfg.xi0);
  vector("init.theta_hat0", cfg.theta_hat0);
  vector("init.gamma_hat0", cfg.gamma_hat0);
  scalar("init.r0", cfg.r0);

  scalar("sim.dt", cfg.dt);
  scalar("sim.horizon", cfg.horizon);
  if (const RawEntry* e = take("sim.log_stride")) {
    cfg.log_stride = static_cast<int>(parse_double(e->value, "sim.log_stride", e->line));
    entries.erase("sim.log_stride");
  }
  scalar("sim.guard_delta", cfg.guard_delta);
  scalar("sim.blowup_limit", cfg.blowup_limit);

  if (const RawEntry* e = take("outputs.dir")) {
    cfg.outputs.dir = e->value;
    entries.erase("outputs.dir");
  }
  if (const RawEntry* e = take("outputs.csv")) {
    cfg.outputs.csv = parse_bool(e->value, "outputs.csv", e->line);
    entries.erase("outputs.csv");
  }
  if (const RawEntry* e = take("outputs.metrics")) {
    cfg.outputs.metrics = parse_bool(e->value, "outputs.metrics", e->line);
    entries.erase("outputs.metrics");
  }

  if (!entries.empty()) {
    const auto& first = *entries.begin();
    throw ScenarioParseError(origin + ": line " + std::to_string(first.second.line) +
                             ": unknown key '" + first.first + "'");
  }
  return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path);
}

}  // namespace dsc_ptc
