#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plaque/costs.hpp"
#include "plaque/growth.hpp"
#include "plaque/microflow.hpp"
#include "plaque/parareal.hpp"

namespace plaque::scenario {

enum class ModelKind { ode, pde };
enum class RunMode { serial, parareal, reusage, heuristic };
enum class InitialFlow { rest, periodic };

/// Schedule as configured (days); dt is turned into N_l = T_end / dt.
struct ScheduleConfig {
  double t_end_days = 300.0;
  double dt_days = 0.3;
  int processes = 10;
  double eps_p = 1e-3;
  double eps_par = 1e-3;
  int max_iters = 20;
  int max_cycles = 10;
  bool operator==(const ScheduleConfig&) const = default;
};

/// Solid parameters. Kept for completeness of the model description; the
/// surrogate micro problem does not solve the solid equations.
struct SolidConfig {
  double rho_s = 1.0;  // g/cm^3
  double mu_s = 1.0e4;  // dyne/cm^2
  double lambda_s = 4.0e4;
  bool operator==(const SolidConfig&) const = default;
};

struct Scenario {
  std::string name = "custom";
  ModelKind model = ModelKind::ode;
  RunMode mode = RunMode::serial;
  parareal::Stopping stopping = parareal::Stopping::fine;
  int threads = 0;
  std::string out_dir = "out";
  ScheduleConfig schedule;
  growth::GrowthParams growth;
  double initial_concentration = 0.0;
  microflow::MicroParams micro;
  InitialFlow initial_flow = InitialFlow::rest;
  growth::StripGrid grid;
  SolidConfig solid;
  costs::CostModelParams cost_model;

  /// Cross-field validation; throws ConfigError.
  void validate() const;
  twoscale::Schedule make_schedule() const;
};

bool operator==(const Scenario& a, const Scenario& b);

const char* to_string(ModelKind m);
const char* to_string(RunMode m);
RunMode parse_mode(std::string_view text);
parareal::Stopping parse_stopping(std::string_view text);

/// Parse and validate; unknown keys and type mismatches are reported with
/// their key path (e.g. "micro.c_geo").
Scenario from_json(const nlohmann::json& doc);
Scenario load(const std::filesystem::path& file);
nlohmann::json to_json(const Scenario& s);

std::vector<std::string> preset_names();
/// "ode_paper" or "pde_paper"; throws ConfigError for other names.
Scenario preset(std::string_view name);

}  // namespace plaque::scenario
