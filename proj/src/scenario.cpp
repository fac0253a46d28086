#include "plaque/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "plaque/errors.hpp"

namespace plaque::scenario {

using nlohmann::json;

namespace {

/// Reads the members of one JSON object and remembers which keys were used,
/// so leftovers can be reported as unknown.
class Section {
public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(where(key) + ": must be finite");
    }
  }

  void integer(const char* key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
      out = v->get<int>();
    }
  }

  void text(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  template <class Fn>
  void section(const char* key, Fn&& fn) {
    if (const json* v = take(key)) {
      Section sub(*v, where(key));
      fn(sub);
      sub.finish();
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(where(it.key().c_str()) + ": unknown key");
    }
  }

  std::string where(const char* key = nullptr) const {
    std::string p = path_;
    if (key != nullptr) p += (p.empty() ? "" : ".") + std::string(key);
    return p.empty() ? "scenario" : p;
  }

private:
  const json* take(const char* key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

template <class Enum>
Enum pick(const std::string& value, std::initializer_list<std::pair<const char*, Enum>> options,
          const std::string& where) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(where + ": '" + value + "' is not one of " + names);
}

const char* integrator_name(microflow::MicroIntegrator i) {
  return i == microflow::MicroIntegrator::exact_flow ? "exact" : "explicit_euler";
}

}  // namespace

const char* to_string(ModelKind m) { return m == ModelKind::ode ? "ode" : "pde"; }

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::serial: return "serial";
    case RunMode::parareal: return "parareal";
    case RunMode::reusage: return "reusage";
    case RunMode::heuristic: return "heuristic";
  }
  return "?";
}

RunMode parse_mode(std::string_view text) {
  return pick<RunMode>(std::string(text),
                       {{"serial", RunMode::serial},
                        {"parareal", RunMode::parareal},
                        {"reusage", RunMode::reusage},
                        {"heuristic", RunMode::heuristic}},
                       "mode");
}

parareal::Stopping parse_stopping(std::string_view text) {
  return pick<parareal::Stopping>(std::string(text),
                                  {{"fine", parareal::Stopping::fine}, {"coarse", parareal::Stopping::coarse}},
                                  "stopping");
}

void Scenario::validate() const {
  growth.validate();
  micro.validate();
  if (model == ModelKind::pde) grid.validate();
  if (!(initial_concentration >= 0.0)) throw ConfigError("growth.initial_concentration must be >= 0");
  const ScheduleConfig& s = schedule;
  if (!(s.eps_p > 0.0)) throw ConfigError("schedule.eps_p must be positive");
  if (!(s.eps_par > 0.0)) throw ConfigError("schedule.eps_par must be positive");
  if (s.max_iters < 1) throw ConfigError("schedule.max_iters must be >= 1");
  if (s.max_cycles < 2) throw ConfigError("schedule.max_cycles must be >= 2");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (!(solid.rho_s > 0.0) || !(solid.mu_s > 0.0) || !(solid.lambda_s >= 0.0)) {
    throw ConfigError("solid parameters must be positive (lambda_s >= 0)");
  }
  cost_model.validate();
  const twoscale::Schedule sched = make_schedule();
  if (mode != RunMode::serial && sched.processes < 2) {
    throw ConfigError("schedule.P must be >= 2 for parallel modes");
  }
  if (model == ModelKind::pde && grid.nx % 2 == 0) {
    throw ConfigError("grid.nx must be odd so the interface has a midpoint node");
  }
}

twoscale::Schedule Scenario::make_schedule() const {
  return twoscale::Schedule::from_days(schedule.t_end_days, schedule.dt_days,
                                       mode == RunMode::serial ? 1 : schedule.processes);
}

bool operator==(const Scenario& a, const Scenario& b) { return to_json(a) == to_json(b); }

Scenario from_json(const json& doc) {
  Scenario s;
  Section root(doc, "");
  root.text("name", s.name);
  std::string text;
  text = to_string(s.model);
  root.text("model", text);
  s.model = pick<ModelKind>(text, {{"ode", ModelKind::ode}, {"pde", ModelKind::pde}}, "model");
  text = to_string(s.mode);
  root.text("mode", text);
  s.mode = parse_mode(text);
  text = parareal::to_string(s.stopping);
  root.text("stopping", text);
  s.stopping = parse_stopping(text);
  root.integer("threads", s.threads);
  root.text("out_dir", s.out_dir);

  root.section("schedule", [&](Section& sec) {
    sec.number("T_end_days", s.schedule.t_end_days);
    sec.number("dt_days", s.schedule.dt_days);
    sec.integer("P", s.schedule.processes);
    sec.number("delta_tau", s.micro.delta_tau);
    sec.number("eps_p", s.schedule.eps_p);
    sec.number("eps_par", s.schedule.eps_par);
    sec.integer("max_iters", s.schedule.max_iters);
    sec.integer("max_cycles", s.schedule.max_cycles);
  });
  root.section("growth", [&](Section& sec) {
    sec.number("alpha", s.growth.alpha);
    sec.number("sigma0", s.growth.sigma0);
    sec.number("D_s", s.growth.diffusion);
    sec.number("R_s", s.growth.reaction);
    sec.number("theta", s.growth.theta);
    sec.integer("reaction_sign", s.growth.reaction_sign);
    sec.number("initial_concentration", s.initial_concentration);
  });
  root.section("micro", [&](Section& sec) {
    sec.number("rho_f", s.micro.rho_f);
    sec.number("nu_f", s.micro.nu_f);
    sec.number("lambda_relax", s.micro.lambda_relax);
    sec.number("c_geo", s.micro.c_geo);
    sec.number("inflow_amplitude", s.micro.inflow_amplitude);
    sec.number("inflow_offset", s.micro.inflow_offset);
    sec.number("period", s.micro.period);
    sec.number("h_min", s.micro.h_min);
    std::string integ = integrator_name(s.micro.integrator);
    sec.text("integrator", integ);
    s.micro.integrator = pick<microflow::MicroIntegrator>(
        integ, {{"exact", microflow::MicroIntegrator::exact_flow},
                {"explicit_euler", microflow::MicroIntegrator::explicit_euler}},
        sec.where("integrator"));
    std::string flow = s.initial_flow == InitialFlow::rest ? "rest" : "periodic";
    sec.text("initial_flow", flow);
    s.initial_flow = pick<InitialFlow>(flow, {{"rest", InitialFlow::rest}, {"periodic", InitialFlow::periodic}},
                                       sec.where("initial_flow"));
  });
  root.section("grid", [&](Section& sec) {
    sec.integer("nx", s.grid.nx);
    sec.integer("ny", s.grid.ny);
  });
  root.section("solid", [&](Section& sec) {
    sec.number("rho_s", s.solid.rho_s);
    sec.number("mu_s", s.solid.mu_s);
    sec.number("lambda_s", s.solid.lambda_s);
  });
  root.section("cost_model", [&](Section& sec) {
    sec.number("fsi_step_cost", s.cost_model.fsi_step_cost);
    sec.number("growth_solve_cost", s.cost_model.growth_solve_cost);
  });
  root.finish();
  s.validate();
  return s;
}

Scenario load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read scenario file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return from_json(doc);
}

json to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["model"] = to_string(s.model);
  j["mode"] = to_string(s.mode);
  j["stopping"] = parareal::to_string(s.stopping);
  j["threads"] = s.threads;
  j["out_dir"] = s.out_dir;
  j["schedule"] = {{"T_end_days", s.schedule.t_end_days}, {"dt_days", s.schedule.dt_days},
                   {"P", s.schedule.processes},            {"delta_tau", s.micro.delta_tau},
                   {"eps_p", s.schedule.eps_p},            {"eps_par", s.schedule.eps_par},
                   {"max_iters", s.schedule.max_iters},    {"max_cycles", s.schedule.max_cycles}};
  j["growth"] = {{"alpha", s.growth.alpha},
                 {"sigma0", s.growth.sigma0},
                 {"D_s", s.growth.diffusion},
                 {"R_s", s.growth.reaction},
                 {"theta", s.growth.theta},
                 {"reaction_sign", s.growth.reaction_sign},
                 {"initial_concentration", s.initial_concentration}};
  j["micro"] = {{"rho_f", s.micro.rho_f},
                {"nu_f", s.micro.nu_f},
                {"lambda_relax", s.micro.lambda_relax},
                {"c_geo", s.micro.c_geo},
                {"inflow_amplitude", s.micro.inflow_amplitude},
                {"inflow_offset", s.micro.inflow_offset},
                {"period", s.micro.period},
                {"h_min", s.micro.h_min},
                {"integrator", integrator_name(s.micro.integrator)},
                {"initial_flow", s.initial_flow == InitialFlow::rest ? "rest" : "periodic"}};
  j["grid"] = {{"nx", s.grid.nx}, {"ny", s.grid.ny}};
  j["solid"] = {{"rho_s", s.solid.rho_s}, {"mu_s", s.solid.mu_s}, {"lambda_s", s.solid.lambda_s}};
  j["cost_model"] = {{"fsi_step_cost", s.cost_model.fsi_step_cost},
                     {"growth_solve_cost", s.cost_model.growth_solve_cost}};
  return j;
}

std::vector<std::string> preset_names() { return {"ode_paper", "pde_paper"}; }

Scenario preset(std::string_view name) {
  Scenario s;
  s.name = std::string(name);
  if (name == "ode_paper") {
    s.model = ModelKind::ode;
    s.mode = RunMode::parareal;
    s.schedule = ScheduleConfig{300.0, 0.3, 10, 1e-3, 1e-3, 20, 10};
    s.growth.alpha = 5.0e-7;
    s.growth.sigma0 = 30.0;
    s.micro.inflow_offset = 0.0;
  } else if (name == "pde_paper") {
    s.model = ModelKind::pde;
    s.mode = RunMode::parareal;
    s.schedule = ScheduleConfig{200.0, 0.2, 10, 1e-3, 1e-4, 20, 10};
    s.growth.alpha = 5.0e-8;
    s.growth.sigma0 = 30.0;
    s.growth.diffusion = 1.2e-7;
    s.growth.reaction = 5.0e-7;
    s.growth.theta = 0.7;
    s.micro.inflow_offset = 1.0;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  s.validate();
  return s;
}

}  // namespace plaque::scenario
