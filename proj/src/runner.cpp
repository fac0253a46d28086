#include "plaque/runner.hpp"

#include <chrono>
#include <fstream>

#include "plaque/errors.hpp"

namespace plaque::runner {

using nlohmann::json;

std::unique_ptr<growth::GrowthModel> make_model(const scenario::Scenario& s) {
  if (s.model == scenario::ModelKind::ode) {
    return std::make_unique<growth::OdeGrowthModel>(s.growth, s.initial_concentration);
  }
  return std::make_unique<growth::PdeGrowthModel>(s.growth, s.grid);
}

microflow::MicroState initial_micro(const scenario::Scenario& s) {
  return s.initial_flow == scenario::InitialFlow::rest ? microflow::MicroState::rest()
                                                       : microflow::periodic_start(s.micro);
}

parareal::Mode to_parareal_mode(scenario::RunMode mode) {
  switch (mode) {
    case scenario::RunMode::parareal: return parareal::Mode::standard;
    case scenario::RunMode::reusage: return parareal::Mode::reusage;
    case scenario::RunMode::heuristic: return parareal::Mode::heuristic_coarse;
    case scenario::RunMode::serial: break;
  }
  throw ConfigError("serial mode has no parareal variant");
}

namespace {

costs::Variant to_variant(scenario::RunMode mode) {
  switch (mode) {
    case scenario::RunMode::reusage: return costs::Variant::reusage;
    case scenario::RunMode::heuristic: return costs::Variant::heuristic;
    default: return costs::Variant::standard;
  }
}

twoscale::TwoScaleProblem make_problem(const scenario::Scenario& s, const growth::GrowthModel& model) {
  return twoscale::TwoScaleProblem{&model, s.micro, s.schedule.eps_p, s.schedule.max_cycles};
}

}  // namespace

twoscale::TrajectoryRecord reference_trajectory(const scenario::Scenario& s) {
  s.validate();
  const auto model = make_model(s);
  const auto problem = make_problem(s, *model);
  twoscale::Schedule sched = s.make_schedule();
  sched.processes = 1;
  return twoscale::run_serial(problem, sched, model->initial_state(), initial_micro(s));
}

Outcome execute(const scenario::Scenario& s, const twoscale::TrajectoryRecord* reference) {
  s.validate();
  const auto started = std::chrono::steady_clock::now();
  const auto model = make_model(s);
  const auto problem = make_problem(s, *model);
  const twoscale::Schedule sched = s.make_schedule();
  const int N = sched.fine_steps;
  const int P = sched.processes;

  Outcome out;
  json& r = out.report;
  r["model"] = scenario::to_string(s.model);
  r["mode"] = scenario::to_string(s.mode);
  r["P"] = P;
  r["N_l"] = N;

  costs::LedgerSnapshot ledger;
  std::vector<double> coarse_errors;
  std::vector<double> fine_errors;
  std::vector<double> changes;
  int k_par = 0;

  if (s.mode == scenario::RunMode::serial) {
    costs::CostLedger book(1);
    out.trajectory = twoscale::run_serial(problem, sched, model->initial_state(), initial_micro(s), &book);
    ledger = book.snapshot();
    r["stopping"] = nullptr;
    r["termination"] = "serial";
    r["warm_start"] = "previous_step";
    r["final_value"] = out.trajectory.rows.back().value;
    r["reference_value"] = out.trajectory.rows.back().value;
  } else {
    parareal::Options opt;
    opt.mode = to_parareal_mode(s.mode);
    opt.stopping = s.stopping;
    opt.eps_par = s.schedule.eps_par;
    opt.max_iters = s.schedule.max_iters;
    opt.threads = s.threads;
    twoscale::TrajectoryRecord own;
    if (reference == nullptr) {
      own = reference_trajectory(s);
      reference = &own;
    }
    parareal::Report rep = parareal::run(problem, sched, opt, model->initial_state(), initial_micro(s), reference);
    ledger = rep.ledger;
    k_par = rep.iterations;
    for (const auto& h : rep.history) {
      coarse_errors.push_back(h.coarse_error);
      fine_errors.push_back(h.fine_error);
      changes.push_back(s.stopping == parareal::Stopping::fine ? h.fine_change : h.coarse_change);
    }
    out.trajectory = std::move(rep.trajectory);
    r["stopping"] = parareal::to_string(s.stopping);
    r["termination"] = rep.termination;
    r["warm_start"] = s.mode == scenario::RunMode::reusage ? "neighbor_interval" : "same_process";
    r["final_value"] = model->functional(rep.coarse_values.back());
    r["reference_value"] = rep.reference_value;
  }

  const std::int64_t micro_fine = ledger.max_process_micro();
  const std::int64_t micro_total = ledger.serial_equivalent_micro();
  const std::int64_t rd_total = ledger.serial_equivalent_growth();
  const auto se = costs::speedup_efficiency(micro_total, N, P);
  const double runtime = costs::estimate_parallel_runtime(ledger, s.cost_model);
  const auto breakdown = costs::runtime_breakdown(ledger, s.cost_model);

  r["k_par"] = k_par;
  r["per_iteration_errors"] = coarse_errors;
  r["per_iteration_fine_errors"] = fine_errors;
  r["per_iteration_changes"] = changes;
  r["micro_problems_fine"] = micro_fine;
  r["micro_problems_fine_total"] = ledger.micro_fine();
  r["micro_problems_coarse"] = ledger.coarse_micro;
  r["micro_problems"] = micro_total;
  r["per_process_micro"] = ledger.process_micro;
  r["rd_solves_fine"] = ledger.max_process_growth();
  r["rd_solves_fine_total"] = ledger.growth_fine();
  r["rd_solves_coarse"] = ledger.coarse_growth;
  r["rd_solves"] = rd_total;
  r["messages"] = {{"fine_to_master", ledger.messages_to_master},
                   {"master_to_fine", ledger.messages_from_master},
                   {"neighbor", ledger.messages_neighbor}};
  r["speedup"] = se.speedup;
  r["efficiency"] = se.efficiency;
  r["estimated_runtime"] = runtime;
  r["runtime_master"] = breakdown.master;
  r["runtime_process_max"] = runtime - breakdown.master;
  if (s.mode != scenario::RunMode::serial) {
    const auto variant = to_variant(s.mode);
    r["formula_micro_problems"] = costs::count(variant, k_par, P, N);
    if (s.mode == scenario::RunMode::reusage) {
      r["rd_ratio"] = static_cast<double>(rd_total) / static_cast<double>(costs::count_standard(k_par, P, N));
      r["rd_ratio_bound"] = costs::rd_ratio_bound(N);
    }
  }
  r["final_error"] = std::abs(r["final_value"].get<double>() - r["reference_value"].get<double>());

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  r["metadata"] = {{"wall_clock_seconds", wall}, {"threads", s.threads}};

  costs::TableColumn& col = out.column;
  col.processes = P;
  col.errors = coarse_errors;
  col.iterations = k_par;
  col.micro_problems = micro_total;
  col.speedup = se.speedup;
  col.efficiency = se.efficiency;
  col.estimated_runtime = runtime;
  return out;
}

void write_outputs(const scenario::Scenario& s, const Outcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto model = make_model(s);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("trajectory.csv");
    outcome.trajectory.write_csv(f, *model);
  }
  {
    auto f = open("report.json");
    f << outcome.report.dump(2) << '\n';
  }
  costs::CostTable table;
  table.title = std::string(scenario::to_string(s.mode)) + " (" + scenario::to_string(s.model) + ")";
  table.columns.push_back(outcome.column);
  table.reference_value = outcome.report.at("reference_value").get<double>();
  table.reference_micro_problems = outcome.report.at("N_l").get<int>();
  costs::mark_best(table);
  {
    auto f = open("table.txt");
    f << costs::render_text(table);
  }
  {
    auto f = open("table.csv");
    f << costs::render_csv(table);
  }
  if (s.model == scenario::ModelKind::pde) {
    const auto& field = outcome.trajectory.final_state.field();
    auto f = open("field.csv");
    growth::write_field_csv(f, field);
    auto g = open("interface.csv");
    growth::write_interface_csv(g, field);
  }
}

costs::CostTable sweep(const scenario::Scenario& s, const std::vector<int>& processes) {
  if (processes.empty()) throw ConfigError("sweep needs at least one process count");
  if (s.mode == scenario::RunMode::serial) throw ConfigError("sweep needs a parallel mode");
  const twoscale::TrajectoryRecord reference = reference_trajectory(s);
  costs::CostTable table;
  table.title = std::string(scenario::to_string(s.mode)) + " (" + scenario::to_string(s.model) +
                ", stopping " + parareal::to_string(s.stopping) + ")";
  table.reference_value = reference.rows.back().value;
  table.reference_micro_problems = static_cast<int>(reference.rows.size()) - 1;
  for (int P : processes) {
    scenario::Scenario run = s;
    run.schedule.processes = P;
    try {
      table.columns.push_back(execute(run, &reference).column);
    } catch (const Error& e) {
      costs::TableColumn col;
      col.processes = P;
      col.failure = e.what();
      table.columns.push_back(std::move(col));
    }
  }
  costs::mark_best(table);
  return table;
}

costs::CostTable formula_table(costs::Variant variant, int fine_steps, const std::vector<int>& processes,
                               const std::vector<int>& iterations) {
  if (processes.empty()) throw ConfigError("sweep needs at least one process count");
  if (processes.size() != iterations.size()) {
    throw ConfigError("formula sweep needs one iteration count per process count");
  }
  costs::CostTable table;
  table.title = "closed-form counts";
  table.reference_micro_problems = fine_steps;
  for (std::size_t i = 0; i < processes.size(); ++i) {
    costs::TableColumn col;
    col.processes = processes[i];
    col.iterations = iterations[i];
    col.micro_problems = costs::count(variant, iterations[i], processes[i], fine_steps);
    const auto se = costs::speedup_efficiency(*col.micro_problems, fine_steps, processes[i]);
    col.speedup = se.speedup;
    col.efficiency = se.efficiency;
    table.columns.push_back(std::move(col));
  }
  costs::mark_best(table);
  return table;
}

}  // namespace plaque::runner
