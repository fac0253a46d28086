#include "plaque/twoscale.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "plaque/errors.hpp"

namespace plaque::twoscale {

Schedule Schedule::from_days(double t_end_days, double dt_days, int processes) {
  if (!(t_end_days > 0.0) || !(dt_days > 0.0)) throw ConfigError("T_end and dt must be positive");
  const double n = t_end_days / dt_days;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * r) {
    throw ConfigError("dt must divide T_end into a whole number of steps");
  }
  Schedule s{t_end_days * seconds_per_day, static_cast<int>(r), processes};
  s.validate();
  return s;
}

void Schedule::validate() const {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("T_end must be positive");
  if (fine_steps < 1) throw ConfigError("number of fine steps must be >= 1");
  if (processes < 1) throw ConfigError("P must be >= 1");
  if (processes > fine_steps) {
    throw ConfigError("P = " + std::to_string(processes) + " exceeds the number of fine steps " +
                      std::to_string(fine_steps));
  }
}

int Schedule::interval_steps(int p) const {
  if (p < 1 || p > processes) throw DomainError("interval index out of range");
  const int base = fine_steps / processes;
  return base + (p <= fine_steps % processes ? 1 : 0);
}

int Schedule::interval_begin(int p) const {
  if (p < 1 || p > processes) throw DomainError("interval index out of range");
  const int base = fine_steps / processes;
  const int extra = fine_steps % processes;
  return (p - 1) * base + std::min(p - 1, extra);
}

const growth::GrowthModel& TwoScaleProblem::growth_model() const {
  if (model == nullptr) throw ConfigError("two-scale problem has no growth model");
  return *model;
}

void TwoScaleProblem::validate() const {
  growth_model();
  micro.validate();
  if (!(eps_p > 0.0)) throw ConfigError("eps_p must be positive");
  if (max_cycles < 2) throw ConfigError("max_cycles must be >= 2");
}

TrajectoryRow make_row(const growth::GrowthModel& model, const growth::MacroState& state,
                       const microflow::GrowthSample* sample) {
  TrajectoryRow row;
  row.t = state.t;
  row.value = model.functional(state);
  row.mean = model.mean_value(state);
  const std::vector<double> wall = model.wall_concentration(state);
  row.width = 2.0 * (1.0 - *std::max_element(wall.begin(), wall.end()));
  if (sample != nullptr) {
    row.gamma = sample->gamma_bar[sample->gamma_bar.size() / 2];
    row.cycles = sample->cycles_used;
  }
  return row;
}

void TrajectoryRecord::write_csv(std::ostream& out, const growth::GrowthModel& model) const {
  const bool field = model.name() == "pde";
  out << (field ? "t_days,c_mid,c_mean,gamma_bar,width,cycles\n" : "t_days,c_s,c_s_mean,gamma_bar,width,cycles\n");
  out.precision(12);
  for (const auto& r : rows) {
    out << r.t / seconds_per_day << ',' << r.value << ',' << r.mean << ',' << r.gamma << ',' << r.width << ','
        << r.cycles << '\n';
  }
}

StepResult macro_step(const TwoScaleProblem& problem, const growth::MacroState& state,
                      const microflow::MicroState& micro, double dt, const costs::LedgerScope& scope) {
  const auto& model = problem.growth_model();
  auto solved = microflow::solve_micro_problem(micro, state, model, problem.micro, problem.eps_p,
                                               problem.max_cycles, scope);
  growth::MacroState next = model.advance(state, solved.sample.gamma_bar, dt);
  scope.growth_solve();
  return StepResult{std::move(next), solved.state, std::move(solved.sample)};
}

TrajectoryRecord sweep(const TwoScaleProblem& problem, const growth::MacroState& start,
                       const microflow::MicroState& micro, double dt, int steps,
                       const costs::LedgerScope& scope) {
  const auto& model = problem.growth_model();
  TrajectoryRecord rec;
  rec.rows.reserve(static_cast<std::size_t>(steps) + 1);
  rec.gamma.reserve(static_cast<std::size_t>(steps));
  rec.rows.push_back(make_row(model, start, nullptr));
  growth::MacroState state = start;
  microflow::MicroState w = micro;
  for (int n = 0; n < steps; ++n) {
    StepResult step = macro_step(problem, state, w, dt, scope);
    rec.rows.push_back(make_row(model, step.state, &step.sample));
    rec.gamma.push_back(std::move(step.sample.gamma_bar));
    state = std::move(step.state);
    w = step.micro;
  }
  rec.final_state = std::move(state);
  rec.final_micro = w;
  return rec;
}

TrajectoryRecord run_serial(const TwoScaleProblem& problem, const Schedule& schedule,
                            const growth::MacroState& initial, const microflow::MicroState& micro,
                            costs::CostLedger* ledger) {
  problem.validate();
  schedule.validate();
  return sweep(problem, initial, micro, schedule.dt(), schedule.fine_steps,
               costs::LedgerScope{ledger, costs::Level::fine, 0});
}

StepResult run_coarse_step(const TwoScaleProblem& problem, const growth::MacroState& state,
                           const microflow::MicroState& micro, double dT, CoarseMode mode,
                           const costs::LedgerScope& scope) {
  if (!(dT > 0.0)) throw DomainError("coarse step needs dT > 0");
  if (mode == CoarseMode::two_scale) return macro_step(problem, state, micro, dT, scope);
  const auto& model = problem.growth_model();
  microflow::GrowthSample sample = microflow::solve_stationary_surrogate(state, model, problem.micro);
  growth::MacroState next = model.advance(state, sample.gamma_bar, dT);
  scope.growth_solve();
  return StepResult{std::move(next), micro, std::move(sample)};
}

growth::MacroState replay_growth(const growth::GrowthModel& model, const growth::MacroState& start,
                                 std::span<const std::vector<double>> gamma, double dt,
                                 const costs::LedgerScope& scope) {
  growth::MacroState state = start;
  for (const auto& g : gamma) {
    state = model.advance(state, g, dt);
    scope.growth_solve();
  }
  return state;
}

}  // namespace plaque::twoscale
