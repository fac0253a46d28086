#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "plaque/costs.hpp"
#include "plaque/growth.hpp"
#include "plaque/microflow.hpp"

namespace plaque::twoscale {

inline constexpr double seconds_per_day = 86400.0;

/// Macro time grids. The fine grid has N_l steps of dt = T_end / N_l; the
/// coarse grid splits it into P intervals. When P does not divide N_l the
/// first N_l mod P intervals get one extra fine step, so every interval has
/// ceil(N_l/P) or floor(N_l/P) steps and T_p always lies on the fine grid.
struct Schedule {
  double t_end = 300.0 * seconds_per_day;  // s
  int fine_steps = 1000;
  int processes = 1;

  /// Build from days; N_l = T_end / dt must be (close to) an integer.
  static Schedule from_days(double t_end_days, double dt_days, int processes = 1);

  void validate() const;
  double dt() const { return t_end / fine_steps; }
  int interval_steps(int p) const;  // p = 1..P
  int interval_begin(int p) const;  // fine index of T_{p-1}
  int interval_end(int p) const { return interval_begin(p) + interval_steps(p); }
  double coarse_dt(int p) const { return interval_steps(p) * dt(); }
  int max_interval_steps() const { return (fine_steps + processes - 1) / processes; }
};

/// Everything a macro step needs besides the states.
struct TwoScaleProblem {
  const growth::GrowthModel* model = nullptr;
  microflow::MicroParams micro;
  double eps_p = 1e-3;
  int max_cycles = 10;

  const growth::GrowthModel& growth_model() const;
  void validate() const;
};

struct TrajectoryRow {
  double t = 0.0;      // s
  double value = 0.0;  // c_s, or the interface midpoint value
  double mean = 0.0;   // c_s, or the interface mean
  double gamma = 0.0;  // gamma_bar at the functional's wall point (0 on the initial row)
  double width = 0.0;  // channel width 2h (narrowest point for the field model)
  int cycles = 0;
};

/// Rows for t_0..t_N (initial state included) plus the growth values of every step.
struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
  std::vector<std::vector<double>> gamma;  // gamma[n-1] used for the step t_{n-1} -> t_n
  growth::MacroState final_state;
  microflow::MicroState final_micro;

  /// Trajectory CSV: t_days,value,mean,gamma_bar,width,cycles (value/mean are
  /// named c_s or c_mid/c_mean depending on the model).
  void write_csv(std::ostream& out, const growth::GrowthModel& model) const;
};

TrajectoryRow make_row(const growth::GrowthModel& model, const growth::MacroState& state,
                       const microflow::GrowthSample* sample);

struct StepResult {
  growth::MacroState state;
  microflow::MicroState micro;
  microflow::GrowthSample sample;
};

/// One two-scale macro step: a warm-started micro problem, then a growth update.
StepResult macro_step(const TwoScaleProblem& problem, const growth::MacroState& state,
                      const microflow::MicroState& micro, double dt, const costs::LedgerScope& scope = {});

/// `steps` consecutive macro steps of size dt (a fine sweep).
TrajectoryRecord sweep(const TwoScaleProblem& problem, const growth::MacroState& start,
                       const microflow::MicroState& micro, double dt, int steps,
                       const costs::LedgerScope& scope = {});

/// The serial two-scale algorithm over the whole schedule; N_l micro problems.
TrajectoryRecord run_serial(const TwoScaleProblem& problem, const Schedule& schedule,
                            const growth::MacroState& initial, const microflow::MicroState& micro,
                            costs::CostLedger* ledger = nullptr);

enum class CoarseMode { two_scale, heuristic };

/// One coarse step of size dT: a micro problem (two_scale) or the stationary
/// surrogate (heuristic, micro state passed through unchanged).
StepResult run_coarse_step(const TwoScaleProblem& problem, const growth::MacroState& state,
                           const microflow::MicroState& micro, double dT, CoarseMode mode,
                           const costs::LedgerScope& scope = {});

/// Advance with previously computed growth values, one growth solve per entry.
growth::MacroState replay_growth(const growth::GrowthModel& model, const growth::MacroState& start,
                                 std::span<const std::vector<double>> gamma, double dt,
                                 const costs::LedgerScope& scope = {});

}  // namespace plaque::twoscale
