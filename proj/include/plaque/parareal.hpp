#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plaque/costs.hpp"
#include "plaque/twoscale.hpp"

namespace plaque::parareal {

enum class Mode { standard, reusage, heuristic_coarse };
enum class Stopping { fine, coarse };

const char* to_string(Mode mode);
const char* to_string(Stopping stopping);

struct Options {
  Mode mode = Mode::standard;
  Stopping stopping = Stopping::fine;
  double eps_par = 1e-3;
  int max_iters = 20;
  int threads = 0;  // 0: hardware concurrency
  bool keep_iterates = false;
};

/// Runs fn(0..n-1) on up to `threads` workers. Each index is executed exactly
/// once; if several fail, the exception of the lowest index is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Iterate data at the coarse points T_0..T_P.
struct PararealState {
  int k = 0;
  std::vector<growth::MacroState> coarse;       // cbar^(k)(T_p), p = 0..P
  std::vector<growth::MacroState> fine_end;     // F(cbar^(k-1)(T_{p-1})), index p = 1..P (0 unused)
  std::vector<growth::MacroState> coarse_prop;  // C(cbar^(k)(T_{p-1})), index p = 1..P (0 unused);
                                                // not used by re-usage
  std::vector<microflow::MicroState> warm;      // warm start of the fine sweep on interval p (index p)
  std::vector<microflow::MicroState> fine_micro_end;  // micro state at the end of interval p
  std::vector<std::vector<std::vector<double>>> stored_gamma;  // per interval, per fine step
};

struct IterationRecord {
  int k = 0;
  double coarse_value = 0.0;   // functional of cbar^(k)(T_end)
  double fine_value = 0.0;     // functional of the fine endpoint of iteration k
  double coarse_error = 0.0;   // vs the serial reference
  double fine_error = 0.0;
  double coarse_change = 0.0;  // |cbar^(k) - cbar^(k-1)| at T_end
  double fine_change = 0.0;    // |c^(k) - c^(k-1)| at T_end; for k = 1 against cbar^(0)
};

struct Report {
  Mode mode = Mode::standard;
  Stopping stopping = Stopping::fine;
  int processes = 1;
  int fine_steps = 1;
  int iterations = 0;  // k_par
  std::string termination;
  std::vector<IterationRecord> history;
  costs::LedgerSnapshot ledger;
  /// Fine trajectory of the last iteration, intervals concatenated.
  twoscale::TrajectoryRecord trajectory;
  std::vector<growth::MacroState> coarse_values;  // final cbar(T_p)
  /// coarse iterate after every iteration (iterates[k][p]) when keep_iterates is set.
  std::vector<std::vector<growth::MacroState>> iterates;
  double reference_value = 0.0;
};

/// Coordinator of one parareal run. Fine sweeps of one iteration run
/// concurrently; everything they write goes to per-interval slots, so the
/// outcome does not depend on scheduling.
class Engine {
public:
  Engine(const twoscale::TwoScaleProblem& problem, const twoscale::Schedule& schedule, Options options,
         costs::CostLedger& ledger);

  /// Coarse sweep from (initial, micro): P two-scale coarse steps, or
  /// stationary steps for the heuristic coarse propagator.
  void initialize(const growth::MacroState& initial, const microflow::MicroState& micro);

  /// One iteration: fine sweeps on all intervals, then the serial coarse update
  /// (predictor-corrector for standard/heuristic, replay of the stored growth
  /// values on the fine grid for re-usage).
  void iterate();

  const PararealState& state() const { return state_; }
  /// Fine trajectory assembled from the most recent sweeps.
  twoscale::TrajectoryRecord fine_trajectory() const;

private:
  void fine_sweeps();
  void coarse_standard();
  void coarse_reusage();

  const twoscale::TwoScaleProblem& problem_;
  twoscale::Schedule schedule_;
  Options options_;
  costs::CostLedger& ledger_;
  growth::MacroState initial_;
  microflow::MicroState initial_micro_;
  PararealState state_;
  std::vector<twoscale::TrajectoryRecord> sweeps_;
};

/// Full run with stopping criterion; errors are measured against `reference`
/// (computed by run_serial when null). Stops when the criterion holds or when
/// k = P, where the iterate coincides with the serial solution. Throws
/// NonConvergence after max_iters iterations.
Report run(const twoscale::TwoScaleProblem& problem, const twoscale::Schedule& schedule, const Options& options,
           const growth::MacroState& initial, const microflow::MicroState& micro,
           const twoscale::TrajectoryRecord* reference = nullptr);

}  // namespace plaque::parareal
