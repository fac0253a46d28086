#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace plaque::costs {

/// Where a unit of work is attributed: the concurrent fine sweeps or the
/// serial coarse propagation on the master.
enum class Level { fine, coarse };

/// Parareal flavour, for the closed-form counts.
enum class Variant { standard, reusage, heuristic };

/// Synthetic unit costs. A micro problem costs `fsi_step_cost` per resolved
/// micro time step (N_s steps per cycle times the cycles used).
struct CostModelParams {
  double fsi_step_cost = 1.0;   // s per micro time step
  double growth_solve_cost = 0.01;  // s per growth-model (reaction-diffusion) solve

  /// Throws ConfigError on non-positive costs. Returns false when the
  /// micro/growth separation the cost model relies on does not hold.
  bool validate() const;
};

/// Plain copy of the ledger counters, taken after a run has completed.
struct LedgerSnapshot {
  int processes = 1;
  std::vector<std::int64_t> process_micro;
  std::vector<std::int64_t> process_growth;
  std::vector<std::int64_t> process_fsi_steps;
  std::int64_t coarse_micro = 0;
  std::int64_t coarse_growth = 0;
  std::int64_t coarse_fsi_steps = 0;
  std::int64_t messages_to_master = 0;
  std::int64_t messages_from_master = 0;
  std::int64_t messages_neighbor = 0;

  std::int64_t micro_fine() const;
  std::int64_t growth_fine() const;
  std::int64_t max_process_micro() const;
  std::int64_t max_process_growth() const;
  /// Micro problems on the critical path: the busiest process plus the master.
  std::int64_t serial_equivalent_micro() const { return max_process_micro() + coarse_micro; }
  std::int64_t serial_equivalent_growth() const { return max_process_growth() + coarse_growth; }
};

enum class Message { fine_to_master, master_to_fine, neighbor };

/// Work counters for one run. Increments are lock-free and commutative, so
/// concurrent fine sweeps may record into the same ledger.
class CostLedger {
public:
  explicit CostLedger(int processes = 1);

  CostLedger(const CostLedger&) = delete;
  CostLedger& operator=(const CostLedger&) = delete;

  int processes() const noexcept { return processes_; }

  /// One micro problem that resolved `fsi_steps` micro time steps.
  void record_micro(Level level, int process, std::int64_t fsi_steps);
  void record_growth_solve(Level level, int process);
  void record_messages(Message kind, std::int64_t count);

  LedgerSnapshot snapshot() const;

private:
  struct Slot {
    std::atomic<std::int64_t> micro{0};
    std::atomic<std::int64_t> growth{0};
    std::atomic<std::int64_t> fsi_steps{0};
  };

  Slot& slot(Level level, int process);

  int processes_;
  std::unique_ptr<Slot[]> fine_;
  Slot coarse_;
  std::atomic<std::int64_t> to_master_{0};
  std::atomic<std::int64_t> from_master_{0};
  std::atomic<std::int64_t> neighbor_{0};
};

/// Where the recording functions of one task should book their work.
struct LedgerScope {
  CostLedger* ledger = nullptr;
  Level level = Level::fine;
  int process = 0;

  void micro(std::int64_t fsi_steps) const {
    if (ledger != nullptr) ledger->record_micro(level, process, fsi_steps);
  }
  void growth_solve() const {
    if (ledger != nullptr) ledger->record_growth_solve(level, process);
  }
};

// Closed-form micro-problem counts in serial-equivalent units (fine work is
// counted once per process because it runs concurrently). All throw
// DomainError unless k >= 1 and 1 <= P <= N_l.

/// k ceil(N_l/P) + (k+1) P
std::int64_t count_standard(int k, int processes, int fine_steps);
/// k ceil(N_l/P) + P
std::int64_t count_reusage(int k, int processes, int fine_steps);
/// k ceil(N_l/P)
std::int64_t count_heuristic(int k, int processes, int fine_steps);
std::int64_t count(Variant variant, int k, int processes, int fine_steps);

/// Growth-model (reaction-diffusion) solves of the re-usage variant:
/// k (N_l + ceil(N_l/P)) + P.
std::int64_t count_rd_reusage(int k, int processes, int fine_steps);
/// Re-usage growth solves relative to the micro problems of standard parareal.
double rd_ratio(int k, int processes, int fine_steps);
/// sqrt(N_l)/2 + 1, an upper bound of rd_ratio for every k and P.
double rd_ratio_bound(int fine_steps);

struct SpeedupEfficiency {
  double speedup = 1.0;
  double efficiency = 1.0;  // fraction, speedup / P
};

/// Speedup N_l / count against the serial two-scale run, efficiency per process.
SpeedupEfficiency speedup_efficiency(std::int64_t micro_problems, int fine_steps, int processes);

/// Time on the master and on each fine process.
struct RuntimeBreakdown {
  double master = 0.0;
  std::vector<double> processes;
};

RuntimeBreakdown runtime_breakdown(const LedgerSnapshot& ledger, const CostModelParams& params);

/// Serial part plus the slowest process.
double estimate_parallel_runtime(const RuntimeBreakdown& breakdown);
double estimate_parallel_runtime(const LedgerSnapshot& ledger, const CostModelParams& params);

/// Continuous optimum of the cost formulas, rounded: sqrt(N_l) for standard,
/// sqrt(k N_l) for re-usage; N_l for the heuristic coarse propagator, whose
/// cost decreases monotonically in P.
int optimal_processes(int fine_steps, Variant variant, int k = 1);

/// Exhaustive minimiser of count(variant, k, P, N_l) over P = 1..N_l
/// (smallest P on ties).
int best_processes(int fine_steps, Variant variant, int k);

/// One column of a speedup table (one process count).
struct TableColumn {
  int processes = 1;
  std::vector<double> errors;  // per parareal iteration
  std::optional<int> iterations;
  std::optional<std::int64_t> micro_problems;
  std::optional<double> speedup;
  std::optional<double> efficiency;
  std::optional<double> estimated_runtime;
  std::string failure;  // non-empty when the column's run failed
  bool best_speedup = false;
  bool best_efficiency = false;
};

struct CostTable {
  std::string title;
  std::vector<TableColumn> columns;
  std::optional<double> reference_value;
  int reference_micro_problems = 0;
};

/// Sets the best_* markers (ties all marked).
void mark_best(CostTable& table);
std::string render_text(const CostTable& table);
std::string render_csv(const CostTable& table);

}  // namespace plaque::costs
