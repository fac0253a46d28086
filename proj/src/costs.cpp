#include "plaque/costs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "plaque/errors.hpp"

namespace plaque::costs {
namespace {

void check_counts(int k, int processes, int fine_steps) {
  if (k < 1) throw DomainError("iteration count must be >= 1");
  if (fine_steps < 1) throw DomainError("number of fine steps must be >= 1");
  if (processes < 1 || processes > fine_steps) {
    throw DomainError("process count must satisfy 1 <= P <= N_l");
  }
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t max_of(const std::vector<std::int64_t>& v) {
  return v.empty() ? 0 : *std::max_element(v.begin(), v.end());
}

std::string format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

}  // namespace

bool CostModelParams::validate() const {
  if (!(fsi_step_cost > 0.0) || !(growth_solve_cost > 0.0)) {
    throw ConfigError("cost model unit costs must be positive");
  }
  // One micro problem resolves at least 2 cycles of >= 1 step; growth solves
  // must be much cheaper than that for the micro-count model to be meaningful.
  return growth_solve_cost < 0.1 * fsi_step_cost;
}

std::int64_t LedgerSnapshot::micro_fine() const {
  return std::accumulate(process_micro.begin(), process_micro.end(), std::int64_t{0});
}

std::int64_t LedgerSnapshot::growth_fine() const {
  return std::accumulate(process_growth.begin(), process_growth.end(), std::int64_t{0});
}

std::int64_t LedgerSnapshot::max_process_micro() const { return max_of(process_micro); }
std::int64_t LedgerSnapshot::max_process_growth() const { return max_of(process_growth); }

CostLedger::CostLedger(int processes)
    : processes_(processes), fine_(std::make_unique<Slot[]>(static_cast<std::size_t>(
                                 std::max(processes, 1)))) {
  if (processes < 1) throw DomainError("ledger needs at least one process");
}

CostLedger::Slot& CostLedger::slot(Level level, int process) {
  if (level == Level::coarse) return coarse_;
  if (process < 0 || process >= processes_) {
    throw DomainError("ledger process index out of range");
  }
  return fine_[static_cast<std::size_t>(process)];
}

void CostLedger::record_micro(Level level, int process, std::int64_t fsi_steps) {
  Slot& s = slot(level, process);
  s.micro.fetch_add(1, std::memory_order_relaxed);
  s.fsi_steps.fetch_add(fsi_steps, std::memory_order_relaxed);
}

void CostLedger::record_growth_solve(Level level, int process) {
  slot(level, process).growth.fetch_add(1, std::memory_order_relaxed);
}

void CostLedger::record_messages(Message kind, std::int64_t count) {
  switch (kind) {
    case Message::fine_to_master: to_master_.fetch_add(count, std::memory_order_relaxed); break;
    case Message::master_to_fine: from_master_.fetch_add(count, std::memory_order_relaxed); break;
    case Message::neighbor: neighbor_.fetch_add(count, std::memory_order_relaxed); break;
  }
}

LedgerSnapshot CostLedger::snapshot() const {
  LedgerSnapshot s;
  s.processes = processes_;
  for (int p = 0; p < processes_; ++p) {
    const Slot& f = fine_[static_cast<std::size_t>(p)];
    s.process_micro.push_back(f.micro.load());
    s.process_growth.push_back(f.growth.load());
    s.process_fsi_steps.push_back(f.fsi_steps.load());
  }
  s.coarse_micro = coarse_.micro.load();
  s.coarse_growth = coarse_.growth.load();
  s.coarse_fsi_steps = coarse_.fsi_steps.load();
  s.messages_to_master = to_master_.load();
  s.messages_from_master = from_master_.load();
  s.messages_neighbor = neighbor_.load();
  return s;
}

std::int64_t count_standard(int k, int processes, int fine_steps) {
  check_counts(k, processes, fine_steps);
  return k * ceil_div(fine_steps, processes) + std::int64_t{k + 1} * processes;
}

std::int64_t count_reusage(int k, int processes, int fine_steps) {
  check_counts(k, processes, fine_steps);
  return k * ceil_div(fine_steps, processes) + processes;
}

std::int64_t count_heuristic(int k, int processes, int fine_steps) {
  check_counts(k, processes, fine_steps);
  return k * ceil_div(fine_steps, processes);
}

std::int64_t count(Variant variant, int k, int processes, int fine_steps) {
  switch (variant) {
    case Variant::standard: return count_standard(k, processes, fine_steps);
    case Variant::reusage: return count_reusage(k, processes, fine_steps);
    case Variant::heuristic: return count_heuristic(k, processes, fine_steps);
  }
  throw DomainError("unknown parareal variant");
}

std::int64_t count_rd_reusage(int k, int processes, int fine_steps) {
  check_counts(k, processes, fine_steps);
  return k * (fine_steps + ceil_div(fine_steps, processes)) + processes;
}

double rd_ratio(int k, int processes, int fine_steps) {
  return static_cast<double>(count_rd_reusage(k, processes, fine_steps)) /
         static_cast<double>(count_standard(k, processes, fine_steps));
}

double rd_ratio_bound(int fine_steps) {
  if (fine_steps < 1) throw DomainError("number of fine steps must be >= 1");
  return std::sqrt(static_cast<double>(fine_steps)) / 2.0 + 1.0;
}

SpeedupEfficiency speedup_efficiency(std::int64_t micro_problems, int fine_steps, int processes) {
  if (micro_problems < 1 || fine_steps < 1 || processes < 1) {
    throw DomainError("speedup needs positive counts");
  }
  SpeedupEfficiency out;
  out.speedup = static_cast<double>(fine_steps) / static_cast<double>(micro_problems);
  out.efficiency = out.speedup / processes;
  return out;
}

RuntimeBreakdown runtime_breakdown(const LedgerSnapshot& ledger, const CostModelParams& params) {
  RuntimeBreakdown out;
  out.master = static_cast<double>(ledger.coarse_fsi_steps) * params.fsi_step_cost +
               static_cast<double>(ledger.coarse_growth) * params.growth_solve_cost;
  for (std::size_t p = 0; p < ledger.process_fsi_steps.size(); ++p) {
    out.processes.push_back(static_cast<double>(ledger.process_fsi_steps[p]) * params.fsi_step_cost +
                            static_cast<double>(ledger.process_growth[p]) * params.growth_solve_cost);
  }
  return out;
}

double estimate_parallel_runtime(const RuntimeBreakdown& breakdown) {
  const double slowest = breakdown.processes.empty()
                             ? 0.0
                             : *std::max_element(breakdown.processes.begin(), breakdown.processes.end());
  return breakdown.master + slowest;
}

double estimate_parallel_runtime(const LedgerSnapshot& ledger, const CostModelParams& params) {
  return estimate_parallel_runtime(runtime_breakdown(ledger, params));
}

int optimal_processes(int fine_steps, Variant variant, int k) {
  if (fine_steps < 1 || k < 1) throw DomainError("optimal_processes needs N_l >= 1 and k >= 1");
  double p = 0.0;
  switch (variant) {
    case Variant::standard: p = std::sqrt(static_cast<double>(fine_steps)); break;
    case Variant::reusage: p = std::sqrt(static_cast<double>(k) * fine_steps); break;
    case Variant::heuristic: p = fine_steps; break;
  }
  return std::clamp(static_cast<int>(std::lround(p)), 1, fine_steps);
}

int best_processes(int fine_steps, Variant variant, int k) {
  int best = 1;
  std::int64_t best_cost = count(variant, k, 1, fine_steps);
  for (int p = 2; p <= fine_steps; ++p) {
    const std::int64_t c = count(variant, k, p, fine_steps);
    if (c < best_cost) {
      best_cost = c;
      best = p;
    }
  }
  return best;
}

void mark_best(CostTable& table) {
  double top_speedup = 0.0;
  double top_efficiency = 0.0;
  for (const auto& col : table.columns) {
    if (col.speedup) top_speedup = std::max(top_speedup, *col.speedup);
    if (col.efficiency) top_efficiency = std::max(top_efficiency, *col.efficiency);
  }
  for (auto& col : table.columns) {
    col.best_speedup = col.speedup && *col.speedup == top_speedup;
    col.best_efficiency = col.efficiency && *col.efficiency == top_efficiency;
  }
}

std::string render_text(const CostTable& table) {
  std::size_t rows = 0;
  for (const auto& col : table.columns) rows = std::max(rows, col.errors.size());

  constexpr int label_width = 12;
  constexpr int width = 13;
  std::ostringstream out;
  auto cell = [&](const std::string& s) {
    std::string padded = s;
    if (padded.size() < width) padded.insert(0, width - padded.size(), ' ');
    out << padded;
  };
  auto label = [&](const std::string& s) {
    out << s << std::string(s.size() < label_width ? label_width - s.size() : 1, ' ');
  };

  if (!table.title.empty()) out << table.title << "\n";
  label("k");
  for (const auto& col : table.columns) cell("P=" + std::to_string(col.processes));
  cell("ref.");
  out << "\n";

  for (std::size_t r = 0; r < rows; ++r) {
    label(std::to_string(r + 1));
    for (const auto& col : table.columns) {
      cell(r < col.errors.size() ? format("%.2e", col.errors[r]) : "-");
    }
    cell(r == 0 && table.reference_value ? format("%.8f", *table.reference_value) : "-");
    out << "\n";
  }

  auto footer = [&](const std::string& name, auto&& fn, const std::string& ref) {
    label(name);
    for (const auto& col : table.columns) cell(col.failure.empty() ? fn(col) : "failed");
    cell(ref);
    out << "\n";
  };
  footer("k_par", [](const TableColumn& c) { return c.iterations ? std::to_string(*c.iterations) : "-"; },
         "-");
  footer("# mp",
         [](const TableColumn& c) {
           return c.micro_problems ? std::to_string(*c.micro_problems) : std::string("-");
         },
         std::to_string(table.reference_micro_problems));
  footer("speedup",
         [](const TableColumn& c) {
           if (!c.speedup) return std::string("-");
           return format("%.1f", *c.speedup) + (c.best_speedup ? "*" : "");
         },
         "1.0");
  footer("efficiency",
         [](const TableColumn& c) {
           if (!c.efficiency) return std::string("-");
           return format("%.0f %%", 100.0 * *c.efficiency) + (c.best_efficiency ? "*" : "");
         },
         "100 %");
  bool any_runtime = false;
  for (const auto& col : table.columns) any_runtime = any_runtime || col.estimated_runtime.has_value();
  if (any_runtime) {
    footer("est. par.",
           [](const TableColumn& c) {
             return c.estimated_runtime ? format("%.0f s", *c.estimated_runtime) : std::string("-");
           },
           "-");
  }
  for (const auto& col : table.columns) {
    if (!col.failure.empty()) out << "P=" << col.processes << " failed: " << col.failure << "\n";
  }
  return out.str();
}

std::string render_csv(const CostTable& table) {
  std::ostringstream out;
  out << "P,k_par,micro_problems,speedup,efficiency,estimated_runtime,best_speedup,best_efficiency,"
         "failure,errors\n";
  for (const auto& col : table.columns) {
    out << col.processes << ',';
    if (col.iterations) out << *col.iterations;
    out << ',';
    if (col.micro_problems) out << *col.micro_problems;
    out << ',';
    if (col.speedup) out << format("%.6g", *col.speedup);
    out << ',';
    if (col.efficiency) out << format("%.6g", *col.efficiency);
    out << ',';
    if (col.estimated_runtime) out << format("%.6g", *col.estimated_runtime);
    out << ',' << (col.best_speedup ? 1 : 0) << ',' << (col.best_efficiency ? 1 : 0) << ',';
    std::string failure = col.failure;
    std::replace(failure.begin(), failure.end(), ',', ';');
    out << failure << ',';
    for (std::size_t i = 0; i < col.errors.size(); ++i) {
      if (i) out << ';';
      out << format("%.6e", col.errors[i]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace plaque::costs
