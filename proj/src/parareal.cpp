#include "plaque/parareal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "plaque/errors.hpp"

namespace plaque::parareal {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::standard: return "parareal";
    case Mode::reusage: return "reusage";
    case Mode::heuristic_coarse: return "heuristic";
  }
  return "?";
}

const char* to_string(Stopping stopping) { return stopping == Stopping::fine ? "fine" : "coarse"; }

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto guarded = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (threads == 1) {
    for (int i = 0; i < n; ++i) guarded(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) guarded(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Engine::Engine(const twoscale::TwoScaleProblem& problem, const twoscale::Schedule& schedule, Options options,
               costs::CostLedger& ledger)
    : problem_(problem), schedule_(schedule), options_(options), ledger_(ledger) {
  problem_.validate();
  schedule_.validate();
  if (schedule_.processes < 2) throw ConfigError("parareal needs P >= 2");
  if (ledger_.processes() != schedule_.processes) {
    throw ConfigError("ledger process count does not match P");
  }
  if (!(options_.eps_par > 0.0)) throw ConfigError("eps_par must be positive");
  if (options_.max_iters < 1) throw ConfigError("max_iters must be >= 1");
}

void Engine::initialize(const growth::MacroState& initial, const microflow::MicroState& micro) {
  const int P = schedule_.processes;
  initial_ = initial;
  initial_micro_ = micro;
  state_ = PararealState{};
  state_.coarse.assign(static_cast<std::size_t>(P) + 1, initial);
  state_.fine_end.assign(static_cast<std::size_t>(P) + 1, initial);
  state_.coarse_prop.assign(static_cast<std::size_t>(P) + 1, initial);
  state_.warm.assign(static_cast<std::size_t>(P) + 1, micro);
  state_.fine_micro_end.assign(static_cast<std::size_t>(P) + 1, micro);
  state_.stored_gamma.assign(static_cast<std::size_t>(P) + 1, {});
  sweeps_.assign(static_cast<std::size_t>(P) + 1, {});

  // Re-usage initialises with two-scale coarse steps too; only the heuristic
  // variant replaces them.
  const auto mode = options_.mode == Mode::heuristic_coarse ? twoscale::CoarseMode::heuristic
                                                            : twoscale::CoarseMode::two_scale;
  const costs::LedgerScope master{&ledger_, costs::Level::coarse, 0};
  microflow::MicroState w = micro;
  for (int p = 1; p <= P; ++p) {
    const auto up = static_cast<std::size_t>(p);
    state_.warm[up] = w;
    auto step = twoscale::run_coarse_step(problem_, state_.coarse[up - 1], w, schedule_.coarse_dt(p), mode, master);
    state_.coarse[up] = step.state;
    state_.coarse_prop[up] = std::move(step.state);
    w = step.micro;
  }
  ledger_.record_messages(costs::Message::master_to_fine, P);
}

void Engine::fine_sweeps() {
  const int P = schedule_.processes;
  const double dt = schedule_.dt();
  parallel_for(P, options_.threads, [&](int i) {
    const int p = i + 1;
    const auto up = static_cast<std::size_t>(p);
    const costs::LedgerScope scope{&ledger_, costs::Level::fine, i};
    sweeps_[up] = twoscale::sweep(problem_, state_.coarse[up - 1], state_.warm[up], dt, schedule_.interval_steps(p),
                                  scope);
  });
  for (int p = 1; p <= P; ++p) {
    const auto up = static_cast<std::size_t>(p);
    state_.fine_end[up] = sweeps_[up].final_state;
    state_.fine_micro_end[up] = sweeps_[up].final_micro;
    if (options_.mode == Mode::reusage) state_.stored_gamma[up] = sweeps_[up].gamma;
  }
  ledger_.record_messages(costs::Message::fine_to_master, P);
  if (options_.mode == Mode::reusage) {
    // Each process hands its final micro state to its right neighbour.
    for (int p = P; p >= 2; --p) {
      state_.warm[static_cast<std::size_t>(p)] = state_.fine_micro_end[static_cast<std::size_t>(p) - 1];
    }
    ledger_.record_messages(costs::Message::neighbor, P - 1);
  }
}

void Engine::coarse_standard() {
  const int P = schedule_.processes;
  const auto mode = options_.mode == Mode::heuristic_coarse ? twoscale::CoarseMode::heuristic
                                                            : twoscale::CoarseMode::two_scale;
  const costs::LedgerScope master{&ledger_, costs::Level::coarse, 0};
  microflow::MicroState w = initial_micro_;
  std::vector<growth::MacroState> next(static_cast<std::size_t>(P) + 1, initial_);
  next[0] = state_.coarse[0];
  for (int p = 1; p <= P; ++p) {
    const auto up = static_cast<std::size_t>(p);
    auto step = twoscale::run_coarse_step(problem_, next[up - 1], w, schedule_.coarse_dt(p), mode, master);
    w = step.micro;
    next[up] = growth::corrected(step.state, state_.fine_end[up], state_.coarse_prop[up]);
    state_.coarse_prop[up] = std::move(step.state);
  }
  state_.coarse = std::move(next);
}

void Engine::coarse_reusage() {
  const int P = schedule_.processes;
  const auto& model = problem_.growth_model();
  const costs::LedgerScope master{&ledger_, costs::Level::coarse, 0};
  for (int p = 1; p <= P; ++p) {
    const auto up = static_cast<std::size_t>(p);
    state_.coarse[up] = twoscale::replay_growth(model, state_.coarse[up - 1], state_.stored_gamma[up],
                                                schedule_.dt(), master);
  }
}

void Engine::iterate() {
  if (state_.coarse.empty()) throw DomainError("parareal engine used before initialize()");
  fine_sweeps();
  if (options_.mode == Mode::reusage) {
    coarse_reusage();
  } else {
    coarse_standard();
  }
  ledger_.record_messages(costs::Message::master_to_fine, schedule_.processes);
  ++state_.k;
}

twoscale::TrajectoryRecord Engine::fine_trajectory() const {
  twoscale::TrajectoryRecord out;
  const int P = schedule_.processes;
  for (int p = 1; p <= P; ++p) {
    const auto& s = sweeps_[static_cast<std::size_t>(p)];
    const std::size_t skip = p == 1 ? 0 : 1;  // interval start duplicates the previous end
    out.rows.insert(out.rows.end(), s.rows.begin() + static_cast<std::ptrdiff_t>(skip), s.rows.end());
    out.gamma.insert(out.gamma.end(), s.gamma.begin(), s.gamma.end());
  }
  const auto& last = sweeps_[static_cast<std::size_t>(P)];
  out.final_state = last.final_state;
  out.final_micro = last.final_micro;
  return out;
}

Report run(const twoscale::TwoScaleProblem& problem, const twoscale::Schedule& schedule, const Options& options,
           const growth::MacroState& initial, const microflow::MicroState& micro,
           const twoscale::TrajectoryRecord* reference) {
  problem.validate();
  schedule.validate();
  const auto& model = problem.growth_model();

  twoscale::TrajectoryRecord own_reference;
  if (reference == nullptr) {
    own_reference = twoscale::run_serial(problem, twoscale::Schedule{schedule.t_end, schedule.fine_steps, 1},
                                         initial, micro);
    reference = &own_reference;
  }
  if (reference->rows.size() != static_cast<std::size_t>(schedule.fine_steps) + 1) {
    throw ConfigError("reference trajectory does not match the schedule");
  }

  Report report;
  report.mode = options.mode;
  report.stopping = options.stopping;
  report.processes = schedule.processes;
  report.fine_steps = schedule.fine_steps;
  report.reference_value = reference->rows.back().value;

  costs::CostLedger ledger(schedule.processes);
  if (schedule.processes == 1) {
    // Degenerate case: the fine propagator over the whole interval.
    report.trajectory = twoscale::run_serial(problem, schedule, initial, micro, &ledger);
    const double v = report.trajectory.rows.back().value;
    const double err = std::abs(v - report.reference_value);
    report.history.push_back(IterationRecord{1, v, v, err, err, 0.0, 0.0});
    report.iterations = 1;
    report.termination = "serial";
    report.coarse_values = {initial, report.trajectory.final_state};
    report.ledger = ledger.snapshot();
    return report;
  }

  Engine engine(problem, schedule, options, ledger);
  engine.initialize(initial, micro);
  const int P = schedule.processes;
  double prev_coarse = model.functional(engine.state().coarse.back());
  double prev_fine = prev_coarse;
  if (options.keep_iterates) report.iterates.push_back(engine.state().coarse);

  for (int k = 1;; ++k) {
    engine.iterate();
    const auto& st = engine.state();
    IterationRecord rec;
    rec.k = k;
    rec.coarse_value = model.functional(st.coarse.back());
    rec.fine_value = model.functional(st.fine_end.back());
    rec.coarse_error = std::abs(rec.coarse_value - report.reference_value);
    rec.fine_error = std::abs(rec.fine_value - report.reference_value);
    rec.coarse_change = std::abs(rec.coarse_value - prev_coarse);
    rec.fine_change = std::abs(rec.fine_value - prev_fine);
    prev_coarse = rec.coarse_value;
    prev_fine = rec.fine_value;
    report.history.push_back(rec);
    if (options.keep_iterates) report.iterates.push_back(st.coarse);

    // The fine criterion compares two fine endpoint values, so it is first
    // evaluated after the second sweep.
    const bool fine = options.stopping == Stopping::fine;
    const double change = fine ? rec.fine_change : rec.coarse_change;
    if (change < options.eps_par && (!fine || k >= 2)) {
      report.termination = "converged";
    } else if (k == P) {
      report.termination = "finite_termination";
    } else if (k >= options.max_iters) {
      std::ostringstream msg;
      msg << "parareal did not reach eps_par = " << options.eps_par << " within " << options.max_iters
          << " iterations (last change " << change << ")";
      throw NonConvergence(msg.str());
    }
    if (!report.termination.empty()) {
      report.iterations = k;
      break;
    }
  }

  report.trajectory = engine.fine_trajectory();
  report.coarse_values = engine.state().coarse;
  report.ledger = ledger.snapshot();
  return report;
}

}  // namespace plaque::parareal
