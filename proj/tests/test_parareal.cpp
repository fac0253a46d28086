#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "plaque/errors.hpp"
#include "plaque/parareal.hpp"

using namespace plaque;
using namespace plaque::parareal;
using twoscale::Schedule;

namespace {

growth::GrowthParams ode_growth() {
  growth::GrowthParams p;
  p.alpha = 5e-7;
  p.sigma0 = 30.0;
  return p;
}

struct OdeFixture {
  growth::OdeGrowthModel model{ode_growth()};
  twoscale::TwoScaleProblem problem{&model, microflow::MicroParams{}, 1e-3, 10};
};

double functional_at(const twoscale::TrajectoryRecord& rec, const Schedule& s, int p, const growth::GrowthModel&) {
  return p == 0 ? rec.rows.front().value : rec.rows[static_cast<std::size_t>(s.interval_end(p))].value;
}

}  // namespace

TEST(Parareal, FiniteTerminationAndPrefixExactness) {
  OdeFixture f;
  for (double days : {48.0, 96.0}) {
    const Schedule s{days * 86400.0, 16, 4};
    const auto ref = twoscale::run_serial(f.problem, Schedule{s.t_end, 16, 1}, f.model.initial_state(),
                                          microflow::MicroState::rest());
    Options opt;
    opt.eps_par = 1e-300;  // only finite termination can stop the run
    opt.keep_iterates = true;
    const Report r = run(f.problem, s, opt, f.model.initial_state(), microflow::MicroState::rest(), &ref);
    EXPECT_EQ(r.termination, "finite_termination");
    EXPECT_LE(r.iterations, 4);
    ASSERT_EQ(r.iterates.size(), static_cast<std::size_t>(r.iterations) + 1);
    for (int k = 1; k <= r.iterations; ++k) {
      for (int p = 0; p <= k; ++p) {
        const double v = f.model.functional(r.iterates[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)]);
        EXPECT_NEAR(v, functional_at(ref, s, p, f.model), 1e-12) << "k=" << k << " p=" << p;
      }
    }
    for (int p = 0; p <= 4; ++p) {
      EXPECT_NEAR(f.model.functional(r.coarse_values[static_cast<std::size_t>(p)]), functional_at(ref, s, p, f.model),
                  1e-12);
    }
  }
}

TEST(Parareal, FiniteTerminationFieldModel) {
  growth::GrowthParams gp;
  gp.alpha = 5e-8;
  growth::StripGrid grid;
  grid.nx = 21;
  grid.ny = 5;
  const growth::PdeGrowthModel model(gp, grid);
  microflow::MicroParams mp;
  mp.inflow_offset = 1.0;
  const twoscale::TwoScaleProblem problem{&model, mp, 1e-3, 10};
  const Schedule s{40 * 86400.0, 8, 4};
  Options opt;
  opt.eps_par = 1e-300;
  opt.keep_iterates = true;
  const auto ref = twoscale::run_serial(problem, Schedule{s.t_end, 8, 1}, model.initial_state(),
                                        microflow::MicroState::rest());
  const Report r = run(problem, s, opt, model.initial_state(), microflow::MicroState::rest(), &ref);
  EXPECT_EQ(r.iterations, 4);
  for (int k = 1; k <= 4; ++k) {
    for (int p = 0; p <= k; ++p) {
      const auto& st = r.iterates[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
      EXPECT_NEAR(model.functional(st), functional_at(ref, s, p, model), 1e-12);
    }
  }
  EXPECT_LE(growth::max_abs_difference(r.coarse_values.back(), ref.final_state), 1e-12);
}

TEST(Parareal, CoarseEqualsFineConvergesInOneIteration) {
  OdeFixture f;
  const Schedule s{16 * 0.3 * 86400.0, 16, 16};
  Options opt;
  opt.stopping = Stopping::coarse;
  const Report r = run(f.problem, s, opt, f.model.initial_state(), microflow::MicroState::rest());
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LE(r.history[0].coarse_error, 1e-14);

  opt.stopping = Stopping::fine;
  const Report r2 = run(f.problem, s, opt, f.model.initial_state(), microflow::MicroState::rest());
  EXPECT_LE(r2.history[0].coarse_error, 1e-14);
  EXPECT_LE(r2.history[0].fine_error, 1e-14);
}

TEST(Parareal, LedgerMatchesClosedForms) {
  OdeFixture f;
  const Schedule s = Schedule::from_days(60, 0.3, 7);  // 200 fine steps, uneven split
  const auto ref = twoscale::run_serial(f.problem, Schedule{s.t_end, s.fine_steps, 1}, f.model.initial_state(),
                                        microflow::MicroState::rest());
  struct Case {
    Mode mode;
    costs::Variant variant;
  };
  for (const Case c : {Case{Mode::standard, costs::Variant::standard}, Case{Mode::reusage, costs::Variant::reusage},
                       Case{Mode::heuristic_coarse, costs::Variant::heuristic}}) {
    Options opt;
    opt.mode = c.mode;
    const Report r = run(f.problem, s, opt, f.model.initial_state(), microflow::MicroState::rest(), &ref);
    const int k = r.iterations;
    EXPECT_EQ(r.ledger.serial_equivalent_micro(), costs::count(c.variant, k, 7, 200)) << to_string(c.mode);
    EXPECT_EQ(r.ledger.micro_fine(), std::int64_t{k} * 200);
    std::int64_t sum = 0;
    for (auto v : r.ledger.process_micro) sum += v;
    EXPECT_EQ(sum, r.ledger.micro_fine());
    EXPECT_EQ(r.ledger.messages_to_master, 7 * k);
    if (c.mode == Mode::reusage) {
      EXPECT_EQ(r.ledger.coarse_micro, 7);
      EXPECT_EQ(r.ledger.serial_equivalent_growth(), costs::count_rd_reusage(k, 7, 200));
      EXPECT_EQ(r.ledger.messages_neighbor, 6 * k);
    }
  }
}

TEST(Parareal, DeterministicAcrossThreadCounts) {
  OdeFixture f;
  const Schedule s = Schedule::from_days(300, 0.3, 20);
  const auto ref = twoscale::run_serial(f.problem, Schedule{s.t_end, s.fine_steps, 1}, f.model.initial_state(),
                                        microflow::MicroState::rest());
  for (Mode mode : {Mode::standard, Mode::reusage}) {
    Options a;
    a.mode = mode;
    a.threads = 1;
    Options b = a;
    b.threads = 8;
    const Report ra = run(f.problem, s, a, f.model.initial_state(), microflow::MicroState::rest(), &ref);
    const Report rb = run(f.problem, s, b, f.model.initial_state(), microflow::MicroState::rest(), &ref);
    ASSERT_EQ(ra.iterations, rb.iterations);
    for (std::size_t i = 0; i < ra.history.size(); ++i) {
      EXPECT_EQ(ra.history[i].coarse_value, rb.history[i].coarse_value);
      EXPECT_EQ(ra.history[i].fine_value, rb.history[i].fine_value);
    }
    for (std::size_t i = 0; i < ra.trajectory.rows.size(); ++i) {
      ASSERT_EQ(ra.trajectory.rows[i].value, rb.trajectory.rows[i].value);
    }
    EXPECT_EQ(ra.ledger.process_micro, rb.ledger.process_micro);
    EXPECT_EQ(ra.ledger.process_fsi_steps, rb.ledger.process_fsi_steps);
  }
}

TEST(Parareal, CoarseCriterionNotLaterThanFine) {
  OdeFixture f;
  const Schedule base = Schedule::from_days(300, 0.3);
  const auto ref = twoscale::run_serial(f.problem, base, f.model.initial_state(), microflow::MicroState::rest());
  for (int P : {10, 20, 30, 40, 50}) {
    Schedule s = base;
    s.processes = P;
    Options fine;
    Options coarse;
    coarse.stopping = Stopping::coarse;
    const auto rf = run(f.problem, s, fine, f.model.initial_state(), microflow::MicroState::rest(), &ref);
    const auto rc = run(f.problem, s, coarse, f.model.initial_state(), microflow::MicroState::rest(), &ref);
    EXPECT_LE(rc.iterations, rf.iterations) << "P=" << P;
  }
}

TEST(Parareal, ReusageNeedsAtLeastAsManyIterations) {
  OdeFixture f;
  const Schedule base = Schedule::from_days(300, 0.3);
  const auto ref = twoscale::run_serial(f.problem, base, f.model.initial_state(), microflow::MicroState::rest());
  for (int P : {10, 30, 60}) {
    Schedule s = base;
    s.processes = P;
    Options std_opt;
    Options reuse = std_opt;
    reuse.mode = Mode::reusage;
    const auto a = run(f.problem, s, std_opt, f.model.initial_state(), microflow::MicroState::rest(), &ref);
    const auto b = run(f.problem, s, reuse, f.model.initial_state(), microflow::MicroState::rest(), &ref);
    EXPECT_GE(b.iterations, a.iterations) << "P=" << P;
    EXPECT_LT(b.ledger.serial_equivalent_micro(), costs::count_standard(b.iterations, P, 1000));
  }
}

TEST(Parareal, ReusageFixedPointAfterConvergence) {
  OdeFixture f;
  const Schedule s{48 * 86400.0, 16, 4};
  costs::CostLedger ledger(4);
  Options opt;
  opt.mode = Mode::reusage;
  Engine engine(f.problem, s, opt, ledger);
  engine.initialize(f.model.initial_state(), microflow::MicroState::rest());
  for (int k = 0; k < 4; ++k) engine.iterate();
  const auto before = engine.state().coarse;
  engine.iterate();
  for (std::size_t p = 0; p < before.size(); ++p) {
    EXPECT_EQ(before[p].scalar().c_s, engine.state().coarse[p].scalar().c_s);
  }
}

TEST(Parareal, InitializationCosts) {
  OdeFixture f;
  const Schedule s = Schedule::from_days(300, 0.3, 10);
  for (Mode mode : {Mode::standard, Mode::reusage, Mode::heuristic_coarse}) {
    costs::CostLedger ledger(10);
    Options opt;
    opt.mode = mode;
    Engine engine(f.problem, s, opt, ledger);
    engine.initialize(f.model.initial_state(), microflow::MicroState::rest());
    EXPECT_EQ(ledger.snapshot().coarse_micro, mode == Mode::heuristic_coarse ? 0 : 10);
  }
}

TEST(Parareal, ZeroGrowthGivesZeroCoarseValues) {
  growth::OdeGrowthModel model(growth::GrowthParams{1e-300, 30.0, 1.0, 1.0, 0.7, 1});
  const twoscale::TwoScaleProblem problem{&model, microflow::MicroParams{}, 1e-3, 10};
  costs::CostLedger ledger(10);
  Engine engine(problem, Schedule::from_days(300, 0.3, 10), Options{}, ledger);
  engine.initialize(model.initial_state(), microflow::MicroState::rest());
  for (const auto& c : engine.state().coarse) EXPECT_LT(c.scalar().c_s, 1e-280);
}

TEST(Parareal, DegenerateProcessCounts) {
  OdeFixture f;
  const Report r = run(f.problem, Schedule::from_days(30, 0.3, 1), Options{}, f.model.initial_state(),
                       microflow::MicroState::rest());
  EXPECT_EQ(r.termination, "serial");
  EXPECT_EQ(r.ledger.micro_fine(), 100);
  EXPECT_THROW(run(f.problem, Schedule{30 * 86400.0, 100, 200}, Options{}, f.model.initial_state(),
                   microflow::MicroState::rest()),
               ConfigError);
}

TEST(Parareal, MaxIterationsExceeded) {
  OdeFixture f;
  Options opt;
  opt.eps_par = 1e-300;
  opt.max_iters = 2;
  EXPECT_THROW(run(f.problem, Schedule::from_days(30, 0.3, 10), opt, f.model.initial_state(),
                   microflow::MicroState::rest()),
               NonConvergence);
}

TEST(ParallelFor, RunsEveryIndexOnceAndRethrowsLowest) {
  for (int threads : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(50, threads, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    try {
      parallel_for(20, threads, [](int i) {
        if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "7");
    }
  }
}
