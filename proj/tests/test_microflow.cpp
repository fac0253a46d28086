#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "plaque/errors.hpp"
#include "plaque/microflow.hpp"

using namespace plaque;
using namespace plaque::microflow;

namespace {

growth::GrowthParams ode_growth() {
  growth::GrowthParams p;
  p.alpha = 5e-7;
  p.sigma0 = 30.0;
  return p;
}

const growth::MacroState kFresh{growth::ScalarConcentration{0.0}, 0.0};

}  // namespace

TEST(Inflow, Examples) {
  MicroParams p;
  p.inflow_amplitude = 30.0;
  p.inflow_offset = 0.0;
  EXPECT_EQ(inflow_velocity(0.0, p), 0.0);
  EXPECT_DOUBLE_EQ(inflow_velocity(0.5, p), 30.0);
  p.inflow_offset = 1.0;
  EXPECT_DOUBLE_EQ(inflow_velocity(0.5, p), 60.0);
  EXPECT_NEAR(inflow_velocity(1.25, p), inflow_velocity(0.25, p), 1e-12);
  EXPECT_THROW(inflow_velocity(-0.1, p), DomainError);
}

TEST(WallShear, Examples) {
  MicroParams p;
  p.c_geo = 12.5;
  EXPECT_EQ(wall_shear_stress(0.0, 1.0, p), 0.0);
  EXPECT_DOUBLE_EQ(wall_shear_stress(30.0, 1.0, p), 30.0);
  EXPECT_DOUBLE_EQ(wall_shear_stress(30.0, 0.5, p), 120.0);
  EXPECT_THROW(wall_shear_stress(1.0, 0.0, p), DomainError);
}

TEST(WallShear, PropertyMonotoneAndLinear) {
  MicroParams p;
  oracle::Gen gen(5);
  for (int i = 0; i < 1000; ++i) {
    const double q = gen.uniform(0.1, 100);
    const double h = gen.uniform(0.06, 1.0);
    const double dh = gen.uniform(1e-3, 0.5);
    ASSERT_GT(wall_shear_stress(q, h, p), wall_shear_stress(q, h + dh, p));
    const double a = gen.uniform(0.0, 5.0);
    ASSERT_NEAR(wall_shear_stress(a * q, h, p), a * wall_shear_stress(q, h, p),
                1e-12 * wall_shear_stress(a * q, h, p) + 1e-300);
  }
}

TEST(PeriodicOrbit, MatchesClosedForm) {
  MicroParams p;
  for (double t : {0.0, 0.13, 0.5, 0.77}) {
    EXPECT_NEAR(periodic_flow(t, p), oracle::periodic_orbit(t, 9.0, 30.0, 0.0), 1e-12);
  }
  // The offset-0 orbit written as 15 - 15 lam (lam cos + 2 pi sin)/(lam^2 + 4 pi^2).
  const double lam = 9.0;
  const double w = 2 * std::numbers::pi;
  EXPECT_NEAR(periodic_flow(0.0, p), 15.0 - 15.0 * lam * lam / (lam * lam + w * w), 1e-12);
}

TEST(AdvanceCycle, StaysOnPeriodicOrbit) {
  MicroParams p;
  const double h[] = {1.0};
  const MicroState q0{oracle::periodic_orbit(0.0, 9.0, 30.0, 0.0)};
  const auto r = advance_cycle(q0, h, p);
  EXPECT_NEAR(r.state.q, q0.q, 1e-10);
  ASSERT_EQ(r.wss.size(), 50u);
  // WSS samples follow the orbit at tau_m = m dtau.
  for (int m = 1; m <= 50; ++m) {
    const double q = oracle::periodic_orbit(m * 0.02, 9.0, 30.0, 0.0);
    EXPECT_NEAR(r.wss[static_cast<std::size_t>(m - 1)], wall_shear_stress(q, 1.0, p), 1e-9);
  }

  // Explicit Euler stays within O(dtau) of the orbit.
  p.integrator = MicroIntegrator::explicit_euler;
  const auto e = advance_cycle(q0, h, p);
  EXPECT_NEAR(e.state.q, q0.q, 0.02 * 30.0);
}

TEST(AdvanceCycle, PerturbationDecaysByExpMinusLambda) {
  MicroParams p;
  const double h[] = {0.8};
  const double qp = oracle::periodic_orbit(0.0, 9.0, 30.0, 0.0);
  const auto r = advance_cycle(MicroState{qp + 6.28}, h, p);
  const double dev = std::abs(r.state.q - qp);
  EXPECT_NEAR(dev, 6.28 * std::exp(-9.0), 0.02 * 6.28 * std::exp(-9.0));
  EXPECT_LT(dev, 1e-3);
}

TEST(AdvanceCycle, PropertyContraction) {
  oracle::Gen gen(17);
  for (int i = 0; i < 200; ++i) {
    MicroParams p;
    p.lambda_relax = gen.uniform(0.5, 20.0);
    p.inflow_offset = gen.integer(0, 1);
    const double h[] = {gen.uniform(0.1, 1.0)};
    const double qp = oracle::periodic_orbit(0.0, p.lambda_relax, p.inflow_amplitude, p.inflow_offset);
    const double d = gen.uniform(-20.0, 20.0);
    const auto r = advance_cycle(MicroState{qp + d}, h, p);
    const double expected = std::abs(d) * std::exp(-p.lambda_relax);
    ASSERT_NEAR(std::abs(r.state.q - qp), expected, 0.02 * expected + 1e-12);
  }
}

TEST(AdvanceCycle, ChannelClosure) {
  MicroParams p;
  const double h[] = {0.05};
  EXPECT_THROW(advance_cycle(MicroState{}, h, p), ChannelClosure);
  const std::vector<double> c{0.96};
  EXPECT_THROW(half_widths(c, p), ChannelClosure);
}

TEST(SolveMicro, OnOrbitTakesTwoCycles) {
  const growth::OdeGrowthModel model(ode_growth());
  MicroParams p;
  const auto r = solve_micro_problem(periodic_start(p), kFresh, model, p, 1e-3, 10);
  EXPECT_EQ(r.sample.cycles_used, 2);
  ASSERT_EQ(r.sample.gamma_bar.size(), 1u);
  EXPECT_GT(r.sample.gamma_bar[0], 0.0);
  EXPECT_LE(r.sample.gamma_bar[0], 5e-7);
}

TEST(SolveMicro, PerturbedTakesTwoOrThreeCycles) {
  const growth::OdeGrowthModel model(ode_growth());
  MicroParams p;
  for (double d : {-6.28, -1.0, 1.0, 6.28, 15.0}) {
    const auto r = solve_micro_problem(MicroState{periodic_start(p).q + d}, kFresh, model, p, 1e-3, 10);
    EXPECT_GE(r.sample.cycles_used, 2) << d;
    EXPECT_LE(r.sample.cycles_used, 3) << d;
  }
  const auto rest = solve_micro_problem(MicroState::rest(), kFresh, model, p, 1e-3, 10);
  EXPECT_LE(rest.sample.cycles_used, 3);
}

TEST(SolveMicro, GammaChangesDecreaseGeometrically) {
  // Track |gamma^r - gamma^{r-1}| cycle by cycle via repeated single cycles.
  const growth::OdeGrowthModel model(ode_growth());
  MicroParams p;
  const double h[] = {1.0};
  MicroState w{periodic_start(p).q + 10.0};
  std::vector<double> gammas;
  for (int r = 0; r < 4; ++r) {
    auto cyc = advance_cycle(w, h, p);
    w = cyc.state;
    double sum = 0.0;
    double out = 0.0;
    for (double s : cyc.wss) {
      model.growth_rate(std::span<const double>(&s, 1), kFresh, std::span<double>(&out, 1));
      sum += out;
    }
    gammas.push_back(sum / 50.0);
  }
  for (std::size_t r = 2; r + 1 < gammas.size(); ++r) {
    const double ratio = std::abs(gammas[r + 1] - gammas[r]) / std::abs(gammas[r] - gammas[r - 1]);
    EXPECT_LE(ratio, std::exp(-9.0) + 0.05);
  }
}

TEST(SolveMicro, MaxCycleGuard) {
  const growth::OdeGrowthModel model(ode_growth());
  MicroParams p;
  p.lambda_relax = 0.05;
  EXPECT_THROW(solve_micro_problem(MicroState{40.0}, kFresh, model, p, 1e-6, 5), NonConvergence);
  // Without relaxation every cycle is identical, so the criterion holds at once.
  p.lambda_relax = 0.0;
  EXPECT_EQ(solve_micro_problem(MicroState{40.0}, kFresh, model, p, 1e-6, 5).sample.cycles_used, 2);
}

TEST(SolveMicro, LedgerBooksOneMicroProblem) {
  const growth::OdeGrowthModel model(ode_growth());
  MicroParams p;
  costs::CostLedger ledger(2);
  const auto r = solve_micro_problem(MicroState::rest(), kFresh, model, p, 1e-3, 10,
                                     costs::LedgerScope{&ledger, costs::Level::fine, 1});
  const auto snap = ledger.snapshot();
  EXPECT_EQ(snap.process_micro[1], 1);
  EXPECT_EQ(snap.process_micro[0], 0);
  EXPECT_EQ(snap.process_fsi_steps[1], 50 * r.sample.cycles_used);
}

TEST(SolveMicro, Deterministic) {
  const growth::OdeGrowthModel model(ode_growth());
  MicroParams p;
  const growth::MacroState s{growth::ScalarConcentration{0.3}, 0.0};
  const auto a = solve_micro_problem(MicroState{3.3}, s, model, p, 1e-3, 10);
  const auto b = solve_micro_problem(MicroState{3.3}, s, model, p, 1e-3, 10);
  EXPECT_EQ(a.sample.gamma_bar, b.sample.gamma_bar);
  EXPECT_EQ(a.state.q, b.state.q);
  EXPECT_EQ(a.sample.cycles_used, b.sample.cycles_used);
}

TEST(SolveMicro, FieldModelPerNode) {
  growth::GrowthParams gp;
  gp.alpha = 5e-8;
  const growth::PdeGrowthModel model(gp, growth::StripGrid{});
  MicroParams p;
  p.inflow_offset = 1.0;
  const auto r = solve_micro_problem(MicroState::rest(), model.initial_state(), model, p, 1e-3, 10);
  ASSERT_EQ(r.sample.gamma_bar.size(), 101u);
  EXPECT_GT(r.sample.gamma_bar[50], 0.0);
  EXPECT_EQ(r.sample.gamma_bar[0], 0.0);
  EXPECT_EQ(r.sample.gamma_bar[50 + 15], 0.0);  // x = 1.5
}

TEST(Stationary, Examples) {
  const growth::OdeGrowthModel model(ode_growth());
  MicroParams p;
  p.c_geo = 12.5;
  const auto g = solve_stationary_surrogate(kFresh, model, p);
  // q_stat = 15, WSS = 12.5 * 2 * 0.04 * 15 = 15, gamma = alpha / 1.25
  EXPECT_NEAR(g.gamma_bar[0], 0.8 * 5e-7, 1e-20);
  EXPECT_EQ(g.cycles_used, 0);
  p.inflow_offset = 1.0;
  const auto g1 = solve_stationary_surrogate(kFresh, model, p);
  const double wss = 12.5 * 2 * 0.04 * 45.0;
  EXPECT_NEAR(g1.gamma_bar[0], 5e-7 / (1.0 + wss * wss / 900.0), 1e-20);
}

TEST(MicroParams, Validation) {
  MicroParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.steps_per_period(), 50);
  p.delta_tau = 0.03;
  EXPECT_THROW(p.validate(), ConfigError);
  p = MicroParams{};
  p.inflow_offset = 0.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = MicroParams{};
  p.nu_f = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}
