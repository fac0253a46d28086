#include "plaque/microflow.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "plaque/errors.hpp"

namespace plaque::microflow {

void MicroParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("micro.") + name + " must be positive");
  };
  positive(rho_f, "rho_f");
  positive(nu_f, "nu_f");
  positive(c_geo, "c_geo");
  positive(inflow_amplitude, "inflow_amplitude");
  positive(delta_tau, "delta_tau");
  positive(period, "period");
  positive(h_min, "h_min");
  if (!(lambda_relax >= 0.0) || !std::isfinite(lambda_relax)) {
    throw ConfigError("micro.lambda_relax must be non-negative");
  }
  if (inflow_offset != 0.0 && inflow_offset != 1.0) {
    throw ConfigError("micro.inflow_offset must be 0 or 1");
  }
  if (!(h_min < 1.0)) throw ConfigError("micro.h_min must be below the unperturbed half-width 1");
  steps_per_period();
}

int MicroParams::steps_per_period() const {
  const double n = period / delta_tau;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * r) {
    throw ConfigError("micro.delta_tau must divide the period");
  }
  return static_cast<int>(r);
}

double inflow_velocity(double tau, const MicroParams& p) {
  if (!(tau >= 0.0)) throw DomainError("inflow_velocity needs tau >= 0");
  const double s = std::sin(std::numbers::pi * tau / p.period);
  return p.inflow_amplitude * (p.inflow_offset + s * s);
}

double periodic_flow(double tau, const MicroParams& p) {
  const double a = p.inflow_amplitude;
  const double mean = a * (p.inflow_offset + 0.5);
  const double lam = p.lambda_relax;
  if (lam == 0.0) return mean;
  const double w = 2.0 * std::numbers::pi / p.period;
  return mean - 0.5 * a * lam * (lam * std::cos(w * tau) + w * std::sin(w * tau)) / (lam * lam + w * w);
}

MicroState periodic_start(const MicroParams& p) { return MicroState{periodic_flow(0.0, p)}; }

double wall_shear_stress(double q, double h_local, const MicroParams& p) {
  if (!(h_local > 0.0)) throw DomainError("wall_shear_stress needs a positive half-width");
  return p.c_geo * 2.0 * p.rho_f * p.nu_f * q / (h_local * h_local);
}

std::vector<double> half_widths(std::span<const double> wall_concentration, const MicroParams& p) {
  std::vector<double> h(wall_concentration.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = 1.0 - wall_concentration[i];
    if (!(h[i] > p.h_min)) {
      throw ChannelClosure("channel half-width " + std::to_string(h[i]) + " at or below h_min " +
                           std::to_string(p.h_min));
    }
  }
  return h;
}

CycleResult advance_cycle(const MicroState& w0, std::span<const double> half_width, const MicroParams& p) {
  if (!std::isfinite(w0.q)) throw DomainError("micro state must be finite");
  for (double h : half_width) {
    if (!(h > p.h_min)) throw ChannelClosure("channel half-width at or below h_min");
  }
  const int ns = p.steps_per_period();
  const std::size_t points = half_width.size();
  const double dtau = p.delta_tau;
  const double decay = std::exp(-p.lambda_relax * dtau);

  // The shear stress is linear in q: precompute the per-point factor.
  std::vector<double> factor(points);
  for (std::size_t i = 0; i < points; ++i) factor[i] = wall_shear_stress(1.0, half_width[i], p);

  CycleResult out;
  out.wss.resize(static_cast<std::size_t>(ns) * points);
  double q = w0.q;
  for (int m = 1; m <= ns; ++m) {
    const double tau_prev = (m - 1) * dtau;
    const double tau = m * dtau;
    if (p.integrator == MicroIntegrator::exact_flow) {
      q = periodic_flow(tau, p) + decay * (q - periodic_flow(tau_prev, p));
    } else {
      q += dtau * (-p.lambda_relax * (q - inflow_velocity(tau_prev, p)));
    }
    double* row = out.wss.data() + static_cast<std::size_t>(m - 1) * points;
    for (std::size_t i = 0; i < points; ++i) row[i] = factor[i] * q;
  }
  out.state.q = q;
  return out;
}

namespace {

std::vector<double> average_growth(const CycleResult& cycle, const growth::MacroState& macro,
                                   const growth::GrowthModel& model, int ns) {
  const std::size_t points = model.wall_points();
  std::vector<double> sum(points, 0.0);
  std::vector<double> rate(points);
  for (int m = 0; m < ns; ++m) {
    const std::span<const double> wss(cycle.wss.data() + static_cast<std::size_t>(m) * points, points);
    model.growth_rate(wss, macro, rate);
    for (std::size_t i = 0; i < points; ++i) sum[i] += rate[i];
  }
  for (double& s : sum) s /= ns;
  return sum;
}

}  // namespace

MicroResult solve_micro_problem(const MicroState& w0, const growth::MacroState& macro,
                                const growth::GrowthModel& model, const MicroParams& p, double eps_p,
                                int max_cycles, const costs::LedgerScope& scope) {
  if (!(eps_p > 0.0)) throw DomainError("eps_p must be positive");
  if (max_cycles < 2) throw DomainError("max_cycles must be at least 2");
  const int ns = p.steps_per_period();
  const std::vector<double> h = half_widths(model.wall_concentration(macro), p);
  const double scale = model.params().alpha;

  MicroState w = w0;
  std::vector<double> previous;
  double change = 0.0;
  for (int r = 1; r <= max_cycles; ++r) {
    CycleResult cycle = advance_cycle(w, h, p);
    w = cycle.state;
    std::vector<double> current = average_growth(cycle, macro, model, ns);
    if (r >= 2) {
      change = 0.0;
      for (std::size_t i = 0; i < current.size(); ++i) {
        change = std::max(change, std::abs(current[i] - previous[i]) / scale);
      }
      if (change < eps_p) {
        scope.micro(static_cast<std::int64_t>(ns) * r);
        return MicroResult{GrowthSample{std::move(current), r}, w};
      }
    }
    previous = std::move(current);
  }
  throw NonConvergence("micro problem not periodic after " + std::to_string(max_cycles) +
                       " cycles (last change " + std::to_string(change) + ")");
}

GrowthSample solve_stationary_surrogate(const growth::MacroState& macro, const growth::GrowthModel& model,
                                        const MicroParams& p) {
  const std::vector<double> h = half_widths(model.wall_concentration(macro), p);
  const double q_stat = p.inflow_amplitude * (p.inflow_offset + 0.5);
  std::vector<double> wss(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) wss[i] = wall_shear_stress(q_stat, h[i], p);
  GrowthSample out;
  out.gamma_bar.resize(h.size());
  model.growth_rate(wss, macro, out.gamma_bar);
  return out;
}

}  // namespace plaque::microflow
