#pragma once

#include <span>
#include <vector>

#include "plaque/costs.hpp"
#include "plaque/growth.hpp"

namespace plaque::microflow {

enum class MicroIntegrator {
  exact_flow,      // exact solution of the linear relaxation over each micro step
  explicit_euler,  // q += dtau * (-lambda (q - V(tau)))
};

/// Surrogate heartbeat flow in a symmetric channel of half-width h.
///   rho_f g/cm^3, nu_f cm^2/s, lambda_relax 1/s, inflow_amplitude cm/s,
///   delta_tau and period in s, h_min in cm.
struct MicroParams {
  double rho_f = 1.0;
  double nu_f = 0.04;
  double lambda_relax = 9.0;
  double c_geo = 60.0;
  double inflow_amplitude = 30.0;
  double inflow_offset = 0.0;
  double delta_tau = 0.02;
  double period = 1.0;
  double h_min = 0.05;
  MicroIntegrator integrator = MicroIntegrator::exact_flow;

  void validate() const;
  /// N_s = period / delta_tau.
  int steps_per_period() const;
};

/// Flow amplitude at a cycle boundary, the state carried as warm start.
struct MicroState {
  double q = 0.0;  // cm/s

  /// Fluid at rest.
  static MicroState rest() { return {}; }
};

/// Cycle-averaged growth values (one per wall point) and the number of cycles
/// the periodicity loop needed (0 for the stationary surrogate).
struct GrowthSample {
  std::vector<double> gamma_bar;
  int cycles_used = 0;
};

/// A * (offset + sin^2(pi tau)).
double inflow_velocity(double tau, const MicroParams& p);

/// Periodic orbit of dq/dtau = -lambda (q - V(tau)):
///   A offset + A/2 - (A/2) lambda (lambda cos(w tau) + w sin(w tau)) / (lambda^2 + w^2),
/// w = 2 pi / period. For lambda = 0 every constant is periodic; returns the mean A (offset + 1/2).
double periodic_flow(double tau, const MicroParams& p);

/// Start on the periodic orbit, q_p(0).
MicroState periodic_start(const MicroParams& p);

/// c_geo 2 rho_f nu_f q / h^2.
double wall_shear_stress(double q, double h_local, const MicroParams& p);

/// Half-width 1 - c at every wall point. Throws ChannelClosure if any is <= h_min.
std::vector<double> half_widths(std::span<const double> wall_concentration, const MicroParams& p);

struct CycleResult {
  MicroState state;
  /// wss[m * points + i] for micro steps m = 1..N_s and wall points i.
  std::vector<double> wss;
};

/// Integrate one period from w0 and record the wall shear stress after each step.
CycleResult advance_cycle(const MicroState& w0, std::span<const double> half_width, const MicroParams& p);

struct MicroResult {
  GrowthSample sample;
  MicroState state;
};

/// Cycle until the averaged growth values are periodic:
///   max_i |gamma_bar^r_i - gamma_bar^{r-1}_i| / alpha < eps_p, r >= 2.
/// Books one micro problem (N_s * cycles micro steps) on `scope` when it
/// converges; throws NonConvergence after max_cycles.
MicroResult solve_micro_problem(const MicroState& w0, const growth::MacroState& macro,
                                const growth::GrowthModel& model, const MicroParams& p,
                                double eps_p, int max_cycles, const costs::LedgerScope& scope = {});

/// Steady flow at the mean inflow A (offset + 1/2); growth evaluated at its
/// shear stress. Costs no micro problem.
GrowthSample solve_stationary_surrogate(const growth::MacroState& macro, const growth::GrowthModel& model,
                                        const MicroParams& p);

}  // namespace plaque::microflow
