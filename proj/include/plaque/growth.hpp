#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace plaque::growth {

/// Parameters of both growth models.
///   alpha:  1/s (scalar model) or cm/s (field model, boundary flux)
///   sigma0: reference wall shear stress, g/(cm s^2)
///   diffusion, reaction: D_s in cm^2/s, R_s in 1/s (field model only)
///   theta: IMEX weight of the linearised logistic term
///   reaction_sign: +1 for dc/dt = D lap c + R c(1-c), -1 for the opposite sign
struct GrowthParams {
  double alpha = 5.0e-7;
  double sigma0 = 30.0;
  double diffusion = 1.2e-7;
  double reaction = 5.0e-7;
  double theta = 0.7;
  int reaction_sign = 1;

  void validate() const;
};

/// Uniform node grid on the lower wall strip [-5,5] x [-2,-1].
/// Row j = 0 is the outer wall (y = -2), row ny-1 the fluid interface (y = -1).
struct StripGrid {
  int nx = 101;
  int ny = 11;
  double x_min = -5.0;
  double x_max = 5.0;
  double y_min = -2.0;
  double y_max = -1.0;

  void validate() const;
  double hx() const { return (x_max - x_min) / (nx - 1); }
  double hy() const { return (y_max - y_min) / (ny - 1); }
  double x(int i) const { return x_min + i * hx(); }
  double y(int j) const { return y_min + j * hy(); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  bool operator==(const StripGrid&) const = default;
};

struct ScalarConcentration {
  double c_s = 0.0;
};

/// Nodal concentration on a StripGrid, Dirichlet nodes included (always 0).
struct FieldConcentration {
  StripGrid grid;
  std::vector<double> c;

  static FieldConcentration zeros(const StripGrid& grid);
  double at(int i, int j) const { return c[grid.index(i, j)]; }
  /// Values on the fluid interface, left to right.
  std::span<const double> interface() const;
};

/// Growth state at one macro time.
struct MacroState {
  std::variant<ScalarConcentration, FieldConcentration> conc;
  double t = 0.0;  // s

  bool is_field() const { return std::holds_alternative<FieldConcentration>(conc); }
  const ScalarConcentration& scalar() const;
  const FieldConcentration& field() const;
  /// Concentration values as a flat span (one value for the scalar model).
  std::span<const double> values() const;
};

/// predictor + fine - coarse_old, the parareal correction; time from predictor.
MacroState corrected(const MacroState& predictor, const MacroState& fine, const MacroState& coarse_old);

/// Largest absolute entrywise difference of two states of the same kind.
double max_abs_difference(const MacroState& a, const MacroState& b);

/// Scalar-model growth rate alpha (1+c)^-1 (1 + wss^2/sigma0^2)^-1, in (0, alpha].
double gamma_ode(double wss, double c_s, const GrowthParams& p);

/// Damaged-wall weight min{0,(x-1)(x+1)}^2: (x^2-1)^2 inside (-1,1), else 0.
double delta_weight(double x);

/// Pointwise field-model influx alpha delta(x) (1 + wss^2/sigma0^2)^-1.
struct InterfaceProfile {
  std::vector<double> x;
  std::vector<double> values;
};

InterfaceProfile gamma_pde(const InterfaceProfile& wss, const GrowthParams& p);

/// Forward Euler: c + dt * gamma_bar.
ScalarConcentration macro_step_ode(ScalarConcentration state, double gamma_bar, double dt);

/// One linearised backward-Euler (IMEX) step of
///   dc/dt = D lap c + s R c (1 - c) + source,
/// with the logistic term split as
///   theta c_new (1 - c_old) + (1 - theta) c_old (1 - c_new),
/// influx D dc/dn = flux on the interface row and c = 0 on x = +-5, y = -2.
///
/// The Neumann row is closed with a ghost node c_ghost = c_below + 2 hy flux / D,
/// which turns the interface stencil into
///   D (c_{i-1} - 2c_i + c_{i+1})/hx^2 + 2D (c_below - c_i)/hy^2 + 2 flux_i / hy.
///
/// `flux` has one entry per interface node; `source` is empty or one value per node.
FieldConcentration macro_step_pde(const FieldConcentration& state, std::span<const double> flux,
                                  double dt, const GrowthParams& p,
                                  std::span<const double> source = {});

/// Value at the interface node x = 0. Throws DomainError if the grid has none.
double interface_midpoint(const FieldConcentration& state);

/// Trapezoidal mean of the concentration along the interface.
double interface_mean(const FieldConcentration& state);

void write_field_csv(std::ostream& out, const FieldConcentration& state);
void write_interface_csv(std::ostream& out, const FieldConcentration& state);

/// Macro-scale growth model as seen by the micro problem and the time drivers.
class GrowthModel {
public:
  virtual ~GrowthModel() = default;

  virtual std::string_view name() const = 0;
  virtual const GrowthParams& params() const = 0;
  virtual MacroState initial_state() const = 0;

  /// Number of wall points where shear stress is sampled.
  virtual std::size_t wall_points() const = 0;
  /// Concentration at the wall points; drives the channel half-width.
  virtual std::vector<double> wall_concentration(const MacroState& state) const = 0;
  /// Instantaneous growth rate per wall point.
  virtual void growth_rate(std::span<const double> wss, const MacroState& state,
                           std::span<double> out) const = 0;
  /// Advance by dt with the cycle-averaged growth values.
  virtual MacroState advance(const MacroState& state, std::span<const double> gamma_bar,
                             double dt) const = 0;

  /// Scalar functional used for stopping criteria and errors
  /// (c_s, or the interface midpoint value).
  virtual double functional(const MacroState& state) const = 0;
  /// Secondary observable (c_s, or the interface mean).
  virtual double mean_value(const MacroState& state) const = 0;
};

class OdeGrowthModel final : public GrowthModel {
public:
  explicit OdeGrowthModel(GrowthParams params, double initial_concentration = 0.0);

  std::string_view name() const override { return "ode"; }
  const GrowthParams& params() const override { return params_; }
  MacroState initial_state() const override;
  std::size_t wall_points() const override { return 1; }
  std::vector<double> wall_concentration(const MacroState& state) const override;
  void growth_rate(std::span<const double> wss, const MacroState& state,
                   std::span<double> out) const override;
  MacroState advance(const MacroState& state, std::span<const double> gamma_bar,
                     double dt) const override;
  double functional(const MacroState& state) const override;
  double mean_value(const MacroState& state) const override;

private:
  GrowthParams params_;
  double initial_;
};

class PdeGrowthModel final : public GrowthModel {
public:
  PdeGrowthModel(GrowthParams params, StripGrid grid);

  std::string_view name() const override { return "pde"; }
  const GrowthParams& params() const override { return params_; }
  const StripGrid& grid() const { return grid_; }
  MacroState initial_state() const override;
  std::size_t wall_points() const override { return static_cast<std::size_t>(grid_.nx); }
  std::vector<double> wall_concentration(const MacroState& state) const override;
  void growth_rate(std::span<const double> wss, const MacroState& state,
                   std::span<double> out) const override;
  MacroState advance(const MacroState& state, std::span<const double> gamma_bar,
                     double dt) const override;
  double functional(const MacroState& state) const override;
  double mean_value(const MacroState& state) const override;

private:
  GrowthParams params_;
  StripGrid grid_;
  std::vector<double> weights_;  // delta(x_i)
};

}  // namespace plaque::growth
