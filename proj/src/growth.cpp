#include "plaque/growth.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "plaque/errors.hpp"

namespace plaque::growth {

void GrowthParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("growth.alpha must be positive");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw ConfigError("growth.sigma0 must be positive");
  if (!(diffusion > 0.0) || !std::isfinite(diffusion)) {
    throw ConfigError("growth.D_s must be positive");
  }
  if (!(reaction >= 0.0) || !std::isfinite(reaction)) {
    throw ConfigError("growth.R_s must be non-negative");
  }
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("growth.theta must lie in [0, 1]");
  if (reaction_sign != 1 && reaction_sign != -1) {
    throw ConfigError("growth.reaction_sign must be +1 or -1");
  }
}

void StripGrid::validate() const {
  if (nx < 3 || ny < 2) throw ConfigError("grid needs nx >= 3 and ny >= 2");
  if (!(x_max > x_min) || !(y_max > y_min)) throw ConfigError("grid extents are empty");
}

FieldConcentration FieldConcentration::zeros(const StripGrid& grid) {
  grid.validate();
  return FieldConcentration{grid, std::vector<double>(grid.size(), 0.0)};
}

std::span<const double> FieldConcentration::interface() const {
  return std::span<const double>(c).subspan(grid.index(0, grid.ny - 1),
                                            static_cast<std::size_t>(grid.nx));
}

const ScalarConcentration& MacroState::scalar() const {
  if (const auto* s = std::get_if<ScalarConcentration>(&conc)) return *s;
  throw DomainError("macro state holds a field, not a scalar");
}

const FieldConcentration& MacroState::field() const {
  if (const auto* f = std::get_if<FieldConcentration>(&conc)) return *f;
  throw DomainError("macro state holds a scalar, not a field");
}

std::span<const double> MacroState::values() const {
  if (const auto* s = std::get_if<ScalarConcentration>(&conc)) return {&s->c_s, 1};
  return std::get<FieldConcentration>(conc).c;
}

namespace {

void check_same_kind(const MacroState& a, const MacroState& b) {
  if (a.is_field() != b.is_field()) throw DomainError("mixing scalar and field states");
  if (a.is_field() && !(a.field().grid == b.field().grid)) {
    throw DomainError("field states live on different grids");
  }
}

}  // namespace

MacroState corrected(const MacroState& predictor, const MacroState& fine, const MacroState& coarse_old) {
  check_same_kind(predictor, fine);
  check_same_kind(predictor, coarse_old);
  MacroState out = predictor;
  if (auto* s = std::get_if<ScalarConcentration>(&out.conc)) {
    s->c_s += fine.scalar().c_s - coarse_old.scalar().c_s;
    return out;
  }
  auto& c = std::get<FieldConcentration>(out.conc).c;
  const auto& f = fine.field().c;
  const auto& g = coarse_old.field().c;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += f[i] - g[i];
  return out;
}

double max_abs_difference(const MacroState& a, const MacroState& b) {
  check_same_kind(a, b);
  const auto va = a.values();
  const auto vb = b.values();
  double m = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::abs(va[i] - vb[i]));
  return m;
}

double gamma_ode(double wss, double c_s, const GrowthParams& p) {
  if (!(c_s > -1.0)) throw DomainError("gamma_ode needs c_s > -1");
  const double r = wss / p.sigma0;
  return p.alpha / ((1.0 + c_s) * (1.0 + r * r));
}

double delta_weight(double x) {
  const double v = std::min(0.0, (x - 1.0) * (x + 1.0));
  return v * v;
}

InterfaceProfile gamma_pde(const InterfaceProfile& wss, const GrowthParams& p) {
  if (wss.x.size() != wss.values.size()) throw DomainError("interface profile size mismatch");
  InterfaceProfile out{wss.x, std::vector<double>(wss.x.size())};
  for (std::size_t i = 0; i < wss.x.size(); ++i) {
    const double r = wss.values[i] / p.sigma0;
    out.values[i] = p.alpha * delta_weight(wss.x[i]) / (1.0 + r * r);
  }
  return out;
}

ScalarConcentration macro_step_ode(ScalarConcentration state, double gamma_bar, double dt) {
  if (!(dt > 0.0)) throw DomainError("macro step needs dt > 0");
  state.c_s += dt * gamma_bar;
  return state;
}

namespace {

/// Sparse system of the IMEX step. The off-diagonal couplings depend only on
/// the grid and D, so the pattern is analysed once and each step only
/// rewrites the diagonal before a numeric factorisation.
class ImexStepper {
public:
  ImexStepper(const StripGrid& grid, double diffusion) : grid_(grid), diffusion_(diffusion) {
    const int mx = grid.nx - 2;
    const int my = grid.ny - 1;
    n_ = mx * my;
    const double ax = diffusion / (grid.hx() * grid.hx());
    const double ay = diffusion / (grid.hy() * grid.hy());

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_) * 5);
    for (int j = 1; j < grid.ny; ++j) {
      const bool top = j == grid.ny - 1;
      for (int i = 1; i < grid.nx - 1; ++i) {
        const int row = unknown(i, j);
        trip.emplace_back(row, row, 1.0);  // placeholder, rewritten per step
        if (i > 1) trip.emplace_back(row, unknown(i - 1, j), -ax);
        if (i < grid.nx - 2) trip.emplace_back(row, unknown(i + 1, j), -ax);
        if (j > 1) trip.emplace_back(row, unknown(i, j - 1), top ? -2.0 * ay : -ay);
        if (!top) trip.emplace_back(row, unknown(i, j + 1), -ay);
      }
    }
    matrix_.resize(n_, n_);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();

    diag_.resize(static_cast<std::size_t>(n_));
    for (int col = 0; col < n_; ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(matrix_, col); it; ++it) {
        if (it.row() == col) diag_[static_cast<std::size_t>(col)] = &it.valueRef();
      }
    }
    solver_.analyzePattern(matrix_);
    base_diag_ = 2.0 * ax + 2.0 * ay;
  }

  bool matches(const StripGrid& grid, double diffusion) const {
    return grid_ == grid && diffusion_ == diffusion;
  }

  FieldConcentration step(const FieldConcentration& state, std::span<const double> flux, double dt,
                          const GrowthParams& p, std::span<const double> source) {
    const StripGrid& g = grid_;
    const double sr = p.reaction_sign * p.reaction;
    Eigen::VectorXd rhs(n_);
    for (int j = 1; j < g.ny; ++j) {
      for (int i = 1; i < g.nx - 1; ++i) {
        const int row = unknown(i, j);
        const std::size_t node = g.index(i, j);
        const double c_old = state.c[node];
        *diag_[static_cast<std::size_t>(row)] = 1.0 / dt + base_diag_ - sr * (p.theta - c_old);
        double b = c_old / dt + sr * (1.0 - p.theta) * c_old;
        if (!source.empty()) b += source[node];
        if (j == g.ny - 1) b += 2.0 * flux[static_cast<std::size_t>(i)] / g.hy();
        rhs[row] = b;
      }
    }
    solver_.factorize(matrix_);
    if (solver_.info() != Eigen::Success) {
      throw LinearSolverFailure("sparse LU factorisation of the growth system failed");
    }
    const Eigen::VectorXd sol = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success || !sol.allFinite()) {
      throw LinearSolverFailure("sparse LU solve of the growth system failed");
    }
    const double res = (matrix_ * sol - rhs).norm();
    if (res > 1e-9 * std::max(1.0, rhs.norm())) {
      throw LinearSolverFailure("growth system residual too large: " + std::to_string(res));
    }

    FieldConcentration out = FieldConcentration::zeros(g);
    for (int j = 1; j < g.ny; ++j) {
      for (int i = 1; i < g.nx - 1; ++i) out.c[g.index(i, j)] = sol[unknown(i, j)];
    }
    return out;
  }

private:
  int unknown(int i, int j) const { return (j - 1) * (grid_.nx - 2) + (i - 1); }

  StripGrid grid_;
  double diffusion_;
  int n_ = 0;
  double base_diag_ = 0.0;
  Eigen::SparseMatrix<double> matrix_;
  std::vector<double*> diag_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> solver_;
};

}  // namespace

FieldConcentration macro_step_pde(const FieldConcentration& state, std::span<const double> flux,
                                  double dt, const GrowthParams& p, std::span<const double> source) {
  const StripGrid& g = state.grid;
  g.validate();
  if (!(dt > 0.0)) throw DomainError("macro step needs dt > 0");
  if (state.c.size() != g.size()) throw DomainError("field size does not match its grid");
  if (flux.size() != static_cast<std::size_t>(g.nx)) {
    throw DomainError("flux needs one value per interface node");
  }
  if (!source.empty() && source.size() != g.size()) {
    throw DomainError("source needs one value per grid node");
  }
  // One stepper per thread: concurrent fine sweeps never share a factorisation.
  thread_local std::unique_ptr<ImexStepper> stepper;
  if (!stepper || !stepper->matches(g, p.diffusion)) {
    stepper = std::make_unique<ImexStepper>(g, p.diffusion);
  }
  return stepper->step(state, flux, dt, p, source);
}

double interface_midpoint(const FieldConcentration& state) {
  const StripGrid& g = state.grid;
  if (g.nx % 2 == 0) throw DomainError("interface midpoint needs an odd number of x nodes");
  const int mid = g.nx / 2;
  if (std::abs(g.x(mid)) > 1e-12 * (g.x_max - g.x_min)) {
    throw DomainError("grid has no interface node at x = 0");
  }
  return state.at(mid, g.ny - 1);
}

double interface_mean(const FieldConcentration& state) {
  const auto top = state.interface();
  double sum = 0.5 * (top.front() + top.back());
  for (std::size_t i = 1; i + 1 < top.size(); ++i) sum += top[i];
  return sum / static_cast<double>(top.size() - 1);
}

void write_field_csv(std::ostream& out, const FieldConcentration& state) {
  const StripGrid& g = state.grid;
  out << "x,y,c\n";
  out.precision(10);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) out << g.x(i) << ',' << g.y(j) << ',' << state.at(i, j) << '\n';
  }
}

void write_interface_csv(std::ostream& out, const FieldConcentration& state) {
  const StripGrid& g = state.grid;
  out << "x,c\n";
  out.precision(10);
  const auto top = state.interface();
  for (int i = 0; i < g.nx; ++i) out << g.x(i) << ',' << top[static_cast<std::size_t>(i)] << '\n';
}

OdeGrowthModel::OdeGrowthModel(GrowthParams params, double initial_concentration)
    : params_(params), initial_(initial_concentration) {
  params_.validate();
  if (!(initial_ >= 0.0)) throw ConfigError("initial concentration must be non-negative");
}

MacroState OdeGrowthModel::initial_state() const { return MacroState{ScalarConcentration{initial_}, 0.0}; }

std::vector<double> OdeGrowthModel::wall_concentration(const MacroState& state) const {
  return {state.scalar().c_s};
}

void OdeGrowthModel::growth_rate(std::span<const double> wss, const MacroState& state,
                                 std::span<double> out) const {
  out[0] = gamma_ode(wss[0], state.scalar().c_s, params_);
}

MacroState OdeGrowthModel::advance(const MacroState& state, std::span<const double> gamma_bar,
                                   double dt) const {
  return MacroState{macro_step_ode(state.scalar(), gamma_bar[0], dt), state.t + dt};
}

double OdeGrowthModel::functional(const MacroState& state) const { return state.scalar().c_s; }
double OdeGrowthModel::mean_value(const MacroState& state) const { return state.scalar().c_s; }

PdeGrowthModel::PdeGrowthModel(GrowthParams params, StripGrid grid)
    : params_(params), grid_(grid) {
  params_.validate();
  grid_.validate();
  for (int i = 0; i < grid_.nx; ++i) weights_.push_back(delta_weight(grid_.x(i)));
}

MacroState PdeGrowthModel::initial_state() const {
  return MacroState{FieldConcentration::zeros(grid_), 0.0};
}

std::vector<double> PdeGrowthModel::wall_concentration(const MacroState& state) const {
  const auto top = state.field().interface();
  return {top.begin(), top.end()};
}

void PdeGrowthModel::growth_rate(std::span<const double> wss, const MacroState&,
                                 std::span<double> out) const {
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double r = wss[i] / params_.sigma0;
    out[i] = params_.alpha * weights_[i] / (1.0 + r * r);
  }
}

MacroState PdeGrowthModel::advance(const MacroState& state, std::span<const double> gamma_bar,
                                   double dt) const {
  return MacroState{macro_step_pde(state.field(), gamma_bar, dt, params_), state.t + dt};
}

double PdeGrowthModel::functional(const MacroState& state) const {
  return interface_midpoint(state.field());
}

double PdeGrowthModel::mean_value(const MacroState& state) const {
  return interface_mean(state.field());
}

}  // namespace plaque::growth
