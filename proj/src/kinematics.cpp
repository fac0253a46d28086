#include "plaque/kinematics.hpp"

#include <cmath>
#include <string>

#include "plaque/errors.hpp"

namespace plaque::kinematics {

void LameParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw DomainError("Lame parameter mu must be positive");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("Lame parameter lambda must be non-negative");
  }
}

GrowthFactor::GrowthFactor(double g) : g_(g) {
  if (!std::isfinite(g) || g < 1.0) {
    throw DomainError("growth factor must be finite and >= 1, got " + std::to_string(g));
  }
}

GrowthFactor growth_factor_ode(double c_s, double x, double y) {
  if (!(c_s >= 0.0)) {
    throw DomainError("foam cell concentration must be non-negative");
  }
  if (std::abs(y) > 2.0) {
    throw DomainError("growth profile is defined for |y| <= 2 only");
  }
  return GrowthFactor(1.0 + c_s * std::exp(-x * x) * (2.0 - std::abs(y)));
}

GrowthFactor growth_factor_pde(double c) {
  if (!(c >= 0.0)) {
    throw DomainError("foam cell concentration must be non-negative");
  }
  return GrowthFactor(1.0 + c);
}

Tensor2 elastic_strain(const Tensor2& deformation, GrowthFactor g) {
  if (!(deformation.determinant() > 0.0)) {
    throw SingularDeformation("deformation gradient must have positive determinant");
  }
  const double inv_g2 = 1.0 / (g.value() * g.value());
  Tensor2 strain = 0.5 * (inv_g2 * deformation.transpose() * deformation - Tensor2::Identity());
  // F^T F is symmetric in exact arithmetic; enforce it bitwise.
  const double off = 0.5 * (strain(0, 1) + strain(1, 0));
  strain(0, 1) = off;
  strain(1, 0) = off;
  return strain;
}

Tensor2 piola_kirchhoff_stress(const Tensor2& deformation, GrowthFactor g,
                               const LameParams& lame) {
  const Tensor2 strain = elastic_strain(deformation, g);
  const double inv_g = 1.0 / g.value();
  return 2.0 * lame.mu * inv_g * deformation * strain +
         lame.lambda * inv_g * strain.trace() * deformation;
}

}  // namespace plaque::kinematics
