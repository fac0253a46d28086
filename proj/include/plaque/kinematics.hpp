#pragma once

#include <Eigen/Dense>

namespace plaque::kinematics {

/// 2x2 tensor (deformation gradients are dimensionless, stresses in dyne/cm^2).
using Tensor2 = Eigen::Matrix2d;

/// Saint Venant-Kirchhoff Lame parameters in dyne/cm^2.
struct LameParams {
  double mu = 1.0e4;
  double lambda = 4.0e4;

  void validate() const;
};

/// Isotropic growth factor g, F_g = g I. Always finite and >= 1.
class GrowthFactor {
public:
  explicit GrowthFactor(double g);

  double value() const noexcept { return g_; }

private:
  double g_;
};

/// Prescribed-shape growth of the scalar model: 1 + c exp(-x^2) (2 - |y|).
/// Throws DomainError for c < 0 or |y| > 2.
GrowthFactor growth_factor_ode(double c_s, double x, double y);

/// Concentration-driven growth of the field model: 1 + c.
GrowthFactor growth_factor_pde(double c);

/// Elastic Green-Lagrange strain for F_e = F_s / g:
///   E_e = 1/2 (g^-2 F_s^T F_s - I).
/// Throws SingularDeformation if det F_s <= 0.
Tensor2 elastic_strain(const Tensor2& deformation, GrowthFactor g);

/// First Piola-Kirchhoff type stress F_e Sigma_e of the grown body,
///   2 mu g^-1 F_s E_e + lambda g^-1 tr(E_e) F_s.
Tensor2 piola_kirchhoff_stress(const Tensor2& deformation, GrowthFactor g,
                               const LameParams& lame);

}  // namespace plaque::kinematics
