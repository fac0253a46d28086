#include <gtest/gtest.h>

#include "oracles.hpp"
#include "plaque/errors.hpp"
#include "plaque/kinematics.hpp"

using namespace plaque;
using namespace plaque::kinematics;

TEST(GrowthFactor, OdeProfile) {
  EXPECT_DOUBLE_EQ(growth_factor_ode(0.0, 0.0, 1.0).value(), 1.0);
  EXPECT_DOUBLE_EQ(growth_factor_ode(0.5, 0.0, 1.0).value(), 1.5);
  EXPECT_DOUBLE_EQ(growth_factor_ode(0.5, 0.0, 2.0).value(), 1.0);
  EXPECT_DOUBLE_EQ(growth_factor_ode(0.5, 0.0, -2.0).value(), 1.0);
}

TEST(GrowthFactor, RejectsInvalid) {
  EXPECT_THROW(growth_factor_ode(-0.1, 0.0, 1.0), DomainError);
  EXPECT_THROW(growth_factor_ode(0.1, 0.0, 2.5), DomainError);
  EXPECT_THROW(GrowthFactor(0.9), DomainError);
  EXPECT_THROW(GrowthFactor(std::nan("")), DomainError);
  EXPECT_THROW(growth_factor_pde(-1e-3), DomainError);
  EXPECT_DOUBLE_EQ(growth_factor_pde(0.25).value(), 1.25);
}

TEST(ElasticStrain, Examples) {
  EXPECT_TRUE(elastic_strain(Tensor2::Identity(), GrowthFactor(1.0)).isZero(0.0));
  const Tensor2 e = elastic_strain(Tensor2::Identity(), GrowthFactor(2.0));
  EXPECT_DOUBLE_EQ(e(0, 0), -0.375);
  EXPECT_DOUBLE_EQ(e(1, 1), -0.375);
  EXPECT_DOUBLE_EQ(e(0, 1), 0.0);
  Tensor2 f = Tensor2::Identity();
  f(0, 0) = 1.1;
  const Tensor2 e2 = elastic_strain(f, GrowthFactor(1.0));
  EXPECT_NEAR(e2(0, 0), 0.105, 1e-15);
  EXPECT_DOUBLE_EQ(e2(1, 1), 0.0);
}

TEST(ElasticStrain, SingularDeformation) {
  Tensor2 f;
  f << 1.0, 2.0, 0.5, 1.0;  // det = 0
  EXPECT_THROW(elastic_strain(f, GrowthFactor(1.0)), SingularDeformation);
  f << -1.0, 0.0, 0.0, 1.0;
  EXPECT_THROW(piola_kirchhoff_stress(f, GrowthFactor(1.0), LameParams{}), SingularDeformation);
}

TEST(Stress, Examples) {
  EXPECT_TRUE(piola_kirchhoff_stress(Tensor2::Identity(), GrowthFactor(1.0), LameParams{}).isZero(0.0));

  // Hand evaluation: E = -0.375 I, tr E = -0.75, F = I, g = 2:
  // 2 mu / 2 * (-0.375) + lambda / 2 * (-0.75) = -3750 - 15000 on the diagonal.
  const Tensor2 s = piola_kirchhoff_stress(Tensor2::Identity(), GrowthFactor(2.0), LameParams{1e4, 4e4});
  EXPECT_DOUBLE_EQ(s(0, 0), -18750.0);
  EXPECT_DOUBLE_EQ(s(1, 1), -18750.0);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.0);

  Tensor2 f = Tensor2::Identity();
  f(0, 0) = 1.1;
  const Tensor2 s2 = piola_kirchhoff_stress(f, GrowthFactor(1.0), LameParams{1.0, 0.0});
  EXPECT_NEAR(s2(0, 0), 0.231, 1e-14);
  EXPECT_NEAR(s2(1, 1), 0.0, 1e-15);
}

TEST(LameParams, Validation) {
  EXPECT_NO_THROW((LameParams{1.0, 0.0}.validate()));
  EXPECT_THROW((LameParams{0.0, 1.0}.validate()), DomainError);
  EXPECT_THROW((LameParams{1.0, -1.0}.validate()), DomainError);
}

TEST(KinematicsProperty, StrainSymmetricAndGrowthAbsorbed) {
  oracle::Gen gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    Tensor2 f;
    do {
      f << gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2);
    } while (f.determinant() <= 1e-3);
    const GrowthFactor g(gen.uniform(1.0, 3.0));
    const Tensor2 e = elastic_strain(f, g);
    ASSERT_EQ(e(0, 1), e(1, 0));

    // Pure growth deformation F = g I leaves no elastic strain.
    const Tensor2 pure = elastic_strain(g.value() * Tensor2::Identity(), g);
    ASSERT_LT(pure.cwiseAbs().maxCoeff(), 1e-15);

    const LameParams lame{gen.uniform(0.1, 10.0), gen.uniform(0.0, 10.0)};
    ASSERT_TRUE(piola_kirchhoff_stress(Tensor2::Identity(), GrowthFactor(1.0), lame).isZero(0.0));

    // Two-term formula evaluated by hand.
    const Tensor2 ee = 0.5 * (f.transpose() * f / (g.value() * g.value()) - Tensor2::Identity());
    const Tensor2 ref = 2.0 * lame.mu / g.value() * f * ee + lame.lambda / g.value() * ee.trace() * f;
    ASSERT_LT((piola_kirchhoff_stress(f, g, lame) - ref).cwiseAbs().maxCoeff(),
              1e-12 * (1.0 + ref.cwiseAbs().maxCoeff()));
  }
}
