#include <gtest/gtest.h>

#include <random>

#include "vemsad/constitutive/laws.hpp"
#include "vemsad/core/dual.hpp"

using namespace vemsad;
using namespace vemsad::constitutive;

TEST(Constitutive, ReconstructStress) {
  auto s = reconstruct_stress(Sym2<double>::identity(), 1.0, 1.0);
  EXPECT_EQ(s.xx, 1.0);
  EXPECT_EQ(s.xy, 0.0);
  EXPECT_EQ(s.yy, 1.0);
  auto z = reconstruct_stress(Sym2<double>{0, 0, 0}, 0.0, 5.0);
  EXPECT_EQ(frobenius(z), 0.0);
  auto t = reconstruct_stress(Sym2<double>{1, 2, 3}, 4.0, 10.0);
  EXPECT_EQ(t.xx, 16.0);
  EXPECT_EQ(t.xy, 40.0);
  EXPECT_EQ(t.yy, 56.0);
}

TEST(Constitutive, InverseExamples) {
  Sym2<double> s{0.3, -1.2, 2.0};
  auto a = eval_M_inverse(ExponentialLaw{2.0, 0.0}, s);
  EXPECT_DOUBLE_EQ(a.xx, 0.5);
  EXPECT_EQ(a.xy, 0.0);
  auto b = eval_M_inverse(ExponentialLaw{0.1, 1e-4}, Sym2<double>{1.0, 3.0, -1.0});
  EXPECT_NEAR(b.xx, 10.0, 1e-14);
  EXPECT_NEAR(b.yy, 10.0, 1e-14);
  auto c = eval_M_inverse(QuadraticLaw{1.0, 1.0}, Sym2<double>{1.0, 0.0, 0.0});
  EXPECT_NEAR(c.xx, 0.5, 1e-15);
  EXPECT_NEAR(c.yy, 1.0, 1e-15);
  EXPECT_EQ(c.xy, 0.0);
}

TEST(Constitutive, InverseTimesLawIsIdentity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<DiffusionLaw> laws{ExponentialLaw{0.1, 0.3}, QuadraticLaw{1e2, 1e-3}, PolynomialLaw{1.0, 0.2, 0.1}};
  for (const auto& law : laws)
    for (int t = 0; t < 200; ++t) {
      Sym2<double> s{u(rng), u(rng), u(rng)};
      Sym2<double> m = eval_M(law, s), mi = eval_M_inverse(law, s);
      EXPECT_NEAR(m.xx * mi.xx + m.xy * mi.xy, 1.0, 1e-13);
      EXPECT_NEAR(m.xx * mi.xy + m.xy * mi.yy, 0.0, 1e-13);
      EXPECT_NEAR(m.xy * mi.xx + m.yy * mi.xy, 0.0, 1e-13);
      EXPECT_NEAR(m.xy * mi.xy + m.yy * mi.yy, 1.0, 1e-13);
    }
}

TEST(Constitutive, ExponentialClosedForm) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  ExponentialLaw law{0.25, 0.01};
  for (int t = 0; t < 100; ++t) {
    Sym2<double> s{u(rng), u(rng), u(rng)};
    auto mi = eval_M_inverse(law, s);
    double expect = std::exp(law.m1 * s.trace()) / law.m0;
    EXPECT_EQ(mi.xx, expect);
    EXPECT_EQ(mi.yy, expect);
    EXPECT_EQ(mi.xy, 0.0);
    // the generic path through eval_M agrees
    auto generic = eval_M(DiffusionLaw(law), s).inverse();
    EXPECT_NEAR(generic.xx, expect, 1e-13 * expect);
  }
}

TEST(Constitutive, NonSpdIsReported) {
  // m0 I + m1 sigma with a large negative stress loses definiteness
  PolynomialLaw law{1.0, 1.0, 0.0};
  try {
    eval_M_inverse(law, Sym2<double>{-3.0, 0.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Constitutive);
    EXPECT_NE(std::string(e.what()).find("eigenvalues"), std::string::npos);
  }
  EXPECT_THROW(eval_M_inverse(ExponentialLaw{0.1, 1.0}, Sym2<double>{600.0, 0.0, 600.0}), Error);
}

TEST(Constitutive, ActiveStress) {
  EXPECT_EQ(eval_ell(HillLaw{1, 1, 2}, 0.0), 1.0);
  EXPECT_EQ(eval_ell(HillLaw{1, 1, 2}, 1.0), 1.5);
  EXPECT_EQ(eval_ell(LinearLaw{2}, 3.0), 6.0);
  // even exponent: defined for negative input
  EXPECT_NEAR(eval_ell(HillLaw{0, 2, 2}, -2.0), 4.0 / 6.0, 1e-15);
  // non-integer exponent goes through pow
  EXPECT_NEAR(eval_ell(HillLaw{0, 1, 0.5}, 4.0), 2.0 / 3.0, 1e-15);
  // dual numbers carry the derivative of the Hill law
  Dual<double> x(0.7);
  x.d[0] = 1.0;
  auto y = eval_ell(HillLaw{1, 1, 2}, x);
  double expect = 2 * 0.7 / std::pow(1 + 0.49, 2);
  EXPECT_NEAR(y.d[0], expect, 1e-14);
}

TEST(Constitutive, BoundEstimates) {
  std::vector<Sym2<double>> one{Sym2<double>{1.0, 2.0, -0.5}};
  EXPECT_NEAR(estimate_M_bound(ExponentialLaw{1.0, 0.0}, one, BoundNorm::Frobenius), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(estimate_M_bound(ExponentialLaw{1.0, 0.0}, one), 1.0, 1e-15);
  EXPECT_NEAR(estimate_M_bound(ExponentialLaw{0.1, 0.0}, one), 10.0, 1e-14);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<Sym2<double>> samples;
  for (int i = 0; i < 50; ++i) samples.push_back({u(rng), u(rng), u(rng)});
  std::vector<Sym2<double>> subset(samples.begin(), samples.begin() + 10);
  for (BoundNorm norm : {BoundNorm::Ellipticity, BoundNorm::Frobenius}) {
    DiffusionLaw law = QuadraticLaw{1.0, 0.5};
    EXPECT_LE(estimate_M_bound(law, subset, norm), estimate_M_bound(law, samples, norm));
  }
  EXPECT_THROW(estimate_M_bound(ExponentialLaw{}, {}), Error);
}

TEST(Constitutive, LipschitzSmoke) {
  HillLaw hill{1.0, 1.0, 2.0};
  double L = empirical_lipschitz(hill, -3.0, 3.0, 2000);
  // max of 2t/(1+t^2)^2 is 3 sqrt(3)/8 at t = 1/sqrt(3)
  EXPECT_NEAR(L, 3.0 * std::sqrt(3.0) / 8.0, 1e-3);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 500; ++t) {
    double a = u(rng), b = u(rng);
    EXPECT_LE(std::abs(eval_ell(hill, a) - eval_ell(hill, b)), (L + 1e-9) * std::abs(a - b));
  }
  EXPECT_NEAR(empirical_lipschitz(LinearLaw{2.5}, 0.0, 1.0), 2.5, 1e-12);
}

TEST(Constitutive, ParameterChecks) {
  PhysicalParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_TRUE(p.warnings().empty());
  p.theta = 2.0;  // above 1/M with M = 1
  EXPECT_EQ(p.warnings().size(), 1u);
  p.lambda = 0.5;
  EXPECT_EQ(p.warnings().size(), 2u);
  p.mu = 0.0;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_THROW(validate(DiffusionLaw(ExponentialLaw{0.0, 1.0})), Error);
  EXPECT_THROW(validate(ActiveStressLaw(HillLaw{1.0, 0.0, 2.0})), Error);
}
