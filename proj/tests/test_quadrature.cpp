#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "levy_moments/levy_moments.hpp"
#include "oracles.hpp"

using namespace levy;

namespace {

const LevyModel B = LevyModel::brownian(1.0, 1.0);

double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// exp(x^2) erfc(x) without overflow for large x.
double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  double y = 1.0 / (x * x);
  return (1.0 - y / 2 + 3 * y * y / 4 - 15 * y * y * y / 8 + 105 * y * y * y * y / 16) / (x * std::sqrt(std::numbers::pi));
}

// P{X_t <= x} for lambda-rate compound Poisson with Exponential(1) jumps and drift c.
double cp_exp_cdf(double lambda, double c, double t, double x) {
  double lim = x - c * t;
  if (lim < 0) return 0.0;
  double p = std::exp(-lambda * t);
  double s = p;
  for (int k = 1; k < 400; ++k) {
    p *= lambda * t / k;
    s += p * boost::math::gamma_p(k, lim);
  }
  return s;
}

}  // namespace

TEST(MarginalCdf, Examples) {
  EXPECT_NEAR(marginal_cdf(B, 1.0, 1.0), 0.5, 1e-14);
  EXPECT_NEAR(marginal_cdf(B, 4.0, 0.0), Phi(-2.0), 1e-14);
  EXPECT_NEAR(marginal_cdf(B, 4.0, 0.0), 0.02275, 1e-5);
  EXPECT_NEAR(marginal_cdf(LevyModel::compound_poisson(1.0, ExponentialJumps{1.0, +1}), 1.0, 0.0), std::exp(-1.0),
              1e-14);
}

TEST(MarginalCdf, StableHalfIsLevyLaw) {
  LevyModel s = LevyModel::stable(0.5);
  for (double x : {0.05, 0.3, 1.0, 10.0}) EXPECT_NEAR(marginal_cdf(s, 1.0, x), std::erfc(0.5 / std::sqrt(x)), 1e-10);
  // Self-similarity: X_t has the law of t^2 X_1.
  EXPECT_NEAR(marginal_cdf(s, 2.0, 3.0), std::erfc(0.5 / std::sqrt(3.0 / 4.0)), 1e-10);
}

TEST(MarginalCdf, CompoundPoissonWithDriftMatchesGammaMixture) {
  LevyModel m = LevyModel::compound_poisson(1.0, ExponentialJumps{1.0, +1}, -0.5);
  for (double t : {0.5, 3.0, 20.0})
    for (double x : {-1.0, 0.0, 2.0}) {
      double ref = cp_exp_cdf(1.0, -0.5, t, x);
      EXPECT_NEAR(marginal_cdf(m, t, x), ref, 1e-12 + 1e-10 * ref) << t << " " << x;
    }
}

TEST(MarginalCdf, LatticeCompoundPoissonMatchesDoubleSum) {
  LevyModel m = LevyModel::compound_poisson(2.0, TwoPointMass{-1.0, 0.4, 1.0, 0.6});
  double t = 5.0, x = 1.0;
  double ref = 0.0;
  double lt = 2.0 * t;
  for (int n = 0; n < 120; ++n) {
    double pn = std::exp(-lt + n * std::log(lt) - std::lgamma(n + 1.0));
    for (int k = 0; k <= n; ++k) {
      // k up-jumps, n-k down-jumps.
      if (2 * k - n <= x) ref += pn * std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                                               k * std::log(0.6) + (n - k) * std::log(0.4));
    }
  }
  EXPECT_NEAR(marginal_cdf(m, t, x), ref, 1e-12);
}

TEST(MarginalCdf, DeepLowerTailStaysPositive) {
  double lp = marginal_log_cdf(B, 400.0, 0.0);
  EXPECT_TRUE(std::isfinite(lp));
  EXPECT_NEAR(lp, std::log(0.5 * erfcx(std::sqrt(200.0))) - 200.0, 1e-9);
}

TEST(Ua, BrownianMatchesDirectIntegral) {
  for (double r : {0.0, 2.0}) {
    double ref = oracle::integrate_half_line([&](double t) {
      if (t <= 0) return r >= 0 ? 1.0 : 0.0;
      return std::exp(0.375 * t + std::log(Phi((r - t) / std::sqrt(t))));
    });
    auto q = U_a(B, 0.375, r);
    ASSERT_EQ(q.verdict, QuadVerdict::Convergent);
    ASSERT_TRUE(q.value);
    EXPECT_NEAR(*q.value, ref, 1e-8 * ref + q.abs_err) << r;
    EXPECT_TRUE(q.tolerance_met);
  }
}

TEST(Ua, AsymptoticRegime) {
  auto q = U_a(B, 0.375, 20.0);
  ASSERT_TRUE(q.value);
  EXPECT_NEAR(*q.value * std::exp(-10.0), 4.0, 0.04);
}

TEST(Ua, MonotoneInLevel) {
  double prev = kInf;
  for (double r : {2.0, 0.0, -2.0, -5.0, -10.0}) {
    auto q = U_a(B, 0.375, r);
    ASSERT_TRUE(q.value);
    EXPECT_LT(*q.value, prev) << r;
    prev = *q.value;
  }
}

TEST(Ua, TighterToleranceStaysConsistent) {
  auto coarse = U_a(B, 0.2, 1.0, 1e-5);
  auto fine = U_a(B, 0.2, 1.0, 1e-10);
  ASSERT_TRUE(coarse.value && fine.value);
  EXPECT_LE(fine.abs_err, coarse.abs_err + 1e-12);
  EXPECT_NEAR(*coarse.value, *fine.value, coarse.abs_err + fine.abs_err);
}

TEST(Ua, DivergentBeyondR) {
  auto q = U_a(B, 0.6, 0.0);
  EXPECT_EQ(q.verdict, QuadVerdict::Divergent);
  EXPECT_FALSE(q.value);
  ASSERT_TRUE(q.witness);
  EXPECT_TRUE(q.witness->confirmed);
  EXPECT_GT(q.nodes_used, 0u);
}

TEST(Ua, SubordinatorIdentity) {
  // For a subordinator P{X_t <= r} = P{T_r > t}, so E[e^{aT_r}] = 1 + a U_a(r).
  auto q = U_a(LevyModel::stable(0.5), 1.0, 4.0);
  ASSERT_TRUE(q.value);
  EXPECT_NEAR(1.0 + *q.value, oracle::ml_half(2.0), 1e-6 * oracle::ml_half(2.0));
  auto cp = U_a(LevyModel::compound_poisson(2.0, ExponentialJumps{1.0, +1}), 1.0, 3.0);
  ASSERT_TRUE(cp.value);
  // T_r is the arrival of jump K+1 where K ~ Poisson(r) counts unit-rate points below r.
  double mgf = 0.0;
  for (int k = 0; k < 200; ++k) mgf += std::exp(-3.0 + k * std::log(3.0) - std::lgamma(k + 1.0)) * std::pow(2.0, k + 1);
  EXPECT_NEAR(1.0 + *cp.value, mgf, 1e-6 * mgf);
  auto neg = U_a(LevyModel::stable(0.5), 1.0, -1.0);
  ASSERT_TRUE(neg.value);
  EXPECT_EQ(*neg.value, 0.0);
}

TEST(Va, BoundaryConvergesAndMatchesOracle) {
  auto q = V_a(B, 0.5, 0.0);
  ASSERT_EQ(q.verdict, QuadVerdict::Convergent);
  ASSERT_TRUE(q.value);
  EXPECT_EQ(q.tail_method, "power_law");
  // e^{t/2} Phi(-sqrt t) = erfcx(sqrt(t/2)) / 2.
  boost::math::quadrature::exp_sinh<double> es;
  double ref = es.integrate([](double s) {
    double t = s + 1.0;
    return 0.5 * erfcx(std::sqrt(t / 2)) / t;
  }, 1e-12);
  EXPECT_NEAR(*q.value, ref, 1e-6 * ref);
}

TEST(Va, InteriorAndDivergent) {
  EXPECT_EQ(V_a(B, 0.375, 0.0).verdict, QuadVerdict::Convergent);
  EXPECT_EQ(V_a(B, 0.51, 0.0).verdict, QuadVerdict::Divergent);
  EXPECT_EQ(U_a(B, 0.5, 0.0).verdict, QuadVerdict::Divergent);
}

TEST(SkeletonSeries, DirectSummation) {
  double ref = 1.0;
  for (int n = 1; n < 1500; ++n) ref += std::exp(0.375 * n) * Phi(-n / std::sqrt(double(n)));
  auto u1 = U1_a(B, 0.375, 0.0);
  ASSERT_TRUE(u1.value);
  EXPECT_NEAR(*u1.value, ref, 1e-8 * ref + u1.abs_err);
}

TEST(SkeletonSeries, UpperDominatesLowerAndDivergence) {
  for (double r : {-1.0, 0.0, 1.5}) {
    auto u1 = U1_a(B, 0.3, r);
    auto v1 = V1_a(B, 0.3, r);
    ASSERT_TRUE(u1.value && v1.value);
    EXPECT_GE(*u1.value, *v1.value);
  }
  EXPECT_EQ(U1_a(B, 0.6, 0.0).verdict, QuadVerdict::Divergent);
  EXPECT_EQ(V1_a(B, 0.6, 0.0).verdict, QuadVerdict::Divergent);
}

TEST(SojournZero, Identity) {
  auto q = sojourn_zero_moment(B, 0.375);
  ASSERT_TRUE(q.value);
  EXPECT_NEAR(*q.value, 4.0 / 3.0, 1e-3);
  auto q2 = sojourn_zero_moment(LevyModel::brownian(2.0, 1.0), 1.0);
  ASSERT_TRUE(q2.value);
  EXPECT_NEAR(*q2.value, (2.0 - std::sqrt(2.0)) * 2.0, 1e-6);
  auto small = sojourn_zero_moment(B, 1e-6);
  ASSERT_TRUE(small.value);
  EXPECT_NEAR(*small.value, 1.0, 1e-5);
}

TEST(SojournZero, JumpDiffusionMatchesClosedForm) {
  LevyModel jd = LevyModel::jump_diffusion(1.0, 1.0, 1.0, ExponentialJumps{0.5, -1});
  double a = 0.5 * compute_R(jd);
  auto q = sojourn_zero_moment(jd, a);
  ASSERT_TRUE(q.value);
  double ref = specneg_N(jd, a, 0.0).value;
  EXPECT_NEAR(*q.value, ref, 1e-5 * ref);
}

TEST(Quadrature, RejectsBadArguments) {
  EXPECT_THROW(U_a(B, 0.3, 0.0, 0.0), Error);
  EXPECT_THROW(V_a(B, -0.3, 0.0), Error);
}
