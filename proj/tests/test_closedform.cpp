#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "levy_moments/levy_moments.hpp"
#include "oracles.hpp"

using namespace levy;

namespace {

const LevyModel B = LevyModel::brownian(1.0, 1.0);
const double e = std::numbers::e;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& err) {
    return err.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(SpecnegT, Brownian) {
  EXPECT_NEAR(specneg_T(B, 0.375, 2.0).value, e, 1e-12);
  EXPECT_EQ(specneg_T(B, 0.375, 0.0).value, 1.0);
  EXPECT_NEAR(specneg_T(B, 0.5, 1.0).value, e, 1e-6);
  EXPECT_EQ(specneg_T(B, 0.375, 2.0).formula_id, "specneg_T");
  EXPECT_EQ(code_of([&] { specneg_T(B, 0.6, 1.0); }), ErrorCode::NoRoot);
}

TEST(SpecnegT, MatchesPassageDensityOracle) {
  for (double a : {0.1, 0.375})
    for (double r : {0.5, 2.0}) {
      double q = oracle::laplace_moment(oracle::passage_density, 1.0, r, a);
      EXPECT_NEAR(specneg_T(B, a, r).value, q, 1e-8 * q);
    }
}

TEST(SpecnegN, Brownian) {
  EXPECT_NEAR(specneg_N(B, 0.375, 0.0).value, 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(specneg_N(B, 0.375, 2.0).value, 4.0 / 3.0 * e, 1e-11);
  EXPECT_NEAR(specneg_N(B, 1e-8, 0.0).value, 1.0, 1e-7);
}

TEST(SpecnegN, MatchesOccupationDensityOracle) {
  for (double r : {0.0, 1.0}) {
    double q = oracle::laplace_moment(oracle::occupation_density, 1.0, r, 0.375);
    EXPECT_NEAR(specneg_N(B, 0.375, r).value, q, 1e-7 * q);
  }
}

TEST(SpecnegRho, Brownian) {
  EXPECT_NEAR(specneg_rho(B, 0.375, 0.0).value, 2.0, 1e-12);
  EXPECT_NEAR(specneg_rho(B, 0.375, 2.0).value, 2.0 * e, 1e-11);
  EXPECT_EQ(code_of([&] { specneg_rho(B, 0.5, 0.0); }), ErrorCode::RhoInfinite);
}

TEST(SpecnegRho, MatchesLastExitDensityOracle) {
  for (double r : {0.0, 2.0}) {
    double q = oracle::laplace_moment(oracle::last_exit_density, 1.0, r, 0.375);
    EXPECT_NEAR(specneg_rho(B, 0.375, r).value, q, 1e-7 * q);
  }
}

TEST(Specneg, RejectsTwoSidedModels) {
  LevyModel jd = LevyModel::jump_diffusion(1.0, 1.0, 1.0, TwoPointMass{-1.0, 0.5, 1.0, 0.5});
  EXPECT_EQ(code_of([&] { specneg_T(jd, 0.1, 1.0); }), ErrorCode::NotSpectrallyNegative);
  EXPECT_EQ(code_of([&] { specneg_N(jd, 0.1, 1.0); }), ErrorCode::NotSpectrallyNegative);
}

TEST(InfTransform, Brownian) {
  // -I is exponential with rate 2 mu / sigma^2.
  EXPECT_NEAR(inf_transform(B, 0.5).value, 2.0 / 1.5, 1e-12);
  EXPECT_NEAR(inf_transform(B, 1e-9).value, 1.0, 1e-8);
  EXPECT_EQ(code_of([&] { inf_transform(B, 2.0); }), ErrorCode::TransformGEOne);
  EXPECT_NEAR(inf_transform(LevyModel::brownian(2.0, 1.0), 1.0).value, 4.0 / 3.0, 1e-12);
}

TEST(MittagLeffler, KnownValues) {
  EXPECT_EQ(mittag_leffler(0.3, 0.0), 1.0);
  EXPECT_NEAR(mittag_leffler(1.0, 0.7), std::exp(0.7), 1e-14);
  EXPECT_NEAR(mittag_leffler(0.5, 1.0), 5.00898, 1e-5);
  for (double z : {0.5, 1.0, 2.0, 3.0}) EXPECT_NEAR(mittag_leffler(0.5, z), oracle::ml_half(z), 1e-10 * oracle::ml_half(z));
}

TEST(StableMoment, HalfIndex) {
  EXPECT_NEAR(stable_T_moment(0.5, 1.0, 4.0).value, oracle::ml_half(2.0), 1e-9);
  EXPECT_NEAR(stable_T_moment(0.5, 1.0, 4.0).value, 108.94, 0.01);
  EXPECT_EQ(stable_T_moment(0.5, 0.0, 4.0).value, 1.0);
  EXPECT_EQ(stable_T_moment(0.5, 1.0, 0.0).value, 1.0);
}

TEST(CppBridge, Values) {
  EXPECT_NEAR(cpp_bridge(2.0, 0.5), std::log(4.0 / 3.0), 1e-15);
  EXPECT_NEAR(cpp_bridge(2.0, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(cpp_bridge(2.0, 1e-12), 0.0, 1e-11);
  EXPECT_NEAR(cpp_bridge_inv(2.0, cpp_bridge(2.0, 0.7)), 0.7, 1e-14);
  EXPECT_THROW(cpp_bridge(2.0, 2.0), Error);
}

TEST(AsymptoticConstants, Brownian) {
  EXPECT_NEAR(asymptotic_constant_ua(B, 0.375), 4.0, 1e-10);
  EXPECT_NEAR(asymptotic_constant_rho(B, 0.375), 2.0, 1e-10);
  EXPECT_EQ(asymptotic_constant_T(B, 0.375), 1.0);
  EXPECT_EQ(asymptotic_constant_T(LevyModel::brownian(2.0, 1.0), 1.0), 1.0);
  EXPECT_EQ(code_of([&] { asymptotic_constant_ua(B, 0.5); }), ErrorCode::CriterionFails);
  EXPECT_EQ(code_of([&] { asymptotic_constant_rho(B, 0.5); }), ErrorCode::CriterionFails);
}

TEST(AsymptoticConstants, RhoConstantEqualsRhoAtZero) {
  LevyModel jd = LevyModel::jump_diffusion(1.0, 1.0, 1.0, ExponentialJumps{0.5, -1});
  double R = compute_R(jd);
  for (double a : {0.2 * R, 0.8 * R}) {
    double c = asymptotic_constant_rho(jd, a);
    EXPECT_NEAR(c, specneg_rho(jd, a, 0.0).value, 1e-9 * c);
  }
  double u = asymptotic_constant_ua(jd, 0.1 * R);
  EXPECT_TRUE(std::isfinite(u));
  EXPECT_GT(u, 0.0);
}

TEST(AsymptoticConstants, Exclusions) {
  LevyModel cp = LevyModel::compound_poisson(2.0, TwoPointMass{-1.0, 0.4, 1.0, 0.6});
  EXPECT_EQ(code_of([&] { asymptotic_constant_T(cp, 0.01); }), ErrorCode::NotSpectrallyNegative);
  EXPECT_EQ(code_of([&] { asymptotic_constant_ua(cp, 0.01); }), ErrorCode::LatticeExcluded);
}

TEST(BrownianDensities, Normalized) {
  for (double r : {0.5, 1.0, 2.0}) {
    double mass = oracle::integrate_half_line([&](double y) { return y > 0 ? bm_T_density(1.0, r, y) : 0.0; });
    EXPECT_NEAR(mass, 1.0, 1e-9);
  }
  double rho_mass = oracle::integrate_half_line([](double y) { return y > 0 ? bm_rho_density(1.0, 0.0, y) : 0.0; });
  EXPECT_NEAR(rho_mass, 1.0, 1e-9);
}

TEST(BrownianDensities, MomentsMatchClosedForms) {
  double t = oracle::integrate_half_line(
      [](double y) { return y > 0 && y < 2000 ? std::exp(0.375 * y) * bm_T_density(1.0, 2.0, y) : 0.0; });
  EXPECT_NEAR(t, e, 1e-8);
  double rho = oracle::integrate_half_line(
      [](double y) { return y > 0 && y < 2000 ? std::exp(0.375 * y) * bm_rho_density(1.0, 0.0, y) : 0.0; });
  EXPECT_NEAR(rho, 2.0, 1e-8);
  for (double y : {0.1, 1.0, 7.0}) EXPECT_NEAR(bm_T_density(1.0, 2.0, y), oracle::passage_density(1.0, 2.0, y), 1e-14);
}
