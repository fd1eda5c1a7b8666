#include <gtest/gtest.h>

#include <cmath>

#include "levy_moments/levy_moments.hpp"

using namespace levy;

namespace {

const LevyModel B = LevyModel::brownian(1.0, 1.0);

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ComputeR, ReferenceModels) {
  EXPECT_NEAR(compute_R(B), 0.5, 1e-10);
  EXPECT_NEAR(compute_R(LevyModel::compound_poisson(2.0, ExponentialJumps{1.0, +1})), 2.0, 1e-10);
  EXPECT_TRUE(std::isinf(compute_R(LevyModel::stable(0.5))));
}

TEST(ComputeR, BrownianClosedForm) {
  for (double mu : {0.3, 1.0, 2.5})
    for (double s2 : {0.5, 1.0, 4.0}) EXPECT_NEAR(compute_R(LevyModel::brownian(mu, s2)), mu * mu / (2 * s2), 1e-10);
}

TEST(ComputeR, JumpDiffusionIsMaxOfExponent) {
  LevyModel jd = LevyModel::jump_diffusion(1.0, 1.0, 1.0, TwoPointMass{-1.0, 0.5, 1.0, 0.5});
  double R = compute_R(jd);
  double best = 0.0;
  for (double th = 0.0; th <= 2.0; th += 1e-5) best = std::max(best, -log_laplace(jd, th));
  EXPECT_NEAR(R, best, 1e-9);
  EXPECT_NEAR(R, 0.2475, 1e-4);
}

TEST(SolveGamma, Brownian) {
  EXPECT_NEAR(solve_gamma(B, 0.375), 0.5, 1e-10);
  EXPECT_NEAR(solve_gamma(B, 0.5), 1.0, 1e-6);
  EXPECT_EQ(code_of([&] { solve_gamma(B, 0.6); }), ErrorCode::NoRoot);
}

TEST(SolveGamma, ClosedFormAcrossA) {
  for (double a : {0.01, 0.1, 0.2, 0.45}) EXPECT_NEAR(solve_gamma(B, a), 1.0 - std::sqrt(1.0 - 2 * a), 1e-10);
}

TEST(TiltMean, Brownian) {
  EXPECT_NEAR(tilt_mean(B, 0.5), 0.5 * std::exp(-0.375), 1e-12);
  EXPECT_NEAR(tilt_mean(B, 0.5), 0.343645, 1e-6);
  EXPECT_NEAR(tilt_mean(B, 1.0), 0.0, 1e-14);
  LevyModel cp = LevyModel::compound_poisson(1.0, ShiftedExponentialJumps{-0.5, 1.0, +1});
  EXPECT_NEAR(tilt_mean(cp, 1e-9), mean(cp), 1e-7);
}

TEST(Esscher, BrownianShiftsDrift) {
  LevyModel t = esscher(B, 0.5);
  EXPECT_EQ(t.family, Family::BrownianDrift);
  EXPECT_NEAR(t.drift, 0.5, 1e-15);
  EXPECT_NEAR(t.gaussian_var, 1.0, 1e-15);
  EXPECT_EQ(esscher(B, 0.0), B);
}

TEST(Esscher, TwoPointReweighting) {
  LevyModel m = LevyModel::compound_poisson(1.0, TwoPointMass{-1.0, 0.5, 1.0, 0.5});
  LevyModel t = esscher(m, std::log(2.0));
  auto tp = std::get<TwoPointMass>(t.jump_law);
  EXPECT_NEAR(t.jump_rate, 1.25, 1e-14);
  EXPECT_NEAR(tp.p_minus, 0.8, 1e-14);
  EXPECT_NEAR(tp.p_plus, 0.2, 1e-14);
}

TEST(Esscher, TiltedExponentIsShifted) {
  // log E_gamma[exp(-theta X_1)] = a + log phi(gamma + theta).
  LevyModel jd = LevyModel::jump_diffusion(1.0, 1.0, 1.0, ExponentialJumps{0.5, -1});
  double a = 0.5 * compute_R(jd);
  double g = solve_gamma(jd, a);
  LevyModel t = esscher(jd, g);
  for (double th : {0.1, 0.4}) EXPECT_NEAR(log_laplace(t, th), a + log_laplace(jd, g + th), 1e-12);
}

TEST(CheckFiniteness, BrownianBoundary) {
  auto rep = check_finiteness(B, 0.5);
  EXPECT_EQ(rep.verdict_T, Verdict::Finite);
  EXPECT_EQ(rep.verdict_N, Verdict::Finite);
  EXPECT_EQ(rep.verdict_rho, Verdict::Infinite);
  auto inside = check_finiteness(B, 0.375);
  EXPECT_EQ(inside.verdict_rho, Verdict::Finite);
  auto outside = check_finiteness(B, 0.6);
  EXPECT_EQ(outside.verdict_T, Verdict::Infinite);
}

TEST(CheckFiniteness, Subordinators) {
  auto cp = check_finiteness(LevyModel::compound_poisson(2.0, ExponentialJumps{1.0, +1}), 2.0);
  EXPECT_EQ(cp.verdict_T, Verdict::Infinite);
  EXPECT_EQ(cp.verdict_N, Verdict::Infinite);
  EXPECT_EQ(cp.verdict_rho, Verdict::Infinite);
  auto st = check_finiteness(LevyModel::stable(0.5), 10.0);
  EXPECT_EQ(st.verdict_T, Verdict::Finite);
  EXPECT_EQ(st.verdict_N, Verdict::Finite);
  EXPECT_EQ(st.verdict_rho, Verdict::Finite);
}

TEST(CheckFiniteness, RejectsBadArguments) {
  EXPECT_EQ(code_of([&] { check_finiteness(B, 0.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { check_finiteness(LevyModel::brownian(0.0, 0.0), 0.1); }), ErrorCode::InvalidArgument);
}
