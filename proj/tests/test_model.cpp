#include <gtest/gtest.h>

#include <cmath>

#include "levy_moments/levy_moments.hpp"

using namespace levy;

namespace {

const LevyModel B = LevyModel::brownian(1.0, 1.0);
const LevyModel CPexp = LevyModel::compound_poisson(2.0, ExponentialJumps{1.0, +1});
const LevyModel Stable = LevyModel::stable(0.5);

}  // namespace

TEST(LaplaceExponent, BrownianAtOne) {
  auto rep = laplace_exponent(B, 1.0);
  EXPECT_NEAR(rep.psi_neg, -0.5, 1e-15);
  EXPECT_NEAR(rep.phi, std::exp(-0.5), 1e-15);
  EXPECT_TRUE(rep.finite);
}

TEST(LaplaceExponent, ZeroThetaIsZero) {
  for (const auto& m : {B, CPexp, Stable}) {
    auto rep = laplace_exponent(m, 0.0);
    EXPECT_EQ(rep.psi_neg, 0.0);
    EXPECT_EQ(rep.phi, 1.0);
  }
}

TEST(LaplaceExponent, CompoundPoissonExponentialJumps) {
  EXPECT_NEAR(laplace_exponent(CPexp, 1.0).psi_neg, -1.0, 1e-15);
}

TEST(LaplaceExponent, OutsideDomainIsInfinite) {
  LevyModel m = LevyModel::jump_diffusion(1.0, 1.0, 1.0, ExponentialJumps{0.5, -1});
  auto rep = laplace_exponent(m, 3.0);
  EXPECT_FALSE(rep.finite);
  EXPECT_TRUE(std::isinf(rep.phi));
}

TEST(LaplaceExponent, RejectsNegativeTheta) {
  EXPECT_THROW(laplace_exponent(B, -1.0), Error);
  EXPECT_THROW(laplace_exponent(B, std::nan("")), Error);
}

TEST(LaplaceExponent, SlopeMatchesFiniteDifference) {
  LevyModel jd = LevyModel::jump_diffusion(1.0, 1.0, 1.0, TwoPointMass{-1.0, 0.5, 1.0, 0.5});
  for (double th : {0.1, 0.5, 1.3}) {
    double h = 1e-6;
    double fd = (log_laplace(jd, th + h) - log_laplace(jd, th - h)) / (2 * h);
    EXPECT_NEAR(log_laplace_slope(jd, th), fd, 1e-7);
  }
}

TEST(Classify, StableSubordinator) {
  auto c = classify(Stable);
  EXPECT_TRUE(c.is_subordinator);
  EXPECT_FALSE(c.p_neg_positive);
}

TEST(Classify, Brownian) {
  auto c = classify(B);
  EXPECT_TRUE(c.is_spectrally_negative);
  EXPECT_TRUE(c.p_neg_positive);
  EXPECT_FALSE(c.is_subordinator);
}

TEST(Classify, LatticeCompoundPoisson) {
  auto c = classify(LevyModel::compound_poisson(2.0, TwoPointMass{-1.0, 0.5, 1.0, 0.5}));
  EXPECT_TRUE(c.is_compound_poisson);
  EXPECT_TRUE(c.is_lattice);
  EXPECT_FALSE(classify(LevyModel::compound_poisson(2.0, TwoPointMass{-1.0, 0.5, std::sqrt(2.0), 0.5})).is_lattice);
}

TEST(Mean, Families) {
  EXPECT_EQ(mean(B), 1.0);
  EXPECT_NEAR(mean(CPexp), 2.0, 1e-15);
  EXPECT_TRUE(std::isinf(mean(Stable)));
}

TEST(ModelJson, RoundTrip) {
  std::vector<LevyModel> ms = {B, CPexp, Stable,
                               LevyModel::jump_diffusion(1.0, 1.0, 1.0, TwoPointMass{-1.0, 0.5, 1.0, 0.5}),
                               LevyModel::compound_poisson(1.0, ShiftedExponentialJumps{0.5, 2.0, -1}, 0.25)};
  for (const auto& m : ms) {
    LevyModel back = parse_model(serialize_model(m));
    EXPECT_EQ(back, m);
    EXPECT_EQ(model_hash(back), model_hash(m));
  }
  EXPECT_NE(model_hash(B), model_hash(CPexp));
}

TEST(ModelJson, RejectsBadInput) {
  EXPECT_THROW(parse_model("{not json"), Error);
  EXPECT_THROW(parse_model(R"({"family":"Nope"})"), Error);
  EXPECT_THROW(parse_model(R"({"family":"BrownianDrift","gaussian_var":-1})"), Error);
  EXPECT_THROW(parse_model(R"({"family":"StableSubordinator","stable_index":1.5})"), Error);
  EXPECT_THROW(parse_model(R"({"family":"CompoundPoisson","jump_rate":1,
    "jump_law":{"type":"TwoPointMass","x_minus":-1,"p_minus":0.3,"x_plus":1,"p_plus":0.3}})"),
               Error);
}

TEST(ModelJson, LoadsShippedModels) {
  for (const char* f : {"brownian", "bridge", "bridge_finite", "cp_subordinator", "jump_diffusion", "overshoot_cp",
                        "stable"}) {
    EXPECT_NO_THROW(load_model(std::string(LEVY_MODELS_DIR) + "/" + f + ".json")) << f;
  }
}
