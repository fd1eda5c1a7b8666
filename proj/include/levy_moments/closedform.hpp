#pragma once

#include <cmath>
#include <map>
#include <string>

#include "levy_moments/criteria.hpp"
#include "levy_moments/model_json.hpp"

namespace levy {

struct FormulaInputs {
  std::map<std::string, double> params;
  std::string model_hash;  // empty when the formula takes no model
};

struct ClosedForm {
  double value = 0.0;
  std::string formula_id;
  FormulaInputs inputs;
};

namespace detail {

inline void require_specneg(const LevyModel& m) {
  if (!classify(m).is_spectrally_negative)
    fail(ErrorCode::NotSpectrallyNegative, "closed form needs a spectrally negative model");
}

inline double gamma_or_fail(const LevyModel& m, double a) {
  require(!std::isnan(a) && a > 0.0, "a must be > 0");
  ExponentMaximum mx = maximize_exponent(m);
  if (a > mx.R && !near_boundary(a, mx.R))
    fail(ErrorCode::NoRoot, "a > R: moment infinite (first passage criterion a <= R fails)");
  return solve_gamma(m, a);
}

inline ClosedForm make_form(double value, const char* id, const LevyModel* m,
                            std::map<std::string, double> params) {
  ClosedForm cf;
  cf.value = value;
  cf.formula_id = id;
  cf.inputs.params = std::move(params);
  if (m) cf.inputs.model_hash = model_hash(*m);
  return cf;
}

}  // namespace detail

inline ClosedForm specneg_T(const LevyModel& m, double a, double r) {
  detail::require_specneg(m);
  require(!std::isnan(r) && r >= 0.0, "r must be >= 0");
  double g = detail::gamma_or_fail(m, a);
  return detail::make_form(std::exp(g * r), "specneg_T", &m, {{"a", a}, {"r", r}});
}

inline ClosedForm specneg_N(const LevyModel& m, double a, double r) {
  detail::require_specneg(m);
  require(!std::isnan(r) && r >= 0.0, "r must be >= 0");
  double mu = mean(m);
  if (!std::isfinite(mu)) fail(ErrorCode::MeanInfinite, "E[X_1] is infinite");
  double g = detail::gamma_or_fail(m, a);
  return detail::make_form(std::exp(g * r) * g * mu / a, "specneg_N", &m, {{"a", a}, {"r", r}});
}

inline ClosedForm specneg_rho(const LevyModel& m, double a, double r) {
  detail::require_specneg(m);
  require(!std::isnan(r) && r >= 0.0, "r must be >= 0");
  double mu = mean(m);
  if (!std::isfinite(mu)) fail(ErrorCode::MeanInfinite, "E[X_1] is infinite");
  CriteriaReport rep = check_finiteness(m, a);
  if (!rep.gamma) fail(ErrorCode::NoRoot, "a > R: moment infinite (first passage criterion a <= R fails)");
  if (rep.verdict_rho == Verdict::Infinite)
    fail(ErrorCode::RhoInfinite, "a = R and E[X_1 exp(-gamma X_1)] <= 0: last exit moment infinite");
  double g = *rep.gamma;
  double v = std::exp(g * r) * std::exp(-a) * mu / *rep.tilt_mean;
  return detail::make_form(v, "specneg_rho", &m, {{"a", a}, {"r", r}});
}

// E[exp(-theta I)], I the overall infimum.
inline ClosedForm inf_transform(const LevyModel& m, double theta) {
  detail::require_specneg(m);
  require(!std::isnan(theta) && theta >= 0.0, "theta must be >= 0");
  if (theta == 0.0) return detail::make_form(1.0, "inf_transform", &m, {{"theta", theta}});
  double lp = log_laplace(m, theta);
  if (!(lp < 0.0)) fail(ErrorCode::TransformGEOne, "phi(theta) >= 1: E[exp(-theta I)] infinite");
  double mu = mean(m);
  return detail::make_form(theta * mu / (-lp), "inf_transform", &m, {{"theta", theta}});
}

inline double mittag_leffler(double alpha, double z) {
  require(!std::isnan(alpha) && alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0,1]");
  require(!std::isnan(z) && z >= 0.0, "z must be >= 0");
  if (z == 0.0) return 1.0;
  double sum = 1.0;
  double prev = 1.0;
  double lz = std::log(z);
  for (int n = 1; n < 100000; ++n) {
    double arg = 1.0 + n * alpha;
    double term = arg < 170.0 ? std::pow(z, n) / std::tgamma(arg) : std::exp(n * lz - std::lgamma(arg));
    sum += term;
    if (term < prev && term < 1e-16 * sum) break;
    prev = term;
  }
  return sum;
}

inline ClosedForm stable_T_moment(double alpha, double a, double r) {
  require(!std::isnan(alpha) && alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  require(!std::isnan(a) && a >= 0.0, "a must be >= 0");
  require(!std::isnan(r) && r >= 0.0, "r must be >= 0");
  double v = mittag_leffler(alpha, a * std::pow(r, alpha));
  return detail::make_form(v, "ml_stable", nullptr, {{"alpha", alpha}, {"a", a}, {"r", r}});
}

// exp(b) = lambda / (lambda - a).
inline double cpp_bridge(double lambda, double a) {
  require(!std::isnan(lambda) && lambda > 0.0, "lambda must be > 0");
  require(!std::isnan(a) && a > 0.0, "a must be > 0");
  require(a < lambda, "a >= lambda: moment infinite (a < lambda is necessary)");
  return -std::log1p(-a / lambda);
}

inline double cpp_bridge_inv(double lambda, double b) {
  require(!std::isnan(lambda) && lambda > 0.0, "lambda must be > 0");
  require(!std::isnan(b) && b > 0.0, "b must be > 0");
  return -lambda * std::expm1(-b);
}

namespace detail {

// gamma and tilt_mean for the asymptotic constants, with their admissibility checks.
inline std::pair<double, double> asymptotic_inputs(const LevyModel& m, double a) {
  Classification c = classify(m);
  if (c.is_lattice) fail(ErrorCode::LatticeExcluded, "lattice models are excluded from the asymptotics");
  if (c.is_compound_poisson) fail(ErrorCode::Unsupported, "compound Poisson models are excluded from the asymptotics");
  if (c.is_subordinator) fail(ErrorCode::Unsupported, "subordinators have no tilt");
  CriteriaReport rep = check_finiteness(m, a);
  if (rep.verdict_rho == Verdict::Infinite)
    fail(ErrorCode::CriterionFails, "last exit criterion fails (need a < R, or a = R and E[X_1 exp(-gamma X_1)] > 0)");
  return {*rep.gamma, *rep.tilt_mean};
}

}  // namespace detail

// lim exp(-gamma r) U_a(r).
inline double asymptotic_constant_ua(const LevyModel& m, double a) {
  auto [g, tm] = detail::asymptotic_inputs(m, a);
  return std::exp(-a) / (g * tm);
}

inline double asymptotic_constant_T(const LevyModel& m, double a) {
  detail::require_specneg(m);
  CriteriaReport rep = check_finiteness(m, a);
  if (rep.verdict_T == Verdict::Infinite) fail(ErrorCode::CriterionFails, "a > R: first passage moment infinite");
  return 1.0;
}

// Brownian motion with drift mu and unit variance.
inline double bm_T_density(double mu, double r, double y) {
  require(mu > 0.0, "mu must be > 0");
  require(r > 0.0, "r must be > 0");
  require(y > 0.0, "y must be > 0");
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  return r * inv_sqrt_2pi * std::exp(mu * r - 0.5 * mu * mu * y - r * r / (2.0 * y) - 1.5 * std::log(y));
}

inline double bm_rho_density(double mu, double r, double y) {
  require(mu > 0.0, "mu must be > 0");
  require(r >= 0.0, "r must be >= 0");
  require(y > 0.0, "y must be > 0");
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  return mu * inv_sqrt_2pi * std::exp(mu * r - 0.5 * mu * mu * y - r * r / (2.0 * y) - 0.5 * std::log(y));
}

}  // namespace levy
