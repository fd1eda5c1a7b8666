#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "levy_moments/model.hpp"

namespace levy {

enum class Verdict { Finite, Infinite };

inline const char* to_string(Verdict v) { return v == Verdict::Finite ? "Finite" : "Infinite"; }

// R = sup_{theta >= 0} -log E[exp(-theta X_1)] and an argmax (inf when not attained).
struct ExponentMaximum {
  double R = 0.0;
  double theta_star = 0.0;
};

namespace detail {

inline double neg_psi(const LevyModel& m, double theta) { return -log_laplace(m, theta); }
inline double neg_psi_slope(const LevyModel& m, double theta) { return -log_laplace_slope(m, theta); }

inline double effective_jump_rate(const LevyModel& m) {
  return m.has_jumps() ? m.jump_rate * (1.0 - law_zero_mass(m.jump_law)) : 0.0;
}

inline bool finite_activity_pure_jump(const LevyModel& m) {
  return m.family != Family::StableSubordinator && m.gaussian_var == 0.0 && m.drift == 0.0;
}

inline bool near_boundary(double a, double R) { return std::isfinite(R) && std::abs(a - R) <= 1e-12 * std::max(1.0, R); }

}  // namespace detail

inline ExponentMaximum maximize_exponent(const LevyModel& m) {
  validate(m);
  Classification c = classify(m);
  if (c.is_subordinator) {
    // -Psi(-theta) increases to its limit as theta -> inf.
    if (detail::finite_activity_pure_jump(m)) return {detail::effective_jump_rate(m), kInf};
    return {kInf, kInf};
  }
  if (mean(m) <= 0.0) return {0.0, 0.0};

  // Bracket the maximiser of the concave map, staying inside the domain.
  double edge = m.has_jumps() ? jump_domain_edge(m.jump_law) : kInf;
  double hi = std::isfinite(edge) ? 0.5 * edge : 1.0;
  int doublings = 0;
  while (detail::neg_psi_slope(m, hi) > 0.0) {
    if (std::isfinite(edge)) {
      hi = 0.5 * (hi + edge);
    } else {
      hi *= 2.0;
    }
    if (++doublings > 60) return {kInf, kInf};
  }

  // Golden-section search on [0, hi].
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, up = hi;
  double x1 = up - g * (up - lo), x2 = lo + g * (up - lo);
  double f1 = detail::neg_psi(m, x1), f2 = detail::neg_psi(m, x2);
  for (int i = 0; i < 200 && up - lo > 1e-15 * hi; ++i) {
    if (f1 < f2) {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + g * (up - lo);
      f2 = detail::neg_psi(m, x2);
    } else {
      up = x2; x2 = x1; f2 = f1;
      x1 = up - g * (up - lo);
      f1 = detail::neg_psi(m, x1);
    }
  }

  // Golden section only resolves the flat top to ~sqrt(eps); polish on the
  // sign of the analytic slope so that the slope at theta_star is ~0.
  double a = std::max(0.0, lo - 1e-6 * hi), b = std::min(hi, up + 1e-6 * hi);
  if (detail::neg_psi_slope(m, a) < 0.0 || detail::neg_psi_slope(m, b) > 0.0) {
    a = 0.0;
    b = hi;
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (detail::neg_psi_slope(m, mid) > 0.0)
      a = mid;
    else
      b = mid;
  }
  double ts = 0.5 * (a + b);
  return {detail::neg_psi(m, ts), ts};
}

inline double compute_R(const LevyModel& m) { return maximize_exponent(m).R; }

// Minimal theta >= 0 with -Psi(-theta) = rate, for 0 <= rate < sup. Works for
// subordinators as well (used by tail certificates).
inline double theta_for_rate(const LevyModel& m, double rate) {
  ExponentMaximum mx = maximize_exponent(m);
  require(rate >= 0.0, "rate must be >= 0");
  if (rate == 0.0) return 0.0;
  if (rate > mx.R) fail(ErrorCode::NoRoot, "rate exceeds R");
  if (detail::near_boundary(rate, mx.R)) {
    if (!std::isfinite(mx.theta_star)) fail(ErrorCode::NoRoot, "supremum not attained");
    return mx.theta_star;
  }
  double lo = 0.0, hi = mx.theta_star;
  if (!std::isfinite(hi)) {
    hi = 1.0;
    while (detail::neg_psi(m, hi) < rate) hi *= 2.0;
  }
  for (int i = 0; i < 300; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::neg_psi(m, mid) < rate)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

inline double solve_gamma(const LevyModel& m, double a) {
  validate(m);
  require(!std::isnan(a) && a > 0.0, "a must be > 0");
  if (!classify(m).p_neg_positive)
    fail(ErrorCode::Unsupported, "P{X_1 < 0} = 0: subordinator branch has no tilt");
  ExponentMaximum mx = maximize_exponent(m);
  if (a > mx.R && !detail::near_boundary(a, mx.R))
    fail(ErrorCode::NoRoot, "a > R: phi(theta) = exp(-a) has no root");
  return theta_for_rate(m, a);
}

// Largest root of -Psi(-theta) = rate beyond the argmax; inf if none.
inline double upper_root(const LevyModel& m, double rate) {
  ExponentMaximum mx = maximize_exponent(m);
  if (!std::isfinite(mx.theta_star)) return kInf;
  require(rate <= mx.R || detail::near_boundary(rate, mx.R), "rate exceeds R");
  if (detail::near_boundary(rate, mx.R)) return mx.theta_star;
  double edge = m.has_jumps() ? jump_domain_edge(m.jump_law) : kInf;
  double lo = mx.theta_star;
  double hi = std::max(1.0, 2.0 * lo);
  int guard = 0;
  while (true) {
    if (std::isfinite(edge) && hi >= edge) hi = 0.5 * (lo + edge);
    if (detail::neg_psi(m, hi) < rate) break;
    lo = hi;
    hi = std::isfinite(edge) ? 0.5 * (hi + edge) : 2.0 * hi;
    if (++guard > 200) return kInf;
  }
  for (int i = 0; i < 300; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::neg_psi(m, mid) >= rate)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Positive root of phi(theta) = 1 (Lundberg exponent of the downward tail).
inline double cramer_root(const LevyModel& m) {
  if (compute_R(m) <= 0.0) fail(ErrorCode::NoRoot, "E[X_1] <= 0: no positive root of phi = 1");
  return upper_root(m, 0.0);
}

// E[X_1 exp(-gamma X_1)] = -phi'(gamma).
inline double tilt_mean(const LevyModel& m, double gamma) {
  validate(m);
  require(!std::isnan(gamma), "gamma must not be NaN");
  if (gamma == 0.0) return mean(m);
  double lp = log_laplace(m, gamma);
  require(std::isfinite(lp), "gamma lies outside the finiteness domain of phi");
  return std::exp(lp) * detail::neg_psi_slope(m, gamma);
}

// Law of X under the measure with density exp(-gamma X_t + a t), a = -log phi(gamma).
inline LevyModel esscher(const LevyModel& m, double gamma) {
  validate(m);
  require(!std::isnan(gamma), "gamma must not be NaN");
  if (m.family == Family::StableSubordinator)
    fail(ErrorCode::Unsupported, "the tilted stable subordinator is tempered stable, outside the family set");
  require(std::isfinite(log_laplace(m, gamma)), "gamma lies outside the finiteness domain of phi");
  if (gamma == 0.0) return m;
  LevyModel out = m;
  out.drift = m.drift - gamma * m.gaussian_var;
  if (!m.has_jumps()) return out;
  out.jump_rate = m.jump_rate * jump_transform(m.jump_law, gamma);
  std::visit(
      [&](const auto& j) {
        using J = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<J, ExponentialJumps>) {
          out.jump_law = ExponentialJumps{j.mean / (1.0 + j.sign * gamma * j.mean), j.sign};
        } else if constexpr (std::is_same_v<J, TwoPointMass>) {
          double wm = j.p_minus * std::exp(-gamma * j.x_minus);
          double wp = j.p_plus * std::exp(-gamma * j.x_plus);
          double z = wm + wp;
          out.jump_law = TwoPointMass{j.x_minus, wm / z, j.x_plus, wp / z};
        } else if constexpr (std::is_same_v<J, ShiftedExponentialJumps>) {
          out.jump_law = ShiftedExponentialJumps{j.loc, j.mean / (1.0 + j.sign * gamma * j.mean), j.sign};
        }
      },
      m.jump_law);
  return out;
}

struct CriteriaReport {
  double a = 0.0;
  double R = 0.0;
  std::optional<double> gamma;
  std::optional<double> tilt_mean;
  Verdict verdict_T = Verdict::Infinite;
  Verdict verdict_N = Verdict::Infinite;
  Verdict verdict_rho = Verdict::Infinite;
  std::string governing_rule;
};

inline CriteriaReport check_finiteness(const LevyModel& m, double a) {
  validate(m);
  require(!std::isnan(a) && a > 0.0, "a must be > 0");
  require(!is_degenerate(m), "degenerate model X = 0 violates P{X_1 = 0} < 1");
  Classification c = classify(m);
  CriteriaReport rep;
  rep.a = a;
  ExponentMaximum mx = maximize_exponent(m);
  rep.R = mx.R;

  if (c.is_subordinator) {
    if (detail::finite_activity_pure_jump(m)) {
      Verdict v = a < mx.R ? Verdict::Finite : Verdict::Infinite;
      rep.verdict_T = rep.verdict_N = rep.verdict_rho = v;
      rep.governing_rule = v == Verdict::Finite ? "subordinator: a<lambda" : "subordinator: a>=lambda";
    } else {
      rep.verdict_T = rep.verdict_N = rep.verdict_rho = Verdict::Finite;
      rep.governing_rule = "subordinator: every a>0";
    }
    return rep;
  }

  bool boundary = detail::near_boundary(a, mx.R);
  if (a > mx.R && !boundary) {
    rep.governing_rule = "T,N: a>R; rho: a>R";
    return rep;
  }
  double g = solve_gamma(m, a);
  double tm = tilt_mean(m, g);
  rep.gamma = g;
  rep.tilt_mean = tm;
  rep.verdict_T = rep.verdict_N = Verdict::Finite;
  if (!boundary) {
    rep.verdict_rho = Verdict::Finite;
    rep.governing_rule = "T,N: a<=R; rho: a<R";
  } else {
    // At the argmax the analytic slope vanishes; a positive tilted mean can
    // only come from a one-sided derivative at the domain edge.
    double scale = std::exp(log_laplace(m, g)) * std::max(1.0, std::abs(mean(m)));
    bool positive = tm > 1e-9 * scale;
    rep.verdict_rho = positive ? Verdict::Finite : Verdict::Infinite;
    rep.governing_rule = positive ? "T,N: a<=R; rho: a=R & tilt_mean>0" : "T,N: a<=R; rho: a=R & tilt_mean<=0";
  }
  return rep;
}

}  // namespace levy
