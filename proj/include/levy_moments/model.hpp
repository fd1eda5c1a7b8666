#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "levy_moments/error.hpp"

namespace levy {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Family { BrownianDrift, CompoundPoisson, JumpDiffusion, StableSubordinator };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::BrownianDrift: return "BrownianDrift";
    case Family::CompoundPoisson: return "CompoundPoisson";
    case Family::JumpDiffusion: return "JumpDiffusion";
    case Family::StableSubordinator: return "StableSubordinator";
  }
  return "?";
}

struct NoJumps {
  bool operator==(const NoJumps&) const = default;
};

// Y = sign * E with E exponential of the given mean.
struct ExponentialJumps {
  double mean = 1.0;
  int sign = +1;
  bool operator==(const ExponentialJumps&) const = default;
};

struct TwoPointMass {
  double x_minus = -1.0;
  double p_minus = 0.5;
  double x_plus = 1.0;
  double p_plus = 0.5;
  bool operator==(const TwoPointMass&) const = default;
};

// Y = loc + sign * E.
struct ShiftedExponentialJumps {
  double loc = 0.0;
  double mean = 1.0;
  int sign = +1;
  bool operator==(const ShiftedExponentialJumps&) const = default;
};

using JumpLaw = std::variant<NoJumps, ExponentialJumps, TwoPointMass, ShiftedExponentialJumps>;

// Parameters are in actual-drift form: for finite activity, drift is the slope
// of the path between jumps.
struct LevyModel {
  Family family = Family::BrownianDrift;
  double drift = 0.0;
  double gaussian_var = 0.0;
  double jump_rate = 0.0;
  JumpLaw jump_law = NoJumps{};
  double stable_index = 0.5;

  bool operator==(const LevyModel&) const = default;

  static LevyModel brownian(double mu, double sigma2) {
    LevyModel m;
    m.family = Family::BrownianDrift;
    m.drift = mu;
    m.gaussian_var = sigma2;
    return m;
  }

  static LevyModel compound_poisson(double lambda, JumpLaw law, double drift = 0.0) {
    LevyModel m;
    m.family = Family::CompoundPoisson;
    m.drift = drift;
    m.jump_rate = lambda;
    m.jump_law = law;
    return m;
  }

  static LevyModel jump_diffusion(double mu, double sigma2, double lambda, JumpLaw law) {
    LevyModel m;
    m.family = Family::JumpDiffusion;
    m.drift = mu;
    m.gaussian_var = sigma2;
    m.jump_rate = lambda;
    m.jump_law = law;
    return m;
  }

  static LevyModel stable(double alpha, double drift = 0.0) {
    LevyModel m;
    m.family = Family::StableSubordinator;
    m.drift = drift;
    m.stable_index = alpha;
    return m;
  }

  bool has_jumps() const {
    return jump_rate > 0.0 && !std::holds_alternative<NoJumps>(jump_law);
  }
};

namespace detail {

inline bool finite_num(double v) { return !std::isnan(v) && std::isfinite(v); }

inline void validate_law(const JumpLaw& law) {
  std::visit(
      [](const auto& j) {
        using J = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<J, ExponentialJumps>) {
          require(finite_num(j.mean) && j.mean > 0.0, "exponential jump mean must be positive");
          require(j.sign == 1 || j.sign == -1, "exponential jump sign must be +1 or -1");
        } else if constexpr (std::is_same_v<J, TwoPointMass>) {
          require(finite_num(j.x_minus) && finite_num(j.x_plus), "atoms must be finite");
          require(finite_num(j.p_minus) && finite_num(j.p_plus), "atom probabilities must be finite");
          require(j.p_minus >= 0.0 && j.p_plus >= 0.0, "atom probabilities must be nonnegative");
          require(std::abs(j.p_minus + j.p_plus - 1.0) <= 1e-12, "atom probabilities must sum to 1");
        } else if constexpr (std::is_same_v<J, ShiftedExponentialJumps>) {
          require(finite_num(j.loc), "shift must be finite");
          require(finite_num(j.mean) && j.mean > 0.0, "exponential jump mean must be positive");
          require(j.sign == 1 || j.sign == -1, "exponential jump sign must be +1 or -1");
        }
      },
      law);
}

}  // namespace detail

inline void validate(const LevyModel& m) {
  require(detail::finite_num(m.drift), "drift must be finite");
  require(detail::finite_num(m.gaussian_var) && m.gaussian_var >= 0.0, "gaussian_var must be >= 0");
  require(detail::finite_num(m.jump_rate) && m.jump_rate >= 0.0, "jump_rate must be >= 0");
  detail::validate_law(m.jump_law);
  switch (m.family) {
    case Family::BrownianDrift:
      require(m.jump_rate == 0.0, "BrownianDrift has jump_rate = 0");
      require(std::holds_alternative<NoJumps>(m.jump_law), "BrownianDrift has no jump law");
      break;
    case Family::CompoundPoisson:
      require(m.gaussian_var == 0.0, "CompoundPoisson has gaussian_var = 0");
      require(m.jump_rate > 0.0, "CompoundPoisson needs jump_rate > 0");
      require(!std::holds_alternative<NoJumps>(m.jump_law), "CompoundPoisson needs a jump law");
      break;
    case Family::JumpDiffusion:
      if (m.jump_rate > 0.0)
        require(!std::holds_alternative<NoJumps>(m.jump_law), "jump_rate > 0 needs a jump law");
      break;
    case Family::StableSubordinator:
      require(detail::finite_num(m.stable_index) && m.stable_index > 0.0 && m.stable_index < 1.0,
              "stable_index must lie in (0,1)");
      require(m.gaussian_var == 0.0, "StableSubordinator has gaussian_var = 0");
      require(m.drift >= 0.0, "StableSubordinator has drift >= 0");
      require(m.jump_rate == 0.0, "StableSubordinator carries no compound Poisson part");
      break;
  }
}

// E[exp(-theta Y)] for the jump law; +inf outside the domain. Any real theta.
inline double jump_transform(const JumpLaw& law, double theta) {
  return std::visit(
      [theta](const auto& j) -> double {
        using J = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<J, NoJumps>) {
          return 1.0;
        } else if constexpr (std::is_same_v<J, ExponentialJumps>) {
          double d = 1.0 + j.sign * theta * j.mean;
          return d > 0.0 ? 1.0 / d : kInf;
        } else if constexpr (std::is_same_v<J, TwoPointMass>) {
          double v = 0.0;
          if (j.p_minus > 0.0) v += j.p_minus * std::exp(-theta * j.x_minus);
          if (j.p_plus > 0.0) v += j.p_plus * std::exp(-theta * j.x_plus);
          return v;
        } else {
          double d = 1.0 + j.sign * theta * j.mean;
          return d > 0.0 ? std::exp(-theta * j.loc) / d : kInf;
        }
      },
      law);
}

// E[Y exp(-theta Y)]; only meaningful where jump_transform is finite.
inline double jump_weighted_mean(const JumpLaw& law, double theta) {
  return std::visit(
      [theta](const auto& j) -> double {
        using J = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<J, NoJumps>) {
          return 0.0;
        } else if constexpr (std::is_same_v<J, ExponentialJumps>) {
          double d = 1.0 + j.sign * theta * j.mean;
          return d > 0.0 ? j.sign * j.mean / (d * d) : kInf * j.sign;
        } else if constexpr (std::is_same_v<J, TwoPointMass>) {
          double v = 0.0;
          if (j.p_minus > 0.0) v += j.p_minus * j.x_minus * std::exp(-theta * j.x_minus);
          if (j.p_plus > 0.0) v += j.p_plus * j.x_plus * std::exp(-theta * j.x_plus);
          return v;
        } else {
          double d = 1.0 + j.sign * theta * j.mean;
          if (d <= 0.0) return kInf * j.sign;
          return std::exp(-theta * j.loc) * (j.loc / d + j.sign * j.mean / (d * d));
        }
      },
      law);
}

// Supremum of the finiteness domain of theta -> E[exp(-theta Y)] on theta >= 0.
inline double jump_domain_edge(const JumpLaw& law) {
  if (auto* e = std::get_if<ExponentialJumps>(&law)) return e->sign < 0 ? 1.0 / e->mean : kInf;
  if (auto* s = std::get_if<ShiftedExponentialJumps>(&law)) return s->sign < 0 ? 1.0 / s->mean : kInf;
  return kInf;
}

inline bool law_has_negative_jumps(const JumpLaw& law) {
  if (auto* e = std::get_if<ExponentialJumps>(&law)) return e->sign < 0;
  if (auto* t = std::get_if<TwoPointMass>(&law))
    return (t->p_minus > 0.0 && t->x_minus < 0.0) || (t->p_plus > 0.0 && t->x_plus < 0.0);
  if (auto* s = std::get_if<ShiftedExponentialJumps>(&law)) return s->sign < 0 || s->loc < 0.0;
  return false;
}

inline bool law_has_positive_jumps(const JumpLaw& law) {
  if (auto* e = std::get_if<ExponentialJumps>(&law)) return e->sign > 0;
  if (auto* t = std::get_if<TwoPointMass>(&law))
    return (t->p_minus > 0.0 && t->x_minus > 0.0) || (t->p_plus > 0.0 && t->x_plus > 0.0);
  if (auto* s = std::get_if<ShiftedExponentialJumps>(&law)) return s->sign > 0 || s->loc > 0.0;
  return false;
}

// Mass the jump law puts on {0}; such jumps are invisible in the path.
inline double law_zero_mass(const JumpLaw& law) {
  if (auto* t = std::get_if<TwoPointMass>(&law)) {
    double z = 0.0;
    if (t->x_minus == 0.0) z += t->p_minus;
    if (t->x_plus == 0.0) z += t->p_plus;
    return z;
  }
  return 0.0;
}

// log E[exp(-theta X_1)] for any real theta, +inf where the transform diverges.
inline double log_laplace(const LevyModel& m, double theta) {
  if (theta == 0.0) return 0.0;
  if (m.family == Family::StableSubordinator) {
    if (theta < 0.0) return kInf;
    return -m.drift * theta - std::pow(theta, m.stable_index);
  }
  double v = -theta * m.drift + 0.5 * m.gaussian_var * theta * theta;
  if (m.has_jumps()) {
    double jt = jump_transform(m.jump_law, theta);
    if (!std::isfinite(jt)) return kInf;
    v += m.jump_rate * (jt - 1.0);
  }
  return v;
}

// d/dtheta of log E[exp(-theta X_1)].
inline double log_laplace_slope(const LevyModel& m, double theta) {
  if (m.family == Family::StableSubordinator) {
    if (theta <= 0.0) return -kInf;
    double a = m.stable_index;
    return -m.drift - a * std::pow(theta, a - 1.0);
  }
  double v = -m.drift + m.gaussian_var * theta;
  if (m.has_jumps()) v -= m.jump_rate * jump_weighted_mean(m.jump_law, theta);
  return v;
}

struct LaplaceReport {
  double theta = 0.0;
  double psi_neg = 0.0;
  double phi = 1.0;
  bool finite = true;
};

inline LaplaceReport laplace_exponent(const LevyModel& m, double theta) {
  validate(m);
  require(!std::isnan(theta), "theta must not be NaN");
  require(theta >= 0.0, "theta must be >= 0");
  LaplaceReport rep;
  rep.theta = theta;
  rep.psi_neg = log_laplace(m, theta);
  rep.finite = std::isfinite(rep.psi_neg);
  rep.phi = rep.finite ? std::exp(rep.psi_neg) : kInf;
  return rep;
}

struct Classification {
  bool is_subordinator = false;
  bool is_compound_poisson = false;
  bool is_spectrally_negative = false;
  bool is_lattice = false;
  bool p_neg_positive = false;
};

namespace detail {

// True when x/y is rational with a modest denominator.
inline bool commensurable(double x, double y) {
  double q = std::abs(x / y);
  double h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double v = q;
  for (int i = 0; i < 40; ++i) {
    double a = std::floor(v);
    double h2 = a * h1 + h0, k2 = a * k1 + k0;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    if (k1 > 1e4) return false;
    if (std::abs(q - h1 / k1) <= 1e-12 * std::max(1.0, q)) return true;
    double frac = v - a;
    if (frac < 1e-15) return true;
    v = 1.0 / frac;
  }
  return false;
}

}  // namespace detail

inline Classification classify(const LevyModel& m) {
  validate(m);
  Classification c;
  if (m.family == Family::StableSubordinator) {
    c.is_subordinator = true;
    return c;
  }
  bool jumps = m.has_jumps();
  bool neg_jumps = jumps && law_has_negative_jumps(m.jump_law);
  bool pos_jumps = jumps && law_has_positive_jumps(m.jump_law);
  c.p_neg_positive = m.gaussian_var > 0.0 || m.drift < 0.0 || neg_jumps;
  c.is_subordinator = !c.p_neg_positive;
  c.is_compound_poisson = jumps && m.drift == 0.0 && m.gaussian_var == 0.0;
  c.is_spectrally_negative = !pos_jumps && !c.is_subordinator;
  if (c.is_compound_poisson) {
    if (auto* t = std::get_if<TwoPointMass>(&m.jump_law)) {
      double a = (t->p_minus > 0.0) ? t->x_minus : 0.0;
      double b = (t->p_plus > 0.0) ? t->x_plus : 0.0;
      if (a == 0.0 || b == 0.0)
        c.is_lattice = true;
      else
        c.is_lattice = detail::commensurable(a, b);
    }
  }
  return c;
}

inline bool is_degenerate(const LevyModel& m) {
  if (m.family == Family::StableSubordinator) return false;
  bool jumps = m.has_jumps() && law_zero_mass(m.jump_law) < 1.0;
  return m.drift == 0.0 && m.gaussian_var == 0.0 && !jumps;
}

// E[X_1]; +inf for the stable subordinator.
inline double mean(const LevyModel& m) {
  validate(m);
  if (m.family == Family::StableSubordinator) return kInf;
  double v = m.drift;
  if (m.has_jumps()) v += m.jump_rate * jump_weighted_mean(m.jump_law, 0.0);
  return v;
}

}  // namespace levy
