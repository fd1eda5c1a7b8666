#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "levy_moments/model.hpp"
#include "levy_moments/rng.hpp"

namespace levy {

inline double sample_jump(const JumpLaw& law, RandomStream& rs) {
  return std::visit(
      [&rs](const auto& j) -> double {
        using J = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<J, NoJumps>) {
          return 0.0;
        } else if constexpr (std::is_same_v<J, ExponentialJumps>) {
          return j.sign * j.mean * rs.exponential();
        } else if constexpr (std::is_same_v<J, TwoPointMass>) {
          return rs.uniform() < j.p_minus ? j.x_minus : j.x_plus;
        } else {
          return j.loc + j.sign * j.mean * rs.exponential();
        }
      },
      law);
}

// Positive alpha-stable variable with E[exp(-theta S)] = exp(-theta^alpha),
// via Kanter's representation.
inline double sample_positive_stable(double alpha, RandomStream& rs) {
  constexpr double pi = 3.14159265358979323846;
  double u = pi * rs.uniform();
  double e = rs.exponential();
  double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
  double b = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
  return a * b;
}

// One exact draw of X_t.
inline double sample_increment(const LevyModel& m, double t, RandomStream& rs) {
  if (t <= 0.0) return 0.0;
  if (m.family == Family::StableSubordinator)
    return m.drift * t + std::pow(t, 1.0 / m.stable_index) * sample_positive_stable(m.stable_index, rs);
  double x = m.drift * t;
  if (m.gaussian_var > 0.0) x += std::sqrt(m.gaussian_var * t) * rs.normal();
  if (m.has_jumps()) {
    long k = rs.poisson(m.jump_rate * t);
    for (long i = 0; i < k; ++i) x += sample_jump(m.jump_law, rs);
  }
  return x;
}

inline std::vector<double> sample_increments(const LevyModel& m, double t, std::size_t n, RandomStream& rs) {
  validate(m);
  require(t > 0.0, "t must be > 0");
  std::vector<double> out(n);
  for (auto& v : out) v = sample_increment(m, t, rs);
  return out;
}

inline std::vector<double> sample_increments(const LevyModel& m, double t, std::size_t n, std::uint64_t seed) {
  RandomStream rs(seed, StreamTag::Marginal, 0);
  return sample_increments(m, t, n, rs);
}

}  // namespace levy
