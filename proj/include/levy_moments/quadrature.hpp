#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "levy_moments/criteria.hpp"
#include "levy_moments/model.hpp"

namespace levy {

enum class QuadVerdict { Convergent, Divergent };

inline const char* to_string(QuadVerdict v) { return v == QuadVerdict::Convergent ? "Convergent" : "Divergent"; }

// Evidence for a divergence verdict: the log integrand at the last probed
// horizon and how fast it grows there.
struct DivergenceWitness {
  double t = 0.0;
  double log_integrand = 0.0;
  double growth_rate = 0.0;  // d/dt of the log integrand over the last doubling
  double decay_power = 0.0;  // local log-log slope, used at a = R
  double excess = 0.0;       // a - R
  bool confirmed = false;    // growth (or slow decay) actually observed numerically
};

struct QuadratureResult {
  std::optional<double> value;
  double abs_err = 0.0;
  QuadVerdict verdict = QuadVerdict::Convergent;
  double tail_bound = 0.0;
  std::size_t nodes_used = 0;
  double horizon = 0.0;
  // "chernoff" (certified bound), "power_law" (extrapolated estimate at a = R),
  // "extrapolated" (geometric panel decay), "exact" (no tail) or "none" (divergent).
  std::string tail_method = "none";
  bool tolerance_met = true;
  std::optional<DivergenceWitness> witness;
};

namespace detail {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// log Phi(z), accurate far into the lower tail.
inline double log_norm_cdf(double z) {
  if (z > 5.0) return std::log1p(-0.5 * std::erfc(z / std::sqrt(2.0)));
  if (z > -5.0) return std::log(norm_cdf(z));
  // Mills ratio continued fraction R(x) = 1/(x + 1/(x + 2/(x + ...))).
  double x = -z;
  double frac = x;
  for (int k = 80; k >= 1; --k) frac = x + k / frac;
  return -0.5 * x * x - kLogSqrt2Pi - std::log(frac);
}

// Streaming log-sum-exp.
struct LogSum {
  double mx = -kInf;
  double acc = 0.0;
  void add(double l) {
    if (l == -kInf) return;
    if (l <= mx) {
      acc += std::exp(l - mx);
    } else {
      acc = acc * std::exp(mx - l) + 1.0;
      mx = l;
    }
  }
  double value() const { return mx == -kInf ? -kInf : mx + std::log(acc); }
};

inline double log_add(double x, double y) {
  if (x == -kInf) return y;
  if (y == -kInf) return x;
  return std::max(x, y) + std::log1p(std::exp(-std::abs(x - y)));
}

inline double log_poisson_pmf(long k, double mu) {
  if (k < 0) return -kInf;
  if (mu <= 0.0) return k == 0 ? 0.0 : -kInf;
  return static_cast<double>(k) * std::log(mu) - mu - std::lgamma(static_cast<double>(k) + 1.0);
}

using DoublePolicy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

// log P{N <= k}, N ~ Poisson(mu); a downward series keeps the far lower tail.
inline double log_poisson_cdf(long k, double mu) {
  if (k < 0) return -kInf;
  if (mu <= 0.0) return 0.0;
  auto kd = static_cast<double>(k);
  if (kd > mu - 3.0 * std::sqrt(mu)) return std::log(boost::math::gamma_q(kd + 1.0, mu, DoublePolicy()));
  double term = 1.0, sum = 1.0;
  for (long j = k; j > 0; --j) {
    term *= static_cast<double>(j) / mu;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return log_poisson_pmf(k, mu) + std::log(sum);
}

// log P{N >= k}.
inline double log_poisson_sf(long k, double mu) {
  if (k <= 0) return 0.0;
  if (mu <= 0.0) return -kInf;
  auto kd = static_cast<double>(k);
  if (kd < mu + 3.0 * std::sqrt(mu) + 1.0) return std::log(boost::math::gamma_p(kd, mu, DoublePolicy()));
  double term = 1.0, sum = 1.0;
  for (long j = k + 1;; ++j) {
    term *= mu / static_cast<double>(j);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return log_poisson_pmf(k, mu) + std::log(sum);
}

struct PoissonRange {
  long lo = 0;
  long hi = 0;
};

inline PoissonRange poisson_range(double mu) {
  if (mu <= 0.0) return {0, 0};
  double sd = std::sqrt(mu);
  return {std::max(0L, static_cast<long>(std::floor(mu - 9.0 * sd - 10.0))),
          static_cast<long>(std::ceil(mu + 9.0 * sd + 15.0))};
}

// Untilted Poisson(mu) log pmf on a given index range with log cdf / log sf
// restricted to that range. Mass outside the range is negligible in the
// sums it feeds (the range is centred at the saddle-point mean).
struct LogPoissonTable {
  long lo = 0;
  std::vector<double> lpmf, lcdf, lsf;

  LogPoissonTable(double mu, PoissonRange r) : lo(r.lo) {
    auto n = static_cast<std::size_t>(r.hi - r.lo + 1);
    lpmf.resize(n);
    lcdf.resize(n);
    lsf.resize(n);
    for (std::size_t i = 0; i < n; ++i) lpmf[i] = log_poisson_pmf(lo + static_cast<long>(i), mu);
    double acc = -kInf;
    for (std::size_t i = 0; i < n; ++i) lcdf[i] = acc = log_add(acc, lpmf[i]);
    acc = -kInf;
    for (std::size_t i = n; i-- > 0;) lsf[i] = acc = log_add(acc, lpmf[i]);
  }

  long hi() const { return lo + static_cast<long>(lpmf.size()) - 1; }
  double at_most(long k) const {
    if (k < lo) return -kInf;
    return lcdf[static_cast<std::size_t>(std::min(k, hi()) - lo)];
  }
  double at_least(long k) const {
    if (k > hi()) return -kInf;
    return lsf[static_cast<std::size_t>(std::max(k, lo) - lo)];
  }
};

// log P{sign * Gamma(k, mean) <= v}, k >= 1 integer.
inline double log_signed_gamma_cdf(long k, double mean, int sign, double v) {
  if (sign > 0) return v > 0.0 ? log_poisson_sf(k, v / mean) : -kInf;
  return v >= 0.0 ? 0.0 : log_poisson_cdf(k - 1, -v / mean);
}

// E[H(y - s Z)], Z standard normal, H a cdf with a kink at 0.
template <class H>
double smooth_by_gaussian(H&& h, double y, double s) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto f = [&](double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi) * h(y - s * z); };
  double z0 = y / s;
  double lo = -9.0, hi = 9.0;
  double total = 0.0;
  if (z0 > lo && z0 < hi) {
    total += GK::integrate(f, lo, z0, 8, 1e-12);
    total += GK::integrate(f, z0, hi, 8, 1e-12);
  } else {
    total += GK::integrate(f, lo, hi, 8, 1e-12);
  }
  return total;
}

// Esscher parameter theta >= 0 whose tilted mean is x / t: the saddle point
// of P{X_t <= x}. Zero when x / t is not below the mean.
inline double saddle_theta(const LevyModel& m, double t, double x) {
  double target = x / t;
  auto tilted_mean = [&](double th) { return -log_laplace_slope(m, th); };
  if (tilted_mean(0.0) <= target) return 0.0;
  double edge = m.has_jumps() ? jump_domain_edge(m.jump_law) : kInf;
  double lo = 0.0, hi = std::isfinite(edge) ? edge * (1.0 - 1e-9) : 1.0;
  if (!std::isfinite(edge)) {
    while (tilted_mean(hi) > target && hi < 1e6) hi *= 2.0;
  }
  if (tilted_mean(hi) > target) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (tilted_mean(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double exponential_family_log_cdf(const LevyModel& m, double t, double y, double loc, double mean, int sign,
                                         double mu_tilted) {
  double sd = std::sqrt(m.gaussian_var * t);
  double mu = m.jump_rate * t;
  PoissonRange pr = poisson_range(mu_tilted);
  LogSum total;
  for (long k = pr.lo; k <= pr.hi; ++k) {
    double lw = log_poisson_pmf(k, mu);
    double yk = y - static_cast<double>(k) * loc;
    double lg;
    if (k == 0) {
      lg = sd > 0.0 ? log_norm_cdf(yk / sd) : (yk >= 0.0 ? 0.0 : -kInf);
    } else if (sd > 0.0) {
      double g = smooth_by_gaussian([&](double v) { return std::exp(log_signed_gamma_cdf(k, mean, sign, v)); }, yk, sd);
      lg = g > 0.0 ? std::log(g) : -kInf;
    } else {
      lg = log_signed_gamma_cdf(k, mean, sign, yk);
    }
    total.add(lw + lg);
  }
  return std::min(0.0, total.value());
}

inline double two_point_log_cdf(const LevyModel& m, double t, double y, const TwoPointMass& j, const TwoPointMass& jt,
                                 double rate_tilted) {
  double sd = std::sqrt(m.gaussian_var * t);
  double mu_m = m.jump_rate * j.p_minus * t, mu_p = m.jump_rate * j.p_plus * t;
  PoissonRange rm = poisson_range(rate_tilted * jt.p_minus * t);
  PoissonRange rp = poisson_range(rate_tilted * jt.p_plus * t);
  if (mu_m <= 0.0) rm = {0, 0};
  if (mu_p <= 0.0) rp = {0, 0};
  LogPoissonTable tp(mu_p, rp);
  constexpr double eps = 1e-9;
  LogSum total;
  for (long nm = rm.lo; nm <= rm.hi; ++nm) {
    double lw = log_poisson_pmf(nm, mu_m);
    if (lw == -kInf) continue;
    double c = y - static_cast<double>(nm) * j.x_minus;
    double inner;
    if (sd > 0.0) {
      LogSum in;
      for (long np = rp.lo; np <= rp.hi; ++np)
        in.add(tp.lpmf[static_cast<std::size_t>(np - rp.lo)] + log_norm_cdf((c - static_cast<double>(np) * j.x_plus) / sd));
      inner = in.value();
    } else if (j.x_plus > 0.0) {
      inner = tp.at_most(static_cast<long>(std::floor(c / j.x_plus + eps)));
    } else if (j.x_plus < 0.0) {
      inner = tp.at_least(static_cast<long>(std::ceil(c / j.x_plus - eps)));
    } else {
      inner = c >= -eps ? 0.0 : -kInf;
    }
    total.add(lw + inner);
  }
  return std::min(0.0, total.value());
}

// P{S <= x} for the positive stable law with Laplace transform exp(-theta^alpha),
// from Kanter's representation S = (A(U)/E)^{(1-alpha)/alpha}.
inline double positive_stable_cdf(double alpha, double x) {
  if (x <= 0.0) return 0.0;
  constexpr double pi = 3.14159265358979323846;
  double c = alpha / (1.0 - alpha);
  double lx = c * std::log(x);
  auto f = [&](double u) {
    double logA = c * std::log(std::sin(alpha * u)) + std::log(std::sin((1.0 - alpha) * u)) -
                  std::log(std::sin(u)) / (1.0 - alpha);
    double e = logA - lx;
    return e > 700.0 ? 0.0 : std::exp(-std::exp(e));
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  return std::clamp(GK::integrate(f, 0.0, pi, 12, 1e-12) / pi, 0.0, 1.0);
}

}  // namespace detail

// log P{X_t <= x}. Deterministic for every family: Gaussian, Poisson mixtures
// of (smoothed) gamma or lattice laws summed around the saddle point, and a
// one-dimensional integral for the stable subordinator.
inline double marginal_log_cdf(const LevyModel& m, double t, double x) {
  validate(m);
  require(!std::isnan(t) && t > 0.0, "t must be > 0");
  require(!std::isnan(x), "x must not be NaN");
  double y = x - m.drift * t;
  if (m.family == Family::BrownianDrift) return detail::log_norm_cdf(y / std::sqrt(m.gaussian_var * t));
  if (m.family == Family::StableSubordinator) {
    double p = m.stable_index == 0.5 ? (y > 0.0 ? std::erfc(t / (2.0 * std::sqrt(y))) : 0.0)
                                     : detail::positive_stable_cdf(m.stable_index, y / std::pow(t, 1.0 / m.stable_index));
    return p > 0.0 ? std::log(p) : -kInf;
  }
  if (!m.has_jumps()) {
    double sd = std::sqrt(m.gaussian_var * t);
    return sd > 0.0 ? detail::log_norm_cdf(y / sd) : (y >= 0.0 ? 0.0 : -kInf);
  }
  LevyModel mt = esscher(m, detail::saddle_theta(m, t, x));
  return std::visit(
      [&](const auto& j) -> double {
        using J = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<J, ExponentialJumps>) {
          return detail::exponential_family_log_cdf(m, t, y, 0.0, j.mean, j.sign, mt.jump_rate * t);
        } else if constexpr (std::is_same_v<J, ShiftedExponentialJumps>) {
          return detail::exponential_family_log_cdf(m, t, y, j.loc, j.mean, j.sign, mt.jump_rate * t);
        } else if constexpr (std::is_same_v<J, TwoPointMass>) {
          return detail::two_point_log_cdf(m, t, y, j, std::get<TwoPointMass>(mt.jump_law), mt.jump_rate);
        } else {
          return -kInf;  // unreachable: has_jumps() excludes NoJumps
        }
      },
      m.jump_law);
}

inline double marginal_cdf(const LevyModel& m, double t, double x) {
  if (m.family == Family::BrownianDrift) {
    validate(m);
    require(!std::isnan(t) && t > 0.0, "t must be > 0");
    require(!std::isnan(x), "x must not be NaN");
    return detail::norm_cdf((x - m.drift * t) / std::sqrt(m.gaussian_var * t));
  }
  return std::clamp(std::exp(marginal_log_cdf(m, t, x)), 0.0, 1.0);
}

namespace detail {

using GK61 = boost::math::quadrature::gauss_kronrod<double, 61>;

constexpr double kIntegralCap = 134217728.0;  // 2^27
constexpr long kSeriesCap = 1L << 18;

// What is being summed or integrated: log of the integrand at t (or n), the
// start of the range and whether a 1/t factor sits in front of e^{at}.
struct Problem {
  const LevyModel* m = nullptr;
  double a = 0.0;
  double r = 0.0;
  double start = 0.0;
  bool inv_t = false;
  bool series = false;
  std::function<double(double)> log_g;
  double abs_tol = 0.0;  // panels whose error estimate is below this are not refined
};

// Chernoff: P{X_t <= r} <= exp(theta r - rate(theta) t), rate = -Psi(-theta).
struct ChernoffCandidate {
  double theta;
  double excess;  // rate(theta) - a > 0
};

inline std::vector<ChernoffCandidate> chernoff_candidates(const LevyModel& m, double a, const ExponentMaximum& mx) {
  std::vector<double> rates;
  if (std::isfinite(mx.R)) {
    constexpr int K = 24;
    for (int k = 1; k <= K; ++k) {
      if (k == K && !std::isfinite(mx.theta_star)) continue;
      rates.push_back(a + (mx.R - a) * k / K);
    }
  } else {
    for (int k = -6; k <= 10; ++k) rates.push_back(a * (1.0 + std::ldexp(1.0, k)));
  }
  std::vector<ChernoffCandidate> out;
  for (double rate : rates) {
    double th = theta_for_rate(m, rate);
    double ex = neg_psi(m, th) - a;
    if (std::isfinite(ex) && ex > 0.0) out.push_back({th, ex});
  }
  return out;
}

// Bound on the mass beyond T for one candidate.
inline double chernoff_tail(const Problem& p, const ChernoffCandidate& c, double T) {
  double lead = c.theta * p.r - c.excess * T;
  double denom = p.series ? -std::expm1(-c.excess) : c.excess;
  double b = std::exp(lead) / denom;
  if (p.inv_t) b /= T;
  return b;
}

inline double chernoff_horizon(const Problem& p, const std::vector<ChernoffCandidate>& cs, double target) {
  double best = kInf;
  for (const auto& c : cs) {
    double denom = p.series ? -std::expm1(-c.excess) : c.excess;
    double T = (c.theta * p.r - std::log(target * denom)) / c.excess;
    best = std::min(best, T);
  }
  return std::max({best, p.start + 1.0, 1.0});
}

inline double best_tail(const Problem& p, const std::vector<ChernoffCandidate>& cs, double T) {
  double best = kInf;
  for (const auto& c : cs) best = std::min(best, chernoff_tail(p, c, T));
  return best;
}

inline double eval_g(const Problem& p, double t, std::size_t& nodes) {
  ++nodes;
  double lg = p.log_g(t);
  return lg == -kInf ? 0.0 : std::exp(lg);
}

// Integral over [lo, hi]: sqrt substitution on [0, 1], then doubling panels.
inline double integrate_range(const Problem& p, double lo, double hi, std::size_t& nodes, double& err) {
  double total = 0.0;
  auto add = [&](auto&& f, double x0, double x1) {
    double e = 0.0;
    double v = GK61::integrate(f, x0, x1, 0, 0.0, &e);
    if (e > p.abs_tol) v = GK61::integrate(f, x0, x1, 12, 1e-10, &e);
    total += v;
    err += e;
  };
  double x = lo;
  if (x < 1.0 && hi > x) {
    double u0 = std::sqrt(x), u1 = std::sqrt(std::min(1.0, hi));
    add([&](double u) { return u <= 0.0 ? 0.0 : 2.0 * u * eval_g(p, u * u, nodes); }, u0, u1);
    x = std::min(1.0, hi);
  }
  while (x < hi) {
    double next = std::min(hi, std::max(2.0 * x, x + 1.0));
    add([&](double t) { return eval_g(p, t, nodes); }, x, next);
    x = next;
  }
  return total;
}

inline double sum_range(const Problem& p, long n0, long n1, std::size_t& nodes) {
  std::vector<double> terms;
  for (long n = n0; n <= n1; ++n) terms.push_back(eval_g(p, static_cast<double>(n), nodes));
  // Small terms first keeps the rounding error down.
  double s = 0.0;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) s += *it;
  return s;
}

// Mass on [start, T] (or terms start..T).
inline double mass_upto(const Problem& p, double lo, double hi, std::size_t& nodes, double& err) {
  if (p.series) {
    auto n0 = static_cast<long>(std::ceil(lo));
    auto n1 = static_cast<long>(std::floor(hi));
    if (n1 < n0) return 0.0;
    double s = sum_range(p, n0, n1, nodes);
    err += 1e-15 * s * static_cast<double>(n1 - n0 + 1);
    return s;
  }
  return integrate_range(p, lo, hi, nodes, err);
}

inline double local_power(const Problem& p, double T, std::size_t& nodes) {
  nodes += 2;
  double l1 = p.log_g(T), l0 = p.log_g(0.5 * T);
  return -(l1 - l0) / std::log(2.0);
}

inline DivergenceWitness growth_witness(const Problem& p, double excess, std::size_t& nodes) {
  DivergenceWitness w;
  w.excess = excess;
  double t = std::max(1.0, p.start + 1.0);
  double prev = p.log_g(t);
  ++nodes;
  int rises = 0;
  for (int k = 1; k <= 24; ++k) {
    double t2 = 2.0 * t;
    double cur = p.log_g(t2);
    ++nodes;
    w.t = t2;
    w.log_integrand = cur;
    w.growth_rate = (std::isfinite(cur) && std::isfinite(prev)) ? (cur - prev) / (t2 - t) : 0.0;
    w.decay_power = (std::isfinite(cur) && std::isfinite(prev)) ? -(cur - prev) / std::log(2.0) : 0.0;
    rises = (std::isfinite(cur) && cur > prev) ? rises + 1 : 0;
    if (rises >= 3 && w.growth_rate > 0.0) {
      w.confirmed = true;
      break;
    }
    prev = cur;
    t = t2;
  }
  return w;
}

inline QuadratureResult divergent(const DivergenceWitness& w, std::size_t nodes) {
  QuadratureResult q;
  q.verdict = QuadVerdict::Divergent;
  q.value.reset();
  q.abs_err = 0.0;
  q.tail_bound = kInf;
  q.nodes_used = nodes;
  q.horizon = w.t;
  q.tail_method = "none";
  q.witness = w;
  return q;
}

// At a = R the Chernoff bound no longer decays; the integrand behaves like
// c t^{-p}. p <= 1 means divergence, otherwise the tail is extrapolated and
// the horizon doubled until the extrapolated total settles.
inline QuadratureResult power_law_regime(Problem p, double tol) {
  std::size_t nodes = 0;
  p.abs_tol = 1e-3 * tol;
  double cap = p.series ? static_cast<double>(kSeriesCap) : kIntegralCap;
  double T = std::max(64.0, 2.0 * (p.start + 1.0));
  double pw = local_power(p, T, nodes);
  while (T < std::min(cap, 1048576.0)) {
    double pw2 = local_power(p, 2.0 * T, nodes);
    T *= 2.0;
    bool settled = std::abs(pw2 - pw) < 0.02 && T >= 256.0;
    pw = pw2;
    if (settled) break;
  }
  if (!(pw > 1.0)) {
    DivergenceWitness w;
    w.t = T;
    w.log_integrand = p.log_g(T);
    w.decay_power = pw;
    w.excess = 0.0;
    w.confirmed = std::isfinite(pw);
    return divergent(w, nodes + 1);
  }

  double err = 0.0;
  double head = 0.0;
  Problem c = p;
  if (p.series) {
    // Sum the first terms exactly, then treat the smooth remainder as an
    // integral (Euler-Maclaurin with the first derivative correction).
    auto n0 = static_cast<long>(std::ceil(p.start));
    long n1 = std::max(n0, 2048L);
    head = sum_range(p, n0, n1, nodes);
    double x = static_cast<double>(n1) + 0.5, h = 1e-3 * x;
    nodes += 2;
    head -= (std::exp(p.log_g(x + h)) - std::exp(p.log_g(x - h))) / (2.0 * h) / 24.0;
    c.series = false;
    c.start = x;
    T = std::max(T, 2.0 * x);
  }
  double body = head + mass_upto(c, c.start, T, nodes, err);
  auto tail_at = [&](double t) {
    double q = local_power(c, t, nodes);
    if (!(q > 1.0)) return kInf;
    ++nodes;
    return std::exp(c.log_g(t)) * t / (q - 1.0);
  };
  double total = body + tail_at(T);
  double change = kInf;
  bool met = false;
  while (T < kIntegralCap) {
    body += mass_upto(c, T, 2.0 * T, nodes, err);
    T *= 2.0;
    double next = body + tail_at(T);
    change = std::abs(next - total);
    total = next;
    if (change <= 0.5 * tol * std::max(1.0, total)) {
      met = true;
      break;
    }
  }
  QuadratureResult q;
  q.verdict = QuadVerdict::Convergent;
  q.value = total;
  q.tail_bound = change;
  q.abs_err = err + change;
  q.nodes_used = nodes;
  q.horizon = T;
  q.tail_method = "power_law";
  q.tolerance_met = met;
  return q;
}

inline QuadratureResult evaluate(Problem p, double tol) {
  require(!std::isnan(p.a) && p.a > 0.0, "a must be > 0");
  require(!std::isnan(tol) && tol > 0.0, "tol must be > 0");
  require(!std::isnan(p.r), "r must not be NaN");
  const LevyModel& m = *p.m;
  validate(m);
  std::size_t nodes = 0;

  Classification cl = classify(m);
  if (cl.is_subordinator && p.r < 0.0) {
    QuadratureResult q;
    q.value = 0.0;
    q.tail_method = "exact";
    return q;
  }

  ExponentMaximum mx = maximize_exponent(m);
  if (!near_boundary(p.a, mx.R) && p.a > mx.R) {
    DivergenceWitness w = growth_witness(p, p.a - mx.R, nodes);
    return divergent(w, nodes);
  }
  if (near_boundary(p.a, mx.R)) return power_law_regime(p, tol);

  p.abs_tol = 1e-3 * tol;
  auto cs = chernoff_candidates(m, p.a, mx);
  double target = 0.5 * tol;
  double T = cs.empty() ? kInf : chernoff_horizon(p, cs, target);
  double cap = p.series ? static_cast<double>(kSeriesCap) : kIntegralCap;
  if (!(T <= cap)) return power_law_regime(p, tol);  // a is numerically at the boundary
  if (p.series) T = std::ceil(T);

  double err = 0.0;
  double body = mass_upto(p, p.start, T, nodes, err);
  double tail = best_tail(p, cs, p.series ? T + 1.0 : T);
  QuadratureResult q;
  q.verdict = QuadVerdict::Convergent;
  q.value = body;
  q.tail_bound = tail;
  q.abs_err = err + tail;
  q.nodes_used = nodes;
  q.horizon = T;
  q.tail_method = "chernoff";
  q.tolerance_met = tail <= tol * std::max(1.0, body);
  return q;
}

}  // namespace detail

// int_0^inf e^{ay} f(y) dy for a density f on (0, inf). Doubling panels until
// the panel masses decay geometrically; the remaining tail is extrapolated.
template <class F>
QuadratureResult density_moment(F&& f, double a, double tol = 1e-10) {
  require(!std::isnan(a), "a must not be NaN");
  require(!std::isnan(tol) && tol > 0.0, "tol must be > 0");
  std::size_t nodes = 0;
  auto g = [&](double y) {
    ++nodes;
    return y <= 0.0 ? 0.0 : std::exp(a * y) * f(y);
  };
  double err = 0.0, total = 0.0;
  auto panel = [&](auto&& h, double x0, double x1) {
    double e = 0.0;
    double v = detail::GK61::integrate(h, x0, x1, 15, 1e-13, &e);
    err += e;
    return v;
  };
  total += panel([&](double u) { return 2.0 * u * g(u * u); }, 0.0, 1.0);
  double x = 1.0, prev = kInf, tail = kInf;
  for (int k = 0; k < 80; ++k) {
    double v = panel(g, x, 2.0 * x);
    total += v;
    x *= 2.0;
    if (prev < kInf && v < prev && v <= 1e-3 * tol * std::max(1.0, total)) {
      double ratio = v / prev;
      tail = v * ratio / (1.0 - ratio);
      break;
    }
    prev = v;
  }
  QuadratureResult q;
  if (!std::isfinite(tail)) {
    DivergenceWitness w;
    w.t = x;
    w.log_integrand = std::log(g(x));
    return detail::divergent(w, nodes);
  }
  q.value = total + tail;
  q.tail_bound = tail;
  q.abs_err = err + tail;
  q.nodes_used = nodes;
  q.horizon = x;
  q.tail_method = "extrapolated";
  q.tolerance_met = tail <= tol * std::max(1.0, total);
  return q;
}

// U_a(r) = int_0^inf e^{at} P{X_t <= r} dt.
inline QuadratureResult U_a(const LevyModel& m, double a, double r, double tol = 1e-8) {
  detail::Problem p;
  p.m = &m;
  p.a = a;
  p.r = r;
  p.log_g = [&m, a, r](double t) { return t <= 0.0 ? (r >= 0.0 ? 0.0 : -kInf) : a * t + marginal_log_cdf(m, t, r); };
  return detail::evaluate(p, tol);
}

// V_a(r) = int_1^inf e^{at} t^{-1} P{X_t <= r} dt.
inline QuadratureResult V_a(const LevyModel& m, double a, double r, double tol = 1e-8) {
  detail::Problem p;
  p.m = &m;
  p.a = a;
  p.r = r;
  p.start = 1.0;
  p.inv_t = true;
  p.log_g = [&m, a, r](double t) { return a * t - std::log(t) + marginal_log_cdf(m, t, r); };
  return detail::evaluate(p, tol);
}

// U^1_a(r) = sum_{n>=0} e^{an} P{X_n <= r}.
inline QuadratureResult U1_a(const LevyModel& m, double a, double r, double tol = 1e-8) {
  detail::Problem p;
  p.m = &m;
  p.a = a;
  p.r = r;
  p.series = true;
  p.log_g = [&m, a, r](double n) { return n <= 0.0 ? (r >= 0.0 ? 0.0 : -kInf) : a * n + marginal_log_cdf(m, n, r); };
  return detail::evaluate(p, tol);
}

// V^1_a(r) = sum_{n>=1} e^{an} n^{-1} P{X_n <= r}.
inline QuadratureResult V1_a(const LevyModel& m, double a, double r, double tol = 1e-8) {
  detail::Problem p;
  p.m = &m;
  p.a = a;
  p.r = r;
  p.start = 1.0;
  p.inv_t = true;
  p.series = true;
  p.log_g = [&m, a, r](double n) { return a * n - std::log(n) + marginal_log_cdf(m, n, r); };
  return detail::evaluate(p, tol);
}

// E[e^{a N_0}] = exp( int_0^inf (e^{at} - 1) t^{-1} P{X_t <= 0} dt ).
inline QuadratureResult sojourn_zero_moment(const LevyModel& m, double a, double tol = 1e-8) {
  detail::Problem p;
  p.m = &m;
  p.a = a;
  p.r = 0.0;
  p.inv_t = true;
  p.log_g = [&m, a](double t) {
    if (t <= 0.0) return std::log(a);
    return std::log(std::expm1(a * t) / t) + marginal_log_cdf(m, t, 0.0);
  };
  // First pass sizes the exponent, the second asks for the accuracy the
  // exponential needs.
  QuadratureResult q = detail::evaluate(p, tol);
  if (q.verdict == QuadVerdict::Divergent) return q;
  double scale = std::exp(*q.value);
  if (scale > 1.0) q = detail::evaluate(p, tol / scale);
  double I = *q.value;
  double v = std::exp(I);
  QuadratureResult out = q;
  out.value = v;
  out.tail_bound = v * std::expm1(q.tail_bound);
  out.abs_err = v * std::expm1(q.abs_err);
  out.tolerance_met = out.tail_bound <= tol * std::max(1.0, v);
  return out;
}

}  // namespace levy
