#pragma once

// Path kernels shared by the estimators. Three samplers:
//   event kernel  - finite activity without Gaussian part, exact in continuous time
//   grid kernel   - Gaussian part on a time grid of step h, jumps at their exact times,
//                   Brownian-bridge crossing checks between grid points
//   stable kernel - subordinator first passage by inverting P{T > t} = P{X_t <= r}

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "levy_moments/error.hpp"
#include "levy_moments/model.hpp"
#include "levy_moments/rng.hpp"
#include "levy_moments/sampling.hpp"

namespace levy {

enum class Quantity { T, N, Rho, Inf };

// Which law drives the path: the original one, the tilted one throughout, or
// the tilted one only while the path sits at or below the level.
enum class Tilting { None, Global, BelowLevel };

struct KernelSpec {
  Quantity quantity = Quantity::T;
  Tilting tilting = Tilting::None;
  double r = 0.0;
  double gap = 0.0;  // stop once X - r (or X - running min) reaches this
  double step = 1e-3;
  double horizon = 1e4;
  bool track_skeleton = false;  // also record T1, the first integer time with X > r
};

struct PathOutcome {
  bool passed = false;
  double T = std::numeric_limits<double>::infinity();
  double X_T = 0.0;
  double N = 0.0;
  double rho = 0.0;
  double S = 0.0;
  double X_S = 0.0;
  double below_dx = 0.0;  // sum of increments over time spent at or below r
  double min = 0.0;
  double T1 = std::numeric_limits<double>::infinity();
};

namespace detail {

struct Regime {
  double drift = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  JumpLaw law = NoJumps{};
};

inline Regime regime_of(const LevyModel& m) {
  Regime g;
  g.drift = m.drift;
  g.sigma = std::sqrt(m.gaussian_var);
  g.lambda = m.has_jumps() ? m.jump_rate : 0.0;
  g.law = m.jump_law;
  return g;
}

inline double next_jump(double t, const Regime& g, RandomStream& rs) {
  return g.lambda > 0.0 ? t + rs.exponential() / g.lambda : std::numeric_limits<double>::infinity();
}

inline bool tilted_at(Tilting tl, double x, double r) {
  return tl == Tilting::Global || (tl == Tilting::BelowLevel && x <= r);
}

inline bool should_stop(const KernelSpec& k, const PathOutcome& o, double x) {
  switch (k.quantity) {
    case Quantity::T: return o.passed && (!k.track_skeleton || std::isfinite(o.T1));
    case Quantity::N:
    case Quantity::Rho: return x - k.r >= k.gap;
    case Quantity::Inf: return x - o.min >= k.gap;
  }
  return true;
}

[[noreturn]] inline void horizon_overflow(double horizon) {
  fail(ErrorCode::HorizonOverflow, "path exceeded the time cap " + std::to_string(horizon) +
                                       " (criterion near its boundary; raise --horizon or epsilon)");
}

// Brownian bridge crossing probability of a level between endpoints on the same side.
inline double bridge_cross_prob(double x0, double x1, double level, double var_dt) {
  double p = (x0 - level) * (x1 - level);
  if (p <= 0.0) return 1.0;
  return std::exp(-2.0 * p / var_dt);
}

// Exact minimum of a Brownian bridge from x0 to x1 with variance var_dt.
inline double bridge_min(double x0, double x1, double var_dt, double u) {
  double d = x1 - x0;
  return 0.5 * (x0 + x1 - std::sqrt(d * d - 2.0 * var_dt * std::log(u)));
}

inline PathOutcome event_kernel(const Regime& P, const Regime& Q, const KernelSpec& k, RandomStream& rs) {
  PathOutcome o;
  const double r = k.r;
  double t = 0.0, x = 0.0;
  bool above = x > r;
  if (above) {
    o.passed = true;
    o.T = 0.0;
    o.X_T = 0.0;
    o.T1 = 0.0;
  }
  bool tilt = tilted_at(k.tilting, x, r);
  const Regime* g = tilt ? &Q : &P;
  double J = next_jump(t, *g, rs);
  const double d = P.drift;  // tilting leaves the drift of a pure-jump path unchanged

  while (!should_stop(k, o, x)) {
    if (t > k.horizon) horizon_overflow(k.horizon);
    double tc = std::numeric_limits<double>::infinity();
    if (!above && d > 0.0) tc = t + (r - x) / d;
    if (above && d < 0.0) tc = t + (x - r) / (-d);
    bool crossing = tc <= J;
    double tn = crossing ? tc : J;
    if (!std::isfinite(tn)) {
      // No jumps and drifting away: the stop condition can never be met.
      if (k.quantity == Quantity::T) return o;
      horizon_overflow(k.horizon);
    }
    double dt = tn - t;
    if (k.track_skeleton && !std::isfinite(o.T1)) {
      for (double kk = std::floor(t) + 1.0; kk < tn; kk += 1.0) {
        if (x + d * (kk - t) > r) {
          o.T1 = kk;
          break;
        }
      }
    }
    if (!above) {
      o.N += dt;
      o.below_dx += d * dt;
      o.rho = tn;
    }
    x += d * dt;
    t = tn;
    if (x < o.min) o.min = x;
    if (crossing) {
      x = r;
      above = d > 0.0;
      if (above && !o.passed) {
        o.passed = true;
        o.T = t;
        o.X_T = r;
      }
    } else {
      bool was_above = above;
      double y = sample_jump(g->law, rs);
      x += y;
      above = x > r;
      if (!was_above) o.below_dx += y;
      if (!above) o.rho = t;
      if (above && !was_above && !o.passed) {
        o.passed = true;
        o.T = t;
        o.X_T = x;
      }
      if (x < o.min) o.min = x;
    }
    bool nt = tilted_at(k.tilting, x, r);
    if (!crossing || nt != tilt) {
      tilt = nt;
      g = tilt ? &Q : &P;
      J = next_jump(t, *g, rs);
    }
  }
  o.S = t;
  o.X_S = x;
  return o;
}

// Processes one Gaussian segment [t0, t0 + dt] from x0 to x1 inside fine step
// ending at t_end. `cross` is the continuous-crossing indicator of level r.
inline void gaussian_piece(const KernelSpec& k, PathOutcome& o, double x0, double x1, bool cross, double t_end) {
  const double r = k.r;
  if (!o.passed && x0 <= r && (x1 > r || cross)) {
    o.passed = true;
    o.T = t_end;
    o.X_T = r;
  }
  if (x0 <= r || x1 <= r || cross) o.rho = t_end;
}

inline PathOutcome grid_kernel(const Regime& P, const Regime& Q, const KernelSpec& k, RandomStream& rs) {
  PathOutcome o;
  const double r = k.r, h = k.step;
  const bool track_min = k.quantity == Quantity::Inf;
  double t = 0.0, x = 0.0;
  long step_index = 0;
  long per_unit = 0;
  if (k.track_skeleton) {
    per_unit = std::lround(1.0 / h);
    require(per_unit > 0 && std::abs(per_unit * h - 1.0) < 1e-9, "skeleton tracking needs 1/step integer");
  }
  if (x > r) {
    o.passed = true;
    o.T = 0.0;
    o.X_T = 0.0;
    o.T1 = 0.0;
  }
  bool tilt = tilted_at(k.tilting, x, r);
  const Regime* g = &(tilt ? Q : P);
  double J = next_jump(t, *g, rs);
  std::vector<double> pts;

  while (true) {
    if (per_unit > 0 && step_index % per_unit == 0 && x > r && !std::isfinite(o.T1))
      o.T1 = static_cast<double>(step_index / per_unit);
    if (should_stop(k, o, x)) break;
    if (t > k.horizon) horizon_overflow(k.horizon);
    bool nt = tilted_at(k.tilting, x, r);
    if (nt != tilt) {
      tilt = nt;
      g = &(tilt ? Q : P);
      J = next_jump(t, *g, rs);
    }
    const double sig = g->sigma, mu = g->drift;

    // Largest power-of-two block of fine steps that is jump free and, unless
    // only the running minimum matters, stays far from the level.
    long m = 1;
    {
      double cap = std::min(J - t, 16.0);
      double dmax;
      if (track_min) {
        dmax = std::min(cap, 0.25);
      } else {
        double dist = std::abs(x - r);
        double s = std::abs(mu) > 0.0
                       ? (-8.0 * sig + std::sqrt(64.0 * sig * sig + 4.0 * std::abs(mu) * dist)) / (2.0 * std::abs(mu))
                       : dist / (8.0 * sig);
        dmax = std::min(cap, s * s);
      }
      long room = per_unit > 0 ? per_unit - step_index % per_unit : (1L << 20);
      while (2.0 * m * h <= dmax && 2 * m <= room && m < (1L << 20)) m *= 2;
    }

    if (m > 1) {
      double D = m * h;
      double var = sig * sig * D;
      double x1 = x + mu * D + std::sqrt(var) * rs.normal();
      if (track_min) {
        double mn = bridge_min(x, x1, var, rs.uniform());
        if (mn < o.min) o.min = mn;
        t = (step_index += m) * h;
        x = x1;
        continue;
      }
      bool cross = (x <= r) != (x1 <= r) || rs.uniform() < bridge_cross_prob(x, x1, r, var);
      if (!cross) {
        if (x <= r) {
          o.N += D;
          o.below_dx += x1 - x;
          o.rho = t + D;
        }
        t = (step_index += m) * h;
        x = x1;
        continue;
      }
      // Rare: resample the fine grid inside the block conditioned on a crossing.
      pts.assign(m + 1, 0.0);
      std::vector<char> cr(m);
      const double vh = sig * sig * h;
      for (;;) {
        pts[0] = x;
        pts[m] = x1;
        bool any = false;
        for (long j = 1; j < m; ++j) {
          double rem = static_cast<double>(m - j + 1);
          double mean_j = pts[j - 1] + (x1 - pts[j - 1]) / rem;
          double sd = std::sqrt(vh * (rem - 1.0) / rem);
          pts[j] = mean_j + sd * rs.normal();
        }
        for (long j = 0; j < m; ++j) {
          bool c = (pts[j] <= r) != (pts[j + 1] <= r) || rs.uniform() < bridge_cross_prob(pts[j], pts[j + 1], r, vh);
          cr[j] = c;
          any = any || c;
        }
        if (any) break;
      }
      long j = 0;
      for (; j < m; ++j) {
        double a0 = pts[j], a1 = pts[j + 1];
        double te = (step_index + j + 1) * h;
        if (a0 <= r) {
          o.N += h;
          o.below_dx += a1 - a0;
        }
        gaussian_piece(k, o, a0, a1, cr[j], te);
        if (k.quantity == Quantity::T && o.passed) {
          ++j;
          break;
        }
        if (k.tilting == Tilting::BelowLevel && (a0 <= r) != (a1 <= r)) {
          ++j;
          break;
        }
      }
      step_index += j;
      t = step_index * h;
      x = pts[j];
      continue;
    }

    // One fine step with jumps at their exact times.
    double t_end = (step_index + 1) * h;
    double x_left = x;
    double s = t;
    while (J < t_end) {
      double dt = J - s;
      double xj = x;
      if (dt > 0.0) {
        double var = sig * sig * dt;
        xj = x + mu * dt + std::sqrt(var) * rs.normal();
        if (track_min) {
          double mn = bridge_min(x, xj, var, rs.uniform());
          if (mn < o.min) o.min = mn;
        } else {
          bool c = (x <= r) != (xj <= r) || rs.uniform() < bridge_cross_prob(x, xj, r, var);
          gaussian_piece(k, o, x, xj, c, t_end);
        }
      }
      double y = sample_jump(g->law, rs);
      double xa = xj + y;
      if (!o.passed && xj <= r && xa > r) {
        o.passed = true;
        o.T = J;
        o.X_T = xa;
      }
      if (xa <= r) o.rho = t_end;
      if (xa < o.min) o.min = xa;
      x = xa;
      s = J;
      J = next_jump(J, *g, rs);
    }
    double dt = t_end - s;
    if (dt > 0.0) {
      double var = sig * sig * dt;
      double x1 = x + mu * dt + std::sqrt(var) * rs.normal();
      if (track_min) {
        double mn = bridge_min(x, x1, var, rs.uniform());
        if (mn < o.min) o.min = mn;
      } else {
        bool c = (x <= r) != (x1 <= r) || rs.uniform() < bridge_cross_prob(x, x1, r, var);
        gaussian_piece(k, o, x, x1, c, t_end);
      }
      x = x1;
    }
    if (x_left <= r) {
      o.N += h;
      o.below_dx += x - x_left;
    }
    ++step_index;
    t = t_end;
  }
  o.S = t;
  o.X_S = x;
  return o;
}

// Stable subordinator: T_r = N_r = rho_r, with P{T_r > t} = P{X_t <= r}.
inline PathOutcome stable_kernel(const LevyModel& m, const KernelSpec& k, RandomStream& rs) {
  PathOutcome o;
  o.passed = true;
  if (k.r < 0.0) {
    o.T = o.N = o.rho = 0.0;
    return o;
  }
  double S = sample_positive_stable(m.stable_index, rs);
  double inv = 1.0 / m.stable_index;
  double t;
  if (m.drift == 0.0) {
    t = std::pow(k.r / S, m.stable_index);
  } else {
    double lo = 0.0, hi = k.r / m.drift;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (m.drift * mid + std::pow(mid, inv) * S <= k.r)
        lo = mid;
      else
        hi = mid;
    }
    t = 0.5 * (lo + hi);
  }
  o.T = o.N = o.rho = o.S = t;
  o.X_T = k.r;
  return o;
}

}  // namespace detail

// Simulates one path. `tilted` is used where KernelSpec::tilting asks for it.
inline PathOutcome simulate_path(const LevyModel& base, const LevyModel& tilted, const KernelSpec& k,
                                 RandomStream& rs) {
  if (base.family == Family::StableSubordinator) return detail::stable_kernel(base, k, rs);
  detail::Regime P = detail::regime_of(base), Q = detail::regime_of(tilted);
  if (base.gaussian_var == 0.0) return detail::event_kernel(P, Q, k, rs);
  return detail::grid_kernel(P, Q, k, rs);
}

}  // namespace levy
