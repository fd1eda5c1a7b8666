#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levy_moments/closedform.hpp"
#include "levy_moments/criteria.hpp"
#include "levy_moments/parallel.hpp"
#include "levy_moments/paths.hpp"
#include "levy_moments/rng.hpp"

namespace levy {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED2024ULL;

struct PathConfig {
  std::size_t n_paths = 100000;
  double step = 1e-3;
  double horizon = 1e4;  // hard cap on simulated time per path
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 1;
  double epsilon_tail = 1e-3;

  void validate() const {
    require(n_paths >= 1, "n_paths must be >= 1");
    require(step > 0.0 && std::isfinite(step), "step must be > 0");
    require(horizon > 0.0, "horizon must be > 0");
    require(epsilon_tail > 0.0 && epsilon_tail < 1.0, "epsilon_tail must lie in (0,1)");
    require(workers >= 1, "workers must be >= 1");
  }
};

enum class McMode { Auto, Direct, EsscherIS, Exact };

inline const char* to_string(McMode m) {
  switch (m) {
    case McMode::Auto: return "Auto";
    case McMode::Direct: return "Direct";
    case McMode::EsscherIS: return "EsscherIS";
    case McMode::Exact: return "Exact";
  }
  return "?";
}

inline McMode mode_from_string(const std::string& s) {
  if (s == "Auto" || s == "auto") return McMode::Auto;
  if (s == "Direct" || s == "direct") return McMode::Direct;
  if (s == "EsscherIS" || s == "esscher" || s == "is") return McMode::EsscherIS;
  if (s == "Exact" || s == "exact") return McMode::Exact;
  fail(ErrorCode::InvalidArgument, "unknown mode '" + s + "'");
}

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t n_eff = 0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  double truncation_cert = 0.0;
  McMode mode = McMode::Direct;
  std::uint64_t seed = 0;
};

struct OvershootSample {
  std::vector<double> values;
  double r = 0.0;
  double gamma = 0.0;
};

namespace detail {

inline McEstimate summarize(const std::vector<double>& v, McMode mode, std::uint64_t seed) {
  McEstimate e;
  e.n_eff = v.size();
  e.mode = mode;
  e.seed = seed;
  double n = static_cast<double>(v.size());
  e.mean = pairwise_sum(v) / n;
  if (v.size() > 1) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - e.mean) * (v[i] - e.mean);
    e.std_err = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  e.ci95_lo = e.mean - 1.96 * e.std_err;
  e.ci95_hi = e.mean + 1.96 * e.std_err;
  return e;
}

inline McEstimate exact_estimate(double value, std::size_t n, std::uint64_t seed) {
  McEstimate e;
  e.mean = value;
  e.n_eff = n;
  e.ci95_lo = e.ci95_hi = value;
  e.mode = McMode::Exact;
  e.seed = seed;
  return e;
}

template <class Fn>
std::vector<double> run_paths(const PathConfig& cfg, StreamTag tag, Fn&& per_path) {
  return parallel_map<double>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    RandomStream rs(cfg.seed, tag, i);
    return per_path(rs);
  });
}

inline void direct_guard(double a, double R) {
  if (2.0 * a > R * (1.0 + 1e-12))
    fail(ErrorCode::VarianceUnsafe, "Direct sampling of exp(a T) needs 2a <= R for finite variance");
}

inline PathConfig pilot_config(const PathConfig& cfg) {
  PathConfig p = cfg;
  p.n_paths = std::min<std::size_t>(cfg.n_paths, 4000);
  p.epsilon_tail = 1e-2;
  return p;
}

}  // namespace detail

inline McEstimate estimate_moment_T(const LevyModel& m, double a, double r, const PathConfig& cfg,
                                    McMode mode = McMode::Auto) {
  validate(m);
  cfg.validate();
  require(!std::isnan(r), "r must not be NaN");
  CriteriaReport rep = check_finiteness(m, a);
  if (rep.verdict_T == Verdict::Infinite)
    fail(ErrorCode::CriterionFails, "first passage moment infinite: " + rep.governing_rule);
  Classification c = classify(m);
  if (r < 0.0) return detail::exact_estimate(1.0, cfg.n_paths, cfg.seed);

  if (c.is_subordinator) {
    if (mode == McMode::Auto) mode = McMode::Direct;
    if (mode != McMode::Direct) fail(ErrorCode::Unsupported, "subordinators have no tilt; use Direct mode");
  } else if (mode == McMode::Auto) {
    mode = c.is_spectrally_negative ? McMode::Exact : McMode::EsscherIS;
  }

  KernelSpec k;
  k.quantity = Quantity::T;
  k.r = r;
  k.step = cfg.step;
  k.horizon = cfg.horizon;

  if (mode == McMode::Exact) {
    if (!c.is_spectrally_negative) fail(ErrorCode::Unsupported, "Exact mode needs a spectrally negative model");
    return detail::exact_estimate(std::exp(*rep.gamma * r), cfg.n_paths, cfg.seed);
  }
  if (mode == McMode::Direct) {
    detail::direct_guard(a, rep.R);
    auto v = detail::run_paths(cfg, StreamTag::Main, [&](RandomStream& rs) {
      PathOutcome o = simulate_path(m, m, k, rs);
      if (!o.passed) fail(ErrorCode::HorizonOverflow, "level never reached");
      return std::exp(a * o.T);
    });
    return detail::summarize(v, McMode::Direct, cfg.seed);
  }
  double g = *rep.gamma;
  LevyModel q = esscher(m, g);
  k.tilting = Tilting::Global;
  auto v = detail::run_paths(cfg, StreamTag::Main, [&](RandomStream& rs) {
    PathOutcome o = simulate_path(m, q, k, rs);
    return std::exp(g * o.X_T);
  });
  return detail::summarize(v, McMode::EsscherIS, cfg.seed);
}

namespace detail {

// sup_u exp(-gamma u) E[exp(a Q_u)] for Q = N or rho, used by the stopping gap.
inline double level_constant(const LevyModel& m, double a, Quantity q, const PathConfig& cfg);


inline McEstimate run_sojourn(const LevyModel& m, double a, double r, const PathConfig& cfg, McMode mode,
                              Quantity q, std::optional<double> forced_constant) {
  validate(m);
  cfg.validate();
  require(!std::isnan(r), "r must not be NaN");
  CriteriaReport rep = check_finiteness(m, a);
  Verdict v = q == Quantity::N ? rep.verdict_N : rep.verdict_rho;
  if (v == Verdict::Infinite)
    fail(ErrorCode::CriterionFails,
         std::string(q == Quantity::N ? "sojourn" : "last exit") + " moment infinite: " + rep.governing_rule);
  Classification c = classify(m);
  KernelSpec k;
  k.quantity = q;
  k.r = r;
  k.step = cfg.step;
  k.horizon = cfg.horizon;

  if (c.is_subordinator) {
    // Nondecreasing paths: N_r and rho_r both equal T_r.
    if (mode == McMode::Auto) mode = McMode::Direct;
    if (mode != McMode::Direct) fail(ErrorCode::Unsupported, "subordinators have no tilt; use Direct mode");
    detail::direct_guard(a, rep.R);
    if (r < 0.0) return exact_estimate(1.0, cfg.n_paths, cfg.seed);
    k.quantity = Quantity::T;
    auto vals = run_paths(cfg, StreamTag::Main, [&](RandomStream& rs) {
      PathOutcome o = simulate_path(m, m, k, rs);
      if (!o.passed) fail(ErrorCode::HorizonOverflow, "level never reached");
      return std::exp(a * o.T);
    });
    return summarize(vals, McMode::Direct, cfg.seed);
  }
  if (mode == McMode::Auto) mode = McMode::EsscherIS;
  if (mode == McMode::Exact) fail(ErrorCode::Unsupported, "no zero-variance estimator for this quantity");
  if (mode == McMode::Direct) direct_guard(a, rep.R);

  double g = *rep.gamma;
  double C = forced_constant ? *forced_constant : level_constant(m, a, q, cfg);
  double eps = cfg.epsilon_tail;
  double decay;
  if (q == Quantity::N) {
    decay = cramer_root(m);
  } else {
    decay = upper_root(m, a) - g;
  }
  k.gap = std::max(std::log(C / eps), 0.0) / decay + 1e-12;

  std::vector<double> cert;
  std::vector<double> vals;
  LevyModel tilted = m;
  if (mode == McMode::EsscherIS) {
    tilted = esscher(m, g);
    k.tilting = q == Quantity::N ? Tilting::BelowLevel : Tilting::Global;
  }
  double g2 = q == Quantity::Rho ? upper_root(m, a) : 0.0;
  auto pairs = parallel_map<std::pair<double, double>>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    RandomStream rs(cfg.seed, StreamTag::Main, i);
    PathOutcome o = simulate_path(m, tilted, k, rs);
    double val, bound;
    if (q == Quantity::N) {
      val = mode == McMode::EsscherIS ? std::exp(g * o.below_dx) : std::exp(a * o.N);
      bound = val * C * std::exp(-decay * (o.X_S - r));
    } else {
      // Future returns below r after S add at most exp(a S) C exp(-g2 (X_S - r)).
      double lr = mode == McMode::EsscherIS ? g * o.X_S - a * o.S : 0.0;
      val = std::exp(lr + a * o.rho);
      bound = C * std::exp(lr + a * o.S - g2 * (o.X_S - r));
    }
    return std::make_pair(val, bound);
  });
  vals.resize(pairs.size());
  cert.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    vals[i] = pairs[i].first;
    cert[i] = pairs[i].second;
  }
  McEstimate e = summarize(vals, mode, cfg.seed);
  e.truncation_cert = pairwise_sum(cert) / static_cast<double>(cert.size());
  return e;
}

inline double level_constant(const LevyModel& m, double a, Quantity q, const PathConfig& cfg) {
  Classification c = classify(m);
  if (c.is_spectrally_negative) {
    // exp(-gamma u) E[exp(a Q_u)] does not depend on u here.
    return q == Quantity::N ? specneg_N(m, a, 0.0).value : specneg_rho(m, a, 0.0).value;
  }
  // Pilot estimate at r = 0, inflated; a heuristic bound for the sup over levels.
  PathConfig p = pilot_config(cfg);
  McEstimate e = run_sojourn(m, a, 0.0, p, McMode::EsscherIS, q, 4.0);
  return 2.0 * (e.mean + 3.0 * e.std_err);
}

}  // namespace detail

inline McEstimate estimate_moment_N(const LevyModel& m, double a, double r, const PathConfig& cfg,
                                    McMode mode = McMode::Auto) {
  return detail::run_sojourn(m, a, r, cfg, mode, Quantity::N, std::nullopt);
}

inline McEstimate estimate_moment_rho(const LevyModel& m, double a, double r, const PathConfig& cfg,
                                      McMode mode = McMode::Auto) {
  return detail::run_sojourn(m, a, r, cfg, mode, Quantity::Rho, std::nullopt);
}

namespace detail {

inline McEstimate run_inf_transform(const LevyModel& m, double gamma, const PathConfig& cfg, double C) {
  KernelSpec k;
  k.quantity = Quantity::Inf;
  k.step = cfg.step;
  k.horizon = cfg.horizon;
  k.gap = std::max(std::log(C / cfg.epsilon_tail), 0.0) / gamma + 1e-12;
  auto vals = run_paths(cfg, StreamTag::Main, [&](RandomStream& rs) {
    PathOutcome o = simulate_path(m, m, k, rs);
    return std::exp(-gamma * o.min);
  });
  McEstimate e = summarize(vals, McMode::Direct, cfg.seed);
  // A later new minimum below the stopped one adds at most exp(-gamma D) E[exp(-gamma I)].
  e.truncation_cert = e.mean * C * std::exp(-gamma * k.gap);
  return e;
}

}  // namespace detail

// E[exp(-gamma I)] with I the overall infimum.
inline McEstimate estimate_inf_transform(const LevyModel& m, double gamma, const PathConfig& cfg) {
  validate(m);
  cfg.validate();
  require(!std::isnan(gamma) && gamma >= 0.0, "gamma must be >= 0");
  if (gamma == 0.0) return detail::exact_estimate(1.0, cfg.n_paths, cfg.seed);
  if (!(log_laplace(m, gamma) < 0.0)) fail(ErrorCode::TransformGEOne, "phi(gamma) >= 1: E[exp(-gamma I)] infinite");
  if (!classify(m).p_neg_positive) return detail::exact_estimate(1.0, cfg.n_paths, cfg.seed);
  double C;
  if (classify(m).is_spectrally_negative) {
    C = inf_transform(m, gamma).value;
  } else {
    PathConfig p = detail::pilot_config(cfg);
    McEstimate e = detail::run_inf_transform(m, gamma, p, 4.0);
    C = 2.0 * (e.mean + 3.0 * e.std_err);
  }
  return detail::run_inf_transform(m, gamma, cfg, C);
}

// Overshoot X_{T_r} - r, one sample per path, under the Esscher-tilted law
// (or under the original law when under_tilt is false).
inline std::vector<OvershootSample> estimate_overshoot(const LevyModel& m, double a, const std::vector<double>& r_list,
                                                       const PathConfig& cfg, bool under_tilt = true) {
  validate(m);
  cfg.validate();
  CriteriaReport rep = check_finiteness(m, a);
  if (rep.verdict_T == Verdict::Infinite)
    fail(ErrorCode::CriterionFails, "first passage moment infinite: " + rep.governing_rule);
  if (!rep.gamma) fail(ErrorCode::Unsupported, "subordinators have no tilt");
  double g = *rep.gamma;
  Classification c = classify(m);
  std::vector<OvershootSample> out;
  LevyModel q = under_tilt ? esscher(m, g) : m;
  for (std::size_t j = 0; j < r_list.size(); ++j) {
    double r = r_list[j];
    OvershootSample s;
    s.r = r;
    s.gamma = g;
    if (c.is_spectrally_negative) {
      s.values.assign(cfg.n_paths, 0.0);
    } else {
      KernelSpec k;
      k.quantity = Quantity::T;
      k.tilting = Tilting::Global;
      k.r = r;
      k.step = cfg.step;
      k.horizon = cfg.horizon;
      PathConfig pc = cfg;
      pc.seed = cfg.seed + 0x9E3779B97F4A7C15ULL * (j + 1);
      s.values = detail::run_paths(pc, StreamTag::Overshoot, [&](RandomStream& rs) {
        PathOutcome o = simulate_path(m, q, k, rs);
        return std::max(o.X_T - r, 0.0);
      });
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct AsymptotePoint {
  double r = 0.0;
  double value = 0.0;
  double std_err = 0.0;
  McMode mode = McMode::Exact;
};

// exp(-gamma r) times the estimate of E[exp(a T_r)], one entry per level.
inline std::vector<AsymptotePoint> empirical_T_asymptote(const LevyModel& m, double a, const std::vector<double>& r_list,
                                                         const PathConfig& cfg) {
  CriteriaReport rep = check_finiteness(m, a);
  if (rep.verdict_T == Verdict::Infinite)
    fail(ErrorCode::CriterionFails, "first passage moment infinite: " + rep.governing_rule);
  if (!rep.gamma) fail(ErrorCode::Unsupported, "subordinators have no tilt");
  double g = *rep.gamma;
  std::vector<AsymptotePoint> out;
  for (double r : r_list) {
    McEstimate e = estimate_moment_T(m, a, r, cfg);
    double s = std::exp(-g * r);
    out.push_back({r, s * e.mean, s * e.std_err, e.mode});
  }
  return out;
}

struct PathFunctionals {
  double T = 0.0;
  double N = 0.0;
  double rho = 0.0;
};

// Joint (T_r, N_r, rho_r) under the original law, one triple per path.
inline std::vector<PathFunctionals> sample_functionals(const LevyModel& m, double r, const PathConfig& cfg) {
  validate(m);
  cfg.validate();
  Classification c = classify(m);
  KernelSpec k;
  k.quantity = Quantity::Rho;
  k.r = r;
  k.step = cfg.step;
  k.horizon = cfg.horizon;
  if (c.is_subordinator) {
    k.quantity = Quantity::T;
  } else {
    if (!(mean(m) > 0.0)) fail(ErrorCode::CriterionFails, "E[X_1] <= 0: last exit time is infinite");
    k.gap = std::log(1.0 / cfg.epsilon_tail) / cramer_root(m);
  }
  return parallel_map<PathFunctionals>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    RandomStream rs(cfg.seed, StreamTag::Main, i);
    PathOutcome o = simulate_path(m, m, k, rs);
    if (c.is_subordinator) return PathFunctionals{o.T, o.T, o.T};
    return PathFunctionals{o.T, o.N, o.rho};
  });
}

}  // namespace levy
