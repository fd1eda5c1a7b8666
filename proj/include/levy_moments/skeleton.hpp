#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "levy_moments/closedform.hpp"
#include "levy_moments/montecarlo.hpp"
#include "levy_moments/sampling.hpp"

namespace levy {

struct WalkPath {
  std::vector<double> values;  // values[0] = 0
  std::size_t truncated_at = 0;
};

struct WalkFunctionals {
  long tau1 = 0;   // min{k : X_k > r}
  long n1 = 0;     // #{k <= truncated_at : X_k <= r}
  long rho1 = -1;  // max{k <= truncated_at : X_k <= r}, -1 when the walk never sits at or below r
};

inline WalkFunctionals walk_functionals(const WalkPath& path, double r) {
  require(!path.values.empty() && path.values[0] == 0.0, "walk must start at 0");
  require(path.truncated_at < path.values.size(), "truncated_at out of range");
  WalkFunctionals f;
  f.tau1 = -1;
  for (std::size_t k = 0; k <= path.truncated_at; ++k) {
    double v = path.values[k];
    if (v > r) {
      if (f.tau1 < 0) f.tau1 = static_cast<long>(k);
    } else {
      ++f.n1;
      f.rho1 = static_cast<long>(k);
    }
  }
  if (f.tau1 < 0) fail(ErrorCode::HorizonOverflow, "walk truncated before first passage");
  return f;
}

// Random walk with the given increment sampler, stopped once it sits `gap`
// above r (after passing r), or failing beyond max_steps.
template <class Increment>
WalkPath sample_walk(Increment&& inc, double r, double gap, std::size_t max_steps) {
  WalkPath w;
  w.values.push_back(0.0);
  double x = 0.0;
  while (x - r < gap) {
    if (w.values.size() > max_steps) fail(ErrorCode::HorizonOverflow, "walk exceeded the step cap");
    x += inc();
    w.values.push_back(x);
  }
  w.truncated_at = w.values.size() - 1;
  return w;
}

struct BridgePair {
  McEstimate lhs;  // compound Poisson side, exp(a Q)
  McEstimate rhs;  // embedded walk side, exp(b q)
  bool compatible = false;
};

struct BridgeReport {
  double a = 0.0;
  double b = 0.0;
  double r = 0.0;
  double R = 0.0;
  bool finite = false;  // all three moments finite under the criteria
  BridgePair T, N, rho;
  bool compatible = false;
};

namespace detail {

inline bool within_se(const McEstimate& x, const McEstimate& y, double k) {
  double se = std::sqrt(x.std_err * x.std_err + y.std_err * y.std_err);
  return std::abs(x.mean - y.mean) <= k * se;
}

}  // namespace detail

// Compares E[e^{aT_r}], E[e^{aN_r}], E[e^{a rho_r}] of the compound Poisson
// process with E[e^{b tau}], E[e^{b n}], E[e^{b(rho+1)}] of its jump walk,
// exp(b) = lambda / (lambda - a). Both sides are simulated independently.
inline BridgeReport verify_cpp_bridge(double lambda, const JumpLaw& law, double a, double r, const PathConfig& cfg) {
  cfg.validate();
  double b = cpp_bridge(lambda, a);
  LevyModel cp = LevyModel::compound_poisson(lambda, law);
  validate(cp);
  if (!(mean(cp) > 0.0)) fail(ErrorCode::CriterionFails, "E[Y] <= 0: first passage is not a.s. finite");

  BridgeReport rep;
  rep.a = a;
  rep.b = b;
  rep.r = r;
  CriteriaReport crit = check_finiteness(cp, a);
  rep.R = crit.R;
  rep.finite = crit.verdict_rho == Verdict::Finite;

  // Stopping gap. In the finite regime future returns cost at most
  // C exp(-(g2 - g) D) relative; otherwise only the return probability
  // exp(-g0 D) is controlled and the heavy-tailed estimates are reported as is.
  double g0 = cramer_root(cp);
  double gap;
  double g = 0.0, g2 = 0.0;
  const double C = 10.0;
  if (rep.finite) {
    g = *crit.gamma;
    g2 = upper_root(cp, a);
    gap = std::log(C / cfg.epsilon_tail) / std::min(g0, g2 - g);
  } else {
    gap = std::log(1.0 / cfg.epsilon_tail) / g0;
  }

  KernelSpec k;
  k.quantity = Quantity::Rho;
  k.r = r;
  k.gap = gap;
  k.horizon = cfg.horizon;

  struct Triple {
    double T, N, rho, cert_N, cert_rho;
  };
  auto cp_side = parallel_map<Triple>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    RandomStream rs(cfg.seed, StreamTag::Main, i);
    PathOutcome o = simulate_path(cp, cp, k, rs);
    double over = o.X_S - r;
    Triple t{std::exp(a * o.T), std::exp(a * o.N), std::exp(a * o.rho), 0.0, 0.0};
    if (rep.finite) {
      t.cert_N = t.N * C * std::exp(-g0 * over);
      t.cert_rho = C * std::exp(a * o.S - g2 * over);
    }
    return t;
  });
  auto walk_side = parallel_map<Triple>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    RandomStream rs(cfg.seed, StreamTag::Walk, i);
    auto max_steps = static_cast<std::size_t>(cfg.horizon * lambda) + 1;
    WalkPath w = sample_walk([&] { return sample_jump(law, rs); }, r, gap, max_steps);
    WalkFunctionals f = walk_functionals(w, r);
    double over = w.values.back() - r;
    auto K = static_cast<double>(w.truncated_at);
    Triple t{std::exp(b * f.tau1), std::exp(b * f.n1), std::exp(b * (f.rho1 + 1)), 0.0, 0.0};
    if (rep.finite) {
      t.cert_N = t.N * C * std::exp(-g0 * over);
      t.cert_rho = C * std::exp(b * K - g2 * over);
    }
    return t;
  });

  auto collect = [&](const std::vector<Triple>& v, double Triple::*field, double Triple::*cert) {
    std::vector<double> x(v.size()), c(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      x[i] = v[i].*field;
      c[i] = cert ? v[i].*cert : 0.0;
    }
    McEstimate e = detail::summarize(x, McMode::Direct, cfg.seed);
    if (cert) e.truncation_cert = pairwise_sum(c) / static_cast<double>(c.size());
    return e;
  };
  rep.T.lhs = collect(cp_side, &Triple::T, nullptr);
  rep.T.rhs = collect(walk_side, &Triple::T, nullptr);
  rep.N.lhs = collect(cp_side, &Triple::N, &Triple::cert_N);
  rep.N.rhs = collect(walk_side, &Triple::N, &Triple::cert_N);
  rep.rho.lhs = collect(cp_side, &Triple::rho, &Triple::cert_rho);
  rep.rho.rhs = collect(walk_side, &Triple::rho, &Triple::cert_rho);
  for (BridgePair* p : {&rep.T, &rep.N, &rep.rho}) p->compatible = detail::within_se(p->lhs, p->rhs, 3.0);
  rep.compatible = rep.T.compatible && rep.N.compatible && rep.rho.compatible;
  return rep;
}

// Joint (T_r, T1_r) where T1_r is the first integer time with X > r.
inline std::vector<std::pair<double, double>> sample_skeleton_passage(const LevyModel& m, double r,
                                                                      const PathConfig& cfg) {
  validate(m);
  cfg.validate();
  if (!(mean(m) > 0.0)) fail(ErrorCode::CriterionFails, "E[X_1] <= 0: first passage is not a.s. finite");
  require(m.family != Family::StableSubordinator, "skeleton sampling needs a finite-activity model");
  KernelSpec k;
  k.quantity = Quantity::T;
  k.r = r;
  k.step = cfg.step;
  k.horizon = cfg.horizon;
  k.track_skeleton = true;
  return parallel_map<std::pair<double, double>>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    RandomStream rs(cfg.seed, StreamTag::Skeleton, i);
    PathOutcome o = simulate_path(m, m, k, rs);
    return std::make_pair(o.T, o.T1);
  });
}

}  // namespace levy
