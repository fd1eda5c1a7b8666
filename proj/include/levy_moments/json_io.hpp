#pragma once

#include <cmath>
#include <string>

#include "levy_moments/closedform.hpp"
#include "levy_moments/criteria.hpp"
#include "levy_moments/model_json.hpp"
#include "levy_moments/montecarlo.hpp"
#include "levy_moments/quadrature.hpp"
#include "levy_moments/skeleton.hpp"

namespace levy {

namespace detail {

// JSON has no infinities; they are written as strings.
inline json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline std::string hex_seed(std::uint64_t s) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(s));
  return buf;
}

}  // namespace detail

inline json to_json(const CriteriaReport& r) {
  json o;
  o["a"] = r.a;
  o["R"] = detail::number(r.R);
  o["gamma"] = r.gamma ? json(*r.gamma) : json(nullptr);
  o["tilt_mean"] = r.tilt_mean ? json(*r.tilt_mean) : json(nullptr);
  o["verdict_T"] = to_string(r.verdict_T);
  o["verdict_N"] = to_string(r.verdict_N);
  o["verdict_rho"] = to_string(r.verdict_rho);
  o["governing_rule"] = r.governing_rule;
  return o;
}

inline json to_json(const ClosedForm& c) {
  json o;
  o["mode"] = "Exact";
  o["value"] = detail::number(c.value);
  o["error"] = 0.0;
  o["formula_id"] = c.formula_id;
  json params = json::object();
  for (const auto& [k, v] : c.inputs.params) params[k] = detail::number(v);
  o["inputs"] = params;
  if (!c.inputs.model_hash.empty()) o["model_hash"] = c.inputs.model_hash;
  return o;
}

inline json to_json(const McEstimate& e) {
  json o;
  o["mode"] = "MC";
  o["estimator"] = to_string(e.mode);
  o["mean"] = detail::number(e.mean);
  o["error"] = detail::number(e.std_err);
  o["std_err"] = detail::number(e.std_err);
  o["n_eff"] = e.n_eff;
  o["ci95"] = {detail::number(e.ci95_lo), detail::number(e.ci95_hi)};
  o["truncation_cert"] = detail::number(e.truncation_cert);
  o["seed"] = detail::hex_seed(e.seed);
  return o;
}

inline json to_json(const QuadratureResult& q) {
  json o;
  o["mode"] = "Quadrature";
  o["verdict"] = to_string(q.verdict);
  o["value"] = q.value ? detail::number(*q.value) : json(nullptr);
  o["error"] = detail::number(q.abs_err);
  o["abs_err"] = detail::number(q.abs_err);
  o["tail_bound"] = detail::number(q.tail_bound);
  o["tail_method"] = q.tail_method;
  o["tolerance_met"] = q.tolerance_met;
  o["horizon"] = detail::number(q.horizon);
  o["nodes_used"] = q.nodes_used;
  if (q.witness) {
    const auto& w = *q.witness;
    o["witness"] = {{"t", detail::number(w.t)},
                    {"log_integrand", detail::number(w.log_integrand)},
                    {"growth_rate", detail::number(w.growth_rate)},
                    {"decay_power", detail::number(w.decay_power)},
                    {"excess", detail::number(w.excess)},
                    {"confirmed", w.confirmed}};
  }
  return o;
}

inline json to_json(const BridgeReport& b) {
  auto pair = [](const BridgePair& p) {
    json o;
    o["process"] = to_json(p.lhs);
    o["walk"] = to_json(p.rhs);
    o["compatible"] = p.compatible;
    return o;
  };
  json o;
  o["a"] = b.a;
  o["b"] = b.b;
  o["r"] = b.r;
  o["R"] = detail::number(b.R);
  o["finite"] = b.finite;
  o["T"] = pair(b.T);
  o["N"] = pair(b.N);
  o["rho"] = pair(b.rho);
  o["compatible"] = b.compatible;
  return o;
}

}  // namespace levy
