#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "levy_moments/levy_moments.hpp"

namespace {

using levy::json;

struct Options {
  std::string model_path;
  double a = 0.0;
  std::optional<double> r;
  std::vector<double> r_list;
  std::size_t paths = 100000;
  double step = 1e-3;
  std::uint64_t seed = levy::kDefaultSeed;
  unsigned workers = 1;
  double tol = 1e-8;
  double horizon_eps = 1e-3;
  double horizon = 1e4;
  std::string out;
  std::string format;
  std::string quantity = "T";
  std::string mode = "Auto";
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LEVY_MOMENTS_SEED")) {
    try {
      return std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
      levy::fail(levy::ErrorCode::InvalidArgument, std::string("LEVY_MOMENTS_SEED is not an integer: ") + env);
    }
  }
  return levy::kDefaultSeed;
}

levy::PathConfig path_config(const Options& o) {
  levy::PathConfig c;
  c.n_paths = o.paths;
  c.step = o.step;
  c.seed = o.seed;
  c.workers = o.workers;
  c.epsilon_tail = o.horizon_eps;
  c.horizon = o.horizon;
  c.validate();
  return c;
}

json config_json(const levy::PathConfig& c) {
  // workers is left out on purpose: results do not depend on it.
  json o;
  o["paths"] = c.n_paths;
  o["step"] = c.step;
  o["horizon"] = c.horizon;
  o["horizon_eps"] = c.epsilon_tail;
  o["seed"] = levy::detail::hex_seed(c.seed);
  return o;
}

double require_r(const Options& o) {
  levy::require(o.r.has_value(), "--r is required for this command");
  return *o.r;
}

std::vector<double> levels(const Options& o) {
  if (!o.r_list.empty()) return o.r_list;
  if (o.r) return {*o.r};
  levy::fail(levy::ErrorCode::InvalidArgument, "--r or --r-list is required for this command");
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  levy::require(static_cast<bool>(f), "cannot open output file '" + o.out + "'");
  f << text;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json header(const std::string& command, const levy::LevyModel& m) {
  json o;
  o["command"] = command;
  o["model"] = levy::model_to_json(m);
  o["model_hash"] = levy::model_hash(m);
  return o;
}

// --- criteria -------------------------------------------------------------

int run_criteria(const Options& o) {
  levy::LevyModel m = levy::load_model(o.model_path);
  json out = header("criteria", m);
  out["report"] = levy::to_json(levy::check_finiteness(m, o.a));
  emit(o, dump(out));
  return 0;
}

// --- exact ----------------------------------------------------------------

levy::ClosedForm exact_value(const levy::LevyModel& m, const std::string& q, double a, double r) {
  if (m.family == levy::Family::StableSubordinator) {
    levy::require(q == "T", "the stable subordinator has a closed form for T only");
    levy::require(m.drift == 0.0, "the stable closed form needs zero drift");
    return levy::stable_T_moment(m.stable_index, a, r);
  }
  if (q == "T") return levy::specneg_T(m, a, r);
  if (q == "N") return levy::specneg_N(m, a, r);
  if (q == "rho") return levy::specneg_rho(m, a, r);
  if (q == "inf") return levy::inf_transform(m, a);
  levy::fail(levy::ErrorCode::InvalidArgument, "unknown quantity '" + q + "' (expected T, N, rho or inf)");
}

int run_exact(const Options& o) {
  levy::LevyModel m = levy::load_model(o.model_path);
  double r = o.quantity == "inf" ? 0.0 : require_r(o);
  json out = header("exact", m);
  out["quantity"] = o.quantity;
  out["a"] = o.a;
  if (o.quantity != "inf") out["r"] = r;
  out["result"] = levy::to_json(exact_value(m, o.quantity, o.a, r));
  emit(o, dump(out));
  return 0;
}

// --- estimate -------------------------------------------------------------

levy::McEstimate estimate(const levy::LevyModel& m, const std::string& q, double a, double r,
                          const levy::PathConfig& cfg, levy::McMode mode) {
  if (q == "T") return levy::estimate_moment_T(m, a, r, cfg, mode);
  if (q == "N") return levy::estimate_moment_N(m, a, r, cfg, mode);
  if (q == "rho") return levy::estimate_moment_rho(m, a, r, cfg, mode);
  if (q == "inf") return levy::estimate_inf_transform(m, a, cfg);
  levy::fail(levy::ErrorCode::InvalidArgument, "unknown quantity '" + q + "' (expected T, N, rho or inf)");
}

int run_estimate(const Options& o) {
  levy::LevyModel m = levy::load_model(o.model_path);
  levy::PathConfig cfg = path_config(o);
  double r = o.quantity == "inf" ? 0.0 : require_r(o);
  levy::McEstimate e = estimate(m, o.quantity, o.a, r, cfg, levy::mode_from_string(o.mode));
  json out = header("estimate", m);
  out["quantity"] = o.quantity;
  out["a"] = o.a;
  if (o.quantity != "inf") out["r"] = r;
  out["config"] = config_json(cfg);
  out["result"] = levy::to_json(e);
  emit(o, dump(out));
  return 0;
}

// --- test-integrals -------------------------------------------------------

int run_test_integrals(const Options& o) {
  levy::LevyModel m = levy::load_model(o.model_path);
  std::vector<double> rs = levels(o);
  levy::CriteriaReport crit = levy::check_finiteness(m, o.a);
  std::string format = o.format.empty() ? (rs.size() > 1 ? "csv" : "json") : o.format;

  struct Row {
    double r;
    levy::QuadratureResult U, V, U1, V1;
  };
  std::vector<Row> rows;
  for (double r : rs)
    rows.push_back({r, levy::U_a(m, o.a, r, o.tol), levy::V_a(m, o.a, r, o.tol), levy::U1_a(m, o.a, r, o.tol),
                    levy::V1_a(m, o.a, r, o.tol)});
  auto scaled = [&](const Row& w) {
    if (!crit.gamma || !w.U.value) return std::nan("");
    return std::exp(-*crit.gamma * w.r) * *w.U.value;
  };

  if (format == "csv") {
    std::ostringstream s;
    s << "r,mode,U_a,U_a_error,U_a_verdict,V_a,V_a_error,V_a_verdict,U1_a,U1_a_error,U1_a_verdict,V1_a,V1_a_error,"
         "V1_a_verdict,scaled_U_a,U_a_tail_bound\n";
    auto cell = [](const levy::QuadratureResult& q) {
      return fmt(q.value.value_or(levy::kInf)) + "," + fmt(q.abs_err) + "," + levy::to_string(q.verdict);
    };
    for (const Row& w : rows)
      s << fmt(w.r) << ",Quadrature," << cell(w.U) << "," << cell(w.V) << "," << cell(w.U1) << "," << cell(w.V1) << ","
        << fmt(scaled(w)) << "," << fmt(w.U.tail_bound) << "\n";
    emit(o, s.str());
    return 0;
  }
  levy::require(format == "json", "--format must be json or csv");
  json out = header("test-integrals", m);
  out["a"] = o.a;
  out["tol"] = o.tol;
  out["criteria"] = levy::to_json(crit);
  json arr = json::array();
  for (const Row& w : rows) {
    json e;
    e["r"] = w.r;
    e["U_a"] = levy::to_json(w.U);
    e["V_a"] = levy::to_json(w.V);
    e["U1_a"] = levy::to_json(w.U1);
    e["V1_a"] = levy::to_json(w.V1);
    e["scaled_U_a"] = levy::detail::number(scaled(w));
    arr.push_back(e);
  }
  out["levels"] = arr;
  if (levy::classify(m).p_neg_positive) out["sojourn_zero_moment"] = levy::to_json(levy::sojourn_zero_moment(m, o.a, o.tol));
  emit(o, dump(out));
  return 0;
}

// --- asymptote ------------------------------------------------------------

int run_asymptote(const Options& o) {
  levy::LevyModel m = levy::load_model(o.model_path);
  levy::require(!o.r_list.empty(), "--r-list is required for asymptote");
  levy::PathConfig cfg = path_config(o);
  levy::CriteriaReport crit = levy::check_finiteness(m, o.a);
  levy::require(o.quantity == "T" || o.quantity == "rho", "asymptote supports --quantity T or rho");
  if (!crit.gamma) levy::fail(levy::ErrorCode::Unsupported, "subordinators have no exponential growth rate");
  double g = *crit.gamma;
  levy::Classification cl = levy::classify(m);

  std::string constant;
  std::string constant_ua;
  try {
    if (o.quantity == "T")
      constant = fmt(levy::asymptotic_constant_T(m, o.a));
    else
      constant = fmt(levy::asymptotic_constant_rho(m, o.a, cfg));
  } catch (const levy::Error& e) {
    if (e.code() == levy::ErrorCode::InvalidArgument) throw;
  }
  if (o.quantity == "rho") {
    try {
      constant_ua = fmt(levy::asymptotic_constant_ua(m, o.a));
    } catch (const levy::Error& e) {
      if (e.code() == levy::ErrorCode::InvalidArgument) throw;
    }
  }
  // Exact mode would reproduce the closed form; the asymptote study wants paths.
  levy::McMode mode = levy::mode_from_string(o.mode);
  if (mode == levy::McMode::Auto && o.quantity == "T" && cl.is_spectrally_negative) mode = levy::McMode::EsscherIS;

  std::ostringstream s;
  s << "r,quantity,mode,value,error,scaled,scaled_error,constant\n";
  for (double r : o.r_list) {
    double sc = std::exp(-g * r);
    levy::McEstimate e = o.quantity == "T" ? levy::estimate_moment_T(m, o.a, r, cfg, mode)
                                           : levy::estimate_moment_rho(m, o.a, r, cfg, mode);
    s << fmt(r) << "," << o.quantity << ",MC:" << levy::to_string(e.mode) << "," << fmt(e.mean) << ","
      << fmt(e.std_err) << "," << fmt(sc * e.mean) << "," << fmt(sc * e.std_err) << "," << constant << "\n";
    if (o.quantity == "rho") {
      levy::QuadratureResult u = levy::U_a(m, o.a, r, o.tol);
      double v = u.value.value_or(levy::kInf);
      s << fmt(r) << ",U_a,Quadrature," << fmt(v) << "," << fmt(u.abs_err) << "," << fmt(sc * v) << ","
        << fmt(sc * u.abs_err) << "," << constant_ua << "\n";
    }
  }
  emit(o, s.str());
  return 0;
}

// --- bridge ---------------------------------------------------------------

int run_bridge(const Options& o) {
  levy::LevyModel m = levy::load_model(o.model_path);
  levy::require(m.family == levy::Family::CompoundPoisson && m.drift == 0.0,
                "bridge needs a driftless CompoundPoisson model");
  levy::PathConfig cfg = path_config(o);
  double r = require_r(o);
  json out = header("bridge", m);
  out["config"] = config_json(cfg);
  out["result"] = levy::to_json(levy::verify_cpp_bridge(m.jump_rate, m.jump_law, o.a, r, cfg));
  emit(o, dump(out));
  return 0;
}

// --- verify ---------------------------------------------------------------

struct VerifyRow {
  std::string quantity, method;
  double value = 0.0, error = 0.0, reference = std::nan(""), tolerance = std::nan("");
  std::string pass = "n/a";
};

// Brownian oracles are written for unit variance; rescale space by sigma.
std::optional<levy::QuadratureResult> density_oracle(const levy::LevyModel& m, const std::string& q, double a,
                                                     double r) {
  if (m.family != levy::Family::BrownianDrift || m.drift <= 0.0) return std::nullopt;
  double s = std::sqrt(m.gaussian_var), mu = m.drift / s, rr = r / s;
  if (q == "T" && rr > 0.0) return levy::density_moment([&](double y) { return levy::bm_T_density(mu, rr, y); }, a);
  if (q == "rho" && rr >= 0.0)
    return levy::density_moment([&](double y) { return levy::bm_rho_density(mu, rr, y); }, a);
  return std::nullopt;
}

int run_verify(const Options& o) {
  levy::LevyModel m = levy::load_model(o.model_path);
  levy::PathConfig cfg = path_config(o);
  double r = require_r(o);
  levy::CriteriaReport crit = levy::check_finiteness(m, o.a);
  levy::Classification cl = levy::classify(m);
  std::vector<VerifyRow> rows;
  int failures = 0;

  for (std::string q : {"T", "N", "rho"}) {
    levy::Verdict v = q == "T" ? crit.verdict_T : q == "N" ? crit.verdict_N : crit.verdict_rho;
    if (v == levy::Verdict::Infinite) {
      rows.push_back({q, "Criteria", levy::kInf, 0.0, std::nan(""), std::nan(""), "n/a"});
      continue;
    }
    std::optional<double> ref;
    std::vector<VerifyRow> local;
    try {
      levy::ClosedForm c = exact_value(m, q, o.a, r);
      ref = c.value;
      local.push_back({q, "Exact:" + c.formula_id, c.value, 0.0, std::nan(""), std::nan(""), "ref"});
    } catch (const levy::Error&) {
    }
    std::optional<levy::QuadratureResult> quad = density_oracle(m, q, o.a, r);
    std::string quad_name = "Quadrature:density";
    if (!quad && q == "T" && cl.is_subordinator) {
      levy::QuadratureResult u = levy::U_a(m, o.a, r, o.tol);
      if (u.value) {
        u.value = 1.0 + o.a * *u.value;
        u.abs_err *= o.a;
      }
      quad = u;
      quad_name = "Quadrature:1+aU_a";
    }
    if (!quad && q == "N" && r == 0.0 && cl.p_neg_positive) {
      quad = levy::sojourn_zero_moment(m, o.a, o.tol);
      quad_name = "Quadrature:sojourn_zero";
    }
    if (quad && quad->value) {
      VerifyRow w{q, quad_name, *quad->value, quad->abs_err, std::nan(""), std::nan(""), "ref"};
      if (ref) {
        w.reference = *ref;
        w.tolerance = 1e-6 * std::abs(*ref) + quad->abs_err;
        bool ok = std::abs(w.value - *ref) <= w.tolerance;
        w.pass = ok ? "PASS" : "FAIL";
        failures += !ok;
      } else {
        ref = w.value;
      }
      local.push_back(w);
    }
    try {
      levy::McMode mode = levy::mode_from_string(o.mode);
      if (mode == levy::McMode::Auto && q == "T" && cl.is_spectrally_negative) mode = levy::McMode::EsscherIS;
      levy::McEstimate e = estimate(m, q, o.a, r, cfg, mode);
      VerifyRow w{q, std::string("MC:") + levy::to_string(e.mode), e.mean, e.std_err, std::nan(""), std::nan(""), "n/a"};
      if (ref) {
        w.reference = *ref;
        w.tolerance = 3.0 * e.std_err + e.truncation_cert;
        bool ok = std::abs(e.mean - *ref) <= w.tolerance;
        w.pass = ok ? "PASS" : "FAIL";
        failures += !ok;
      }
      local.push_back(w);
    } catch (const levy::Error& e) {
      if (e.code() == levy::ErrorCode::InvalidArgument) throw;
      local.push_back({q, "MC", std::nan(""), std::nan(""), std::nan(""), std::nan(""), std::string("skipped: ") + e.what()});
    }
    rows.insert(rows.end(), local.begin(), local.end());
  }

  std::ostringstream s;
  s << "quantity,method,value,error,reference,deviation,tolerance,pass\n";
  for (const auto& w : rows) {
    std::string pass = w.pass;
    for (char& ch : pass)
      if (ch == ',') ch = ';';
    s << w.quantity << "," << w.method << "," << fmt(w.value) << "," << fmt(w.error) << "," << fmt(w.reference) << ","
      << fmt(w.value - w.reference) << "," << fmt(w.tolerance) << "," << pass << "\n";
  }
  emit(o, s.str());
  std::cerr << (failures == 0 ? "verify: all comparisons passed\n"
                              : "verify: " + std::to_string(failures) + " comparison(s) failed\n");
  return 0;
}

void add_common(CLI::App* c, Options& o, bool needs_a = true) {
  c->add_option("--model", o.model_path, "model JSON file")->required()->check(CLI::ExistingFile);
  if (needs_a) c->add_option("--a", o.a, "exponent a > 0")->required();
  c->add_option("--out", o.out, "output file (default stdout)");
}

void add_mc(CLI::App* c, Options& o) {
  c->add_option("--paths", o.paths, "Monte Carlo paths");
  c->add_option("--step", o.step, "time step for Gaussian parts");
  c->add_option("--seed", o.seed, "master seed (default from LEVY_MOMENTS_SEED)");
  c->add_option("--workers", o.workers, "worker threads");
  c->add_option("--horizon-eps", o.horizon_eps, "truncation budget epsilon");
  c->add_option("--horizon", o.horizon, "hard cap on simulated time per path");
  c->add_option("--mode", o.mode, "Auto, Direct, EsscherIS or Exact");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  try {
    o.seed = default_seed();
  } catch (const levy::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App app{"Exponential moments of first passage, sojourn and last exit times of Levy processes"};
  app.require_subcommand(1);

  auto* criteria = app.add_subcommand("criteria", "finiteness verdicts for T, N and rho");
  add_common(criteria, o);

  auto* exact = app.add_subcommand("exact", "closed-form moment");
  add_common(exact, o);
  exact->add_option("--r", o.r, "level r");
  exact->add_option("--quantity", o.quantity, "T, N, rho or inf");

  auto* est = app.add_subcommand("estimate", "Monte Carlo estimate");
  add_common(est, o);
  est->add_option("--r", o.r, "level r");
  est->add_option("--quantity", o.quantity, "T, N, rho or inf");
  add_mc(est, o);

  auto* integ = app.add_subcommand("test-integrals", "U_a, V_a and their skeleton series");
  add_common(integ, o);
  integ->add_option("--r", o.r, "level r");
  integ->add_option("--r-list", o.r_list, "levels")->delimiter(',');
  integ->add_option("--tol", o.tol, "requested tolerance");
  integ->add_option("--format", o.format, "json or csv");

  auto* asym = app.add_subcommand("asymptote", "exp(-gamma r) scaling study over levels");
  add_common(asym, o);
  asym->add_option("--r-list", o.r_list, "levels")->delimiter(',');
  asym->add_option("--quantity", o.quantity, "T or rho");
  asym->add_option("--tol", o.tol, "quadrature tolerance");
  add_mc(asym, o);

  auto* bridge = app.add_subcommand("bridge", "compound Poisson versus embedded walk moments");
  add_common(bridge, o);
  bridge->add_option("--r", o.r, "level r");
  add_mc(bridge, o);

  auto* verify = app.add_subcommand("verify", "closed form vs quadrature vs Monte Carlo table");
  add_common(verify, o);
  verify->add_option("--r", o.r, "level r");
  verify->add_option("--tol", o.tol, "quadrature tolerance");
  add_mc(verify, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    levy::require(o.a > 0.0 || (exact->parsed() && o.quantity == "inf"), "--a must be > 0");
    if (criteria->parsed()) return run_criteria(o);
    if (exact->parsed()) return run_exact(o);
    if (est->parsed()) return run_estimate(o);
    if (integ->parsed()) return run_test_integrals(o);
    if (asym->parsed()) return run_asymptote(o);
    if (bridge->parsed()) return run_bridge(o);
    if (verify->parsed()) return run_verify(o);
  } catch (const levy::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return levy::is_criterion_violation(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
