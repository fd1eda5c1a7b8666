#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "levy_moments/model.hpp"

namespace levy {

using json = nlohmann::ordered_json;

inline Family family_from_string(const std::string& s) {
  if (s == "BrownianDrift") return Family::BrownianDrift;
  if (s == "CompoundPoisson") return Family::CompoundPoisson;
  if (s == "JumpDiffusion") return Family::JumpDiffusion;
  if (s == "StableSubordinator") return Family::StableSubordinator;
  fail(ErrorCode::InvalidArgument, "unknown family '" + s + "'");
}

inline json jump_law_to_json(const JumpLaw& law) {
  return std::visit(
      [](const auto& j) -> json {
        using J = std::decay_t<decltype(j)>;
        json o;
        if constexpr (std::is_same_v<J, NoJumps>) {
          o["type"] = "None";
        } else if constexpr (std::is_same_v<J, ExponentialJumps>) {
          o["type"] = "Exponential";
          o["mean"] = j.mean;
          o["sign"] = j.sign;
        } else if constexpr (std::is_same_v<J, TwoPointMass>) {
          o["type"] = "TwoPointMass";
          o["x_minus"] = j.x_minus;
          o["p_minus"] = j.p_minus;
          o["x_plus"] = j.x_plus;
          o["p_plus"] = j.p_plus;
        } else {
          o["type"] = "ShiftedExponential";
          o["loc"] = j.loc;
          o["mean"] = j.mean;
          o["sign"] = j.sign;
        }
        return o;
      },
      law);
}

namespace detail {

inline double num_field(const json& o, const char* key, double fallback, bool required) {
  auto it = o.find(key);
  if (it == o.end()) {
    require(!required, std::string("missing field '") + key + "'");
    return fallback;
  }
  require(it->is_number(), std::string("field '") + key + "' must be a number");
  return it->template get<double>();
}

inline int sign_field(const json& o) {
  double s = num_field(o, "sign", 1.0, false);
  require(s == 1.0 || s == -1.0, "field 'sign' must be +1 or -1");
  return static_cast<int>(s);
}

}  // namespace detail

inline JumpLaw jump_law_from_json(const json& o) {
  require(o.is_object(), "jump_law must be an object");
  auto it = o.find("type");
  require(it != o.end() && it->is_string(), "jump_law.type must be a string");
  std::string type = it->get<std::string>();
  if (type == "None") return NoJumps{};
  if (type == "Exponential")
    return ExponentialJumps{detail::num_field(o, "mean", 0, true), detail::sign_field(o)};
  if (type == "TwoPointMass")
    return TwoPointMass{detail::num_field(o, "x_minus", 0, true), detail::num_field(o, "p_minus", 0, true),
                        detail::num_field(o, "x_plus", 0, true), detail::num_field(o, "p_plus", 0, true)};
  if (type == "ShiftedExponential")
    return ShiftedExponentialJumps{detail::num_field(o, "loc", 0, true), detail::num_field(o, "mean", 0, true),
                                   detail::sign_field(o)};
  fail(ErrorCode::InvalidArgument, "unknown jump_law.type '" + type + "'");
}

inline json model_to_json(const LevyModel& m) {
  json o;
  o["family"] = to_string(m.family);
  o["drift"] = m.drift;
  o["gaussian_var"] = m.gaussian_var;
  o["jump_rate"] = m.jump_rate;
  o["jump_law"] = jump_law_to_json(m.jump_law);
  if (m.family == Family::StableSubordinator) o["stable_index"] = m.stable_index;
  return o;
}

inline LevyModel model_from_json(const json& o) {
  require(o.is_object(), "model must be a JSON object");
  auto fam = o.find("family");
  require(fam != o.end() && fam->is_string(), "field 'family' must be a string");
  LevyModel m;
  m.family = family_from_string(fam->get<std::string>());
  m.drift = detail::num_field(o, "drift", 0.0, false);
  m.gaussian_var = detail::num_field(o, "gaussian_var", 0.0, false);
  m.jump_rate = detail::num_field(o, "jump_rate", 0.0, false);
  auto jl = o.find("jump_law");
  m.jump_law = (jl == o.end()) ? JumpLaw{NoJumps{}} : jump_law_from_json(*jl);
  if (m.family == Family::StableSubordinator) m.stable_index = detail::num_field(o, "stable_index", 0, true);
  validate(m);
  return m;
}

inline LevyModel parse_model(const std::string& text) {
  json o;
  try {
    o = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidArgument, std::string("model JSON parse error: ") + e.what());
  }
  return model_from_json(o);
}

inline LevyModel load_model(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

inline std::string serialize_model(const LevyModel& m) { return model_to_json(m).dump(); }

// FNV-1a over the canonical serialization.
inline std::string model_hash(const LevyModel& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_model(m)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace levy
