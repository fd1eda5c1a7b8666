#pragma once

#include <stdexcept>
#include <string>

namespace levy {

enum class ErrorCode {
  InvalidArgument,
  NoRoot,
  Unsupported,
  CriterionFails,
  RhoInfinite,
  NotSpectrallyNegative,
  MeanInfinite,
  TransformGEOne,
  LatticeExcluded,
  VarianceUnsafe,
  HorizonOverflow,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::CriterionFails: return "CriterionFails";
    case ErrorCode::RhoInfinite: return "RhoInfinite";
    case ErrorCode::NotSpectrallyNegative: return "NotSpectrallyNegative";
    case ErrorCode::MeanInfinite: return "MeanInfinite";
    case ErrorCode::TransformGEOne: return "TransformGEOne";
    case ErrorCode::LatticeExcluded: return "LatticeExcluded";
    case ErrorCode::VarianceUnsafe: return "VarianceUnsafe";
    case ErrorCode::HorizonOverflow: return "HorizonOverflow";
  }
  return "Unknown";
}

// Errors that mean "the requested moment is infinite or the requested
// computation is not admissible for this model", as opposed to bad input.
inline bool is_criterion_violation(ErrorCode code) {
  return code != ErrorCode::InvalidArgument;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace levy
