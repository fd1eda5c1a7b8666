#pragma once

#include <cmath>

#include "levy_moments/closedform.hpp"
#include "levy_moments/montecarlo.hpp"

namespace levy {

// lim exp(-gamma r) E[exp(a rho_r)] = a e^{-a} E[exp(-gamma I)] / (gamma E[X_1 e^{-gamma X_1}]).
// The infimum transform is exact for spectrally negative models and a Monte
// Carlo estimate otherwise.
inline double asymptotic_constant_rho(const LevyModel& m, double a, const PathConfig& cfg = PathConfig{}) {
  auto [g, tm] = detail::asymptotic_inputs(m, a);
  double inf_tr = classify(m).is_spectrally_negative ? inf_transform(m, g).value
                                                      : estimate_inf_transform(m, g, cfg).mean;
  return a * std::exp(-a) * inf_tr / (g * tm);
}

}  // namespace levy
