#pragma once

// Reference values computed independently of the library: explicit
// Brownian densities integrated with Boost's double-exponential rules.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

inline double integrate_half_line(const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  double head = ts.integrate(f, 0.0, 1.0, 1e-13);
  double tail = es.integrate([&](double y) { return f(y + 1.0); }, 1e-13);
  return head + tail;
}

// Densities below are written as exp(log ...) so that tiny and huge y give 0
// rather than 0 * inf.

inline double gauss_exponent(double mu, double r, double y) { return -(r - mu * y) * (r - mu * y) / (2.0 * y); }

// First passage of mu t + W_t over r > 0 (inverse Gaussian).
inline double passage_density(double mu, double r, double y) {
  return r * std::exp(gauss_exponent(mu, r, y) - 0.5 * std::log(2.0 * std::numbers::pi) - 1.5 * std::log(y));
}

// Last exit from (-inf, r], r >= 0.
inline double last_exit_density(double mu, double r, double y) {
  return mu * std::exp(gauss_exponent(mu, r, y) - 0.5 * std::log(2.0 * std::numbers::pi * y));
}

// Occupation time of (-inf, r], r >= 0, for mu t + W_t with mu > 0.
inline double occupation_density(double mu, double r, double y) {
  double g = mu * std::exp(gauss_exponent(mu, r, y) + 0.5 * std::log(2.0 / (std::numbers::pi * y)));
  return g - mu * mu * std::exp(2.0 * r * mu) * std::erfc(r / std::sqrt(2.0 * y) + mu * std::sqrt(y / 2.0));
}

// int_0^inf e^{ay} dens(y) dy for a below the decay rate mu^2/2. Past y = 2000
// the integrand is far below double precision and is cut to avoid inf * 0.
inline double laplace_moment(const std::function<double(double, double, double)>& dens, double mu, double r,
                             double a) {
  return integrate_half_line(
      [&](double y) { return y <= 0.0 || y > 2000.0 ? 0.0 : std::exp(a * y) * dens(mu, r, y); });
}

// E_{1/2}(z) = exp(z^2) erfc(-z).
inline double ml_half(double z) { return std::exp(z * z) * std::erfc(-z); }

// Kolmogorov distribution tail P{sqrt(n) D > x}.
inline double ks_pvalue(double d, std::size_t n) {
  double x = std::sqrt(static_cast<double>(n)) * d;
  if (x < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k < 200; ++k) {
    double t = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 2.0 : -2.0) * t;
    if (t < 1e-18) break;
  }
  return std::min(1.0, std::max(0.0, s));
}

// Sup distance between the empirical CDF of v and Exponential with the given mean.
inline double ks_exponential(std::vector<double> v, double mean) {
  std::sort(v.begin(), v.end());
  double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double F = -std::expm1(-v[i] / mean);
    d = std::max({d, std::abs(F - i / n), std::abs((i + 1) / n - F)});
  }
  return d;
}

}  // namespace oracle
