#pragma once

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace labbook::testing {

// I_x(a,b) as L / (L + R), both integrals by tanh-sinh quadrature. The
// second argument is the signed distance to the nearest endpoint, which
// keeps t and 1 - t accurate next to a singular end.
inline double beta_oracle(double x, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> q(15);
  auto left = q.integrate(
      [&](double t, double tc) {
        double lo = tc < 0 ? -tc : t;                // near 0, tc = 0 - t
        double hi = tc > 0 ? (1 - x) + tc : 1 - t;   // near x, tc = x - t
        return std::pow(lo, a - 1) * std::pow(hi, b - 1);
      },
      0.0, x, 1e-15);
  auto right = q.integrate(
      [&](double t, double tc) {
        double hi = tc > 0 ? tc : 1 - t;             // near 1, tc = 1 - t
        return std::pow(t, a - 1) * std::pow(hi, b - 1);
      },
      x, 1.0, 1e-15);
  return left / (left + right);
}

// Two-sided Student t tail: twice the density integrated over [|t|, inf).
inline double t_tail_oracle(double t, double df) {
  double log_norm = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI);
  auto density = [&](double x) { return std::exp(log_norm - (df + 1) / 2 * std::log1p(x * x / df)); };
  boost::math::quadrature::exp_sinh<double> q;
  return 2 * q.integrate(density, std::fabs(t), INFINITY, 1e-14);
}

} // namespace labbook::testing
