#include "labbook/analysis/special.hpp"

#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "labbook/error.hpp"

namespace labbook::analysis {

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0) || !(b > 0) || !(x >= 0 && x <= 1)) {
    throw Error(Errc::invalid_input, "incomplete beta needs a, b > 0 and 0 <= x <= 1");
  }
  return boost::math::ibeta(a, b, x);
}

double student_t_two_sided(double t, double df) {
  if (!(df > 0)) throw Error(Errc::invalid_input, "degrees of freedom must be positive");
  if (std::isnan(t)) throw Error(Errc::invalid_input, "t is not a number");
  if (std::isinf(t)) return 0.0;
  // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
  return incomplete_beta(df / (df + t * t), df / 2, 0.5);
}

double normal_two_sided(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

} // namespace labbook::analysis
