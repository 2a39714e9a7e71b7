#include "labbook/analysis/t_test.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "labbook/analysis/special.hpp"
#include "labbook/error.hpp"

namespace labbook::analysis {

std::string_view variance_name(Variance variance) noexcept {
  return variance == Variance::welch ? "welch" : "pooled";
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw Error(Errc::invalid_input, "mean of an empty sample");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
  if (xs.size() < 2) throw Error(Errc::invalid_input, "variance needs at least two values");
  double m = mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw Error(Errc::invalid_input, "median of an empty sample");
  std::sort(xs.begin(), xs.end());
  auto n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

TTestResult t_test_ind(const std::vector<double>& a, const std::vector<double>& b, Variance variance_kind) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(Errc::invalid_input, "t-test needs at least two values per group");
  }
  for (const auto* xs : {&a, &b}) {
    for (double x : *xs) {
      if (!std::isfinite(x)) throw Error(Errc::invalid_input, "t-test sample has a non-finite value");
    }
  }
  double n1 = static_cast<double>(a.size());
  double n2 = static_cast<double>(b.size());
  double diff = mean(a) - mean(b);
  double v1 = variance(a);
  double v2 = variance(b);

  TTestResult r;
  r.variance = variance_kind;
  double se2 = 0;
  if (variance_kind == Variance::pooled) {
    r.df = n1 + n2 - 2;
    double sp2 = ((n1 - 1) * v1 + (n2 - 1) * v2) / r.df;
    se2 = sp2 * (1 / n1 + 1 / n2);
  } else {
    double q1 = v1 / n1;
    double q2 = v2 / n2;
    se2 = q1 + q2;
    r.df = se2 > 0 ? se2 * se2 / (q1 * q1 / (n1 - 1) + q2 * q2 / (n2 - 1)) : n1 + n2 - 2;
  }
  if (se2 == 0) {
    if (diff == 0) {
      r.t = 0;
      r.p = 1;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), diff);
      r.p = 0;
    }
    return r;
  }
  r.t = diff / std::sqrt(se2);
  r.p = student_t_two_sided(r.t, r.df);
  return r;
}

} // namespace labbook::analysis
