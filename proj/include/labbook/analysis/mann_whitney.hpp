#pragma once

#include <string_view>
#include <vector>

namespace labbook::analysis {

enum class MwuMethod { exact, asymptotic_cc };

std::string_view method_name(MwuMethod method) noexcept;

struct MwuResult {
  double u = 0;     // for the first sample: pairwise wins, ties count half
  double u_min = 0; // min(U(a,b), U(b,a))
  double p = 1;     // two-sided
  MwuMethod method = MwuMethod::asymptotic_cc;
};

inline constexpr std::size_t kMaxExactMwu = 20;

// exact: the permutation distribution of U over all splits of the pooled
// ranks (average ranks for ties); n1 + n2 <= 20.
// asymptotic_cc: normal approximation, tie-corrected variance, 0.5
// continuity correction.
// Throws Error(invalid_input) for an empty or non-finite sample or an
// exact request that is too large.
MwuResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                         MwuMethod method = MwuMethod::asymptotic_cc);

// Two-sided normal-approximation p for U with continuity correction.
// `tie_term` is the sum of t^3 - t over tie groups of the pooled sample.
double mwu_asymptotic_p(double u, std::size_t n1, std::size_t n2, double tie_term = 0);

} // namespace labbook::analysis
