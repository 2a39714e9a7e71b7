#include "labbook/analysis/mann_whitney.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "labbook/analysis/special.hpp"
#include "labbook/error.hpp"

namespace labbook::analysis {

std::string_view method_name(MwuMethod method) noexcept {
  return method == MwuMethod::exact ? "exact" : "asymptotic_cc";
}

namespace {

struct Ranked {
  std::vector<std::int64_t> doubled; // 2 x average rank, per pooled index
  double tie_term = 0;               // sum of t^3 - t over tie groups
};

Ranked rank_pooled(const std::vector<double>& pooled) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
  Ranked r;
  r.doubled.resize(pooled.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // positions i..j (0-based) share rank ((i+1)+(j+1))/2
    auto d = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) r.doubled[order[k]] = d;
    double t = static_cast<double>(j - i + 1);
    r.tie_term += t * t * t - t;
    i = j + 1;
  }
  return r;
}

void check_sample(const std::vector<double>& xs, const char* name) {
  if (xs.empty()) throw Error(Errc::invalid_input, std::string("sample ") + name + " is empty");
  for (double x : xs) {
    if (!std::isfinite(x)) throw Error(Errc::invalid_input, std::string("sample ") + name + " has a non-finite value");
  }
}

// Probability that a random split puts doubled-U at least as far from its
// mean as `observed`. Counts subsets of size n1 by doubled rank sum.
double exact_p(const std::vector<std::int64_t>& doubled, std::size_t n1, std::int64_t observed_ud) {
  std::size_t n = doubled.size();
  std::int64_t max_sum = std::accumulate(doubled.begin(), doubled.end(), std::int64_t{0});
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
  ways[0][0] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    auto d = static_cast<std::size_t>(doubled[i]);
    for (std::size_t k = std::min(i + 1, n1); k >= 1; --k) {
      auto& to = ways[k];
      const auto& from = ways[k - 1];
      for (std::size_t s = static_cast<std::size_t>(max_sum); s >= d; --s) {
        to[s] += from[s - d];
        if (s == d) break;
      }
    }
  }
  auto n1i = static_cast<std::int64_t>(n1);
  auto n2i = static_cast<std::int64_t>(n - n1);
  std::int64_t mean_ud = n1i * n2i;
  std::int64_t dist = std::llabs(observed_ud - mean_ud);
  double total = 0;
  double tail = 0;
  for (std::size_t s = 0; s < ways[n1].size(); ++s) {
    double w = ways[n1][s];
    if (w == 0) continue;
    std::int64_t ud = static_cast<std::int64_t>(s) - n1i * (n1i + 1);
    total += w;
    if (std::llabs(ud - mean_ud) >= dist) tail += w;
  }
  return std::min(1.0, tail / total);
}

} // namespace

double mwu_asymptotic_p(double u, std::size_t n1, std::size_t n2, double tie_term) {
  double n = static_cast<double>(n1 + n2);
  double nn = static_cast<double>(n1) * static_cast<double>(n2);
  double mu = nn / 2;
  double var = nn / 12 * ((n + 1) - (n > 1 ? tie_term / (n * (n - 1)) : 0.0));
  if (!(var > 0)) return 1.0;
  double z = std::max(0.0, std::fabs(u - mu) - 0.5) / std::sqrt(var);
  return std::min(1.0, normal_two_sided(z));
}

MwuResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b, MwuMethod method) {
  check_sample(a, "a");
  check_sample(b, "b");
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  auto ranked = rank_pooled(pooled);

  auto n1 = static_cast<std::int64_t>(a.size());
  auto n2 = static_cast<std::int64_t>(b.size());
  std::int64_t r1 = std::accumulate(ranked.doubled.begin(), ranked.doubled.begin() + n1, std::int64_t{0});
  std::int64_t ud = r1 - n1 * (n1 + 1); // 2U for sample a

  MwuResult res;
  res.method = method;
  res.u = static_cast<double>(ud) / 2;
  res.u_min = std::min(res.u, static_cast<double>(n1 * n2) - res.u);

  if (method == MwuMethod::exact) {
    if (pooled.size() > kMaxExactMwu) {
      throw Error(Errc::invalid_input, "exact Mann-Whitney needs n1 + n2 <= " + std::to_string(kMaxExactMwu));
    }
    res.p = exact_p(ranked.doubled, a.size(), ud);
    return res;
  }

  res.p = mwu_asymptotic_p(res.u, a.size(), b.size(), ranked.tie_term);
  return res;
}

} // namespace labbook::analysis
