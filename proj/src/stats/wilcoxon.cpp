#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "strokeforest/stats.hpp"

namespace strokeforest::stats {

namespace {

// Null distribution of W+ for n untied ranks: count of sign patterns per sum.
std::vector<double> signed_rank_counts(std::size_t n) {
  const std::size_t max_sum = n * (n + 1) / 2;
  std::vector<double> counts(max_sum + 1, 0.0);
  counts[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t s = max_sum; s >= k; --s) counts[s] += counts[s - k];
  }
  return counts;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("Wilcoxon: length mismatch");
  std::vector<double> d;
  d.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    if (diff != 0.0) d.push_back(diff);
  }
  WilcoxonResult r;
  r.n_effective = d.size();
  if (d.empty()) return r;

  std::vector<double> mag(d.size());
  std::transform(d.begin(), d.end(), mag.begin(), [](double v) { return std::abs(v); });
  const auto ranks = midranks(mag);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) r.w_plus += ranks[i];
  }

  std::map<double, std::size_t> tie_sizes;
  for (double m : mag) ++tie_sizes[m];
  const bool ties = tie_sizes.size() != mag.size();
  const double n = static_cast<double>(d.size());

  if (d.size() <= kWilcoxonExactLimit && !ties) {
    r.method = WilcoxonMethod::Exact;
    const auto counts = signed_rank_counts(d.size());
    const double total = std::ldexp(1.0, static_cast<int>(d.size()));
    const auto w = static_cast<std::size_t>(std::llround(r.w_plus));
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (s <= w) lower += counts[s];
      if (s >= w) upper += counts[s];
    }
    r.p_two_sided = std::min(1.0, 2.0 * std::min(lower, upper) / total);
    return r;
  }

  r.method = WilcoxonMethod::NormalApproximation;
  const double mean_w = n * (n + 1.0) / 4.0;
  double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  for (const auto& [value, t] : tie_sizes) {
    const double tt = static_cast<double>(t);
    var -= (tt * tt * tt - tt) / 48.0;
  }
  if (!(var > 0.0)) {
    r.p_two_sided = 1.0;
    return r;
  }
  double diff = r.w_plus - mean_w;
  if (diff > 0.0) {
    diff -= 0.5;
  } else if (diff < 0.0) {
    diff += 0.5;
  }
  r.z = diff / std::sqrt(var);
  r.p_two_sided = std::clamp(2.0 * (1.0 - normal_cdf(std::abs(r.z))), 0.0, 1.0);
  return r;
}

}  // namespace strokeforest::stats
