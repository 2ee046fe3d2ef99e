#include <cmath>
#include <limits>
#include <stdexcept>

#include "strokeforest/stats.hpp"

namespace strokeforest::stats {

namespace {

double variance(std::span<const double> x, double m) {
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

TTestResult finish(double diff, double se, double df) {
  TTestResult r;
  if (se == 0.0) {
    if (diff == 0.0) throw std::invalid_argument("t statistic undefined: zero variance, equal means");
    r.t = std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.df = df;
    r.p_two_sided = 0.0;
  } else {
    r.t = diff / se;
    r.df = df;
    r.p_two_sided = student_t_two_sided(r.t, df);
  }
  r.abs_t = std::abs(r.t);
  return r;
}

}  // namespace

TTestResult t_test(std::span<const double> a, std::span<const double> b, TTestVariance kind) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("t-test needs >= 2 values per sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double va = variance(a, ma);
  const double vb = variance(b, mb);
  const double pooled_df = na + nb - 2.0;
  if (kind == TTestVariance::Pooled) {
    const double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / pooled_df;
    return finish(ma - mb, std::sqrt(sp2 * (1.0 / na + 1.0 / nb)), pooled_df);
  }
  const double qa = va / na;
  const double qb = vb / nb;
  const double se2 = qa + qb;
  const double df = se2 > 0.0
                        ? se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0))
                        : pooled_df;
  return finish(ma - mb, std::sqrt(se2), df);
}

TTestResult welch_t(std::span<const double> a, std::span<const double> b) {
  return t_test(a, b, TTestVariance::Welch);
}

TTestResult paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired t-test: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("paired t-test needs >= 2 pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double n = static_cast<double>(d.size());
  const double m = mean(d);
  return finish(m, std::sqrt(variance(d, m) / n), n - 1.0);
}

}  // namespace strokeforest::stats
