#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "strokeforest/stats.hpp"

namespace strokeforest::stats {

namespace {

template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double r = 0.0;
  for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
  return r;
}

// Royston (1995) AS R94 coefficients.
constexpr double kC1[] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
constexpr double kC2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr double kC3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
constexpr double kC4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
constexpr double kC5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr double kC6[] = {-0.4803, -0.082676, 0.0030302};
constexpr double kG[] = {-2.273, 0.459};

}  // namespace

NormalityResult shapiro_wilk(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 3) throw std::invalid_argument("Shapiro-Wilk: sample too small (n < 3)");
  if (n > 5000) throw std::invalid_argument("Shapiro-Wilk: sample too large (n > 5000)");
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 0.0)) throw std::invalid_argument("Shapiro-Wilk: constant sample");

  const double an = static_cast<double>(n);
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::numbers::sqrt2 / 2.0;
  } else {
    const double an25 = an + 0.25;
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      a[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / an25);
      summ2 += a[i] * a[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(kC1, rsn) - a[0] / ssumm2;
    std::size_t first = 1;
    double fac = 0.0;
    if (n > 5) {
      first = 2;
      const double a2 = -a[1] / ssumm2 + poly(kC2, rsn);
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first; i < half; ++i) a[i] = -a[i] / fac;
  }

  // W as the squared correlation between the data and the antisymmetric
  // coefficient vector; 1 - W is formed directly to limit cancellation.
  std::vector<double> coef(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    coef[i] = -a[i];
    coef[n - 1 - i] = a[i];
  }
  double sa = 0.0;
  double sx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += coef[i];
    sx += x[i] / range;
  }
  sa /= an;
  sx /= an;
  double ssa = 0.0;
  double ssx = 0.0;
  double sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double asa = coef[i] - sa;
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double w = 1.0 - w1;

  double pw = 1.0;
  if (n == 3) {
    constexpr double kPi6 = 6.0 / std::numbers::pi;
    constexpr double kStqr = std::numbers::pi / 3.0;
    pw = std::max(0.0, kPi6 * (std::asin(std::sqrt(w)) - kStqr));
  } else {
    double y = std::log(w1);
    const double xx = std::log(an);
    double m = 0.0;
    double s = 1.0;
    bool tiny = false;
    if (n <= 11) {
      const double gamma = poly(kG, an);
      if (y >= gamma) {
        tiny = true;
      } else {
        y = -std::log(gamma - y);
        m = poly(kC3, an);
        s = std::exp(poly(kC4, an));
      }
    } else {
      m = poly(kC5, xx);
      s = std::exp(poly(kC6, xx));
    }
    pw = tiny ? 1e-99 : 1.0 - normal_cdf((y - m) / s);
  }
  pw = std::clamp(pw, 0.0, 1.0);
  return {w, pw, pw < 0.05};
}

NormalityResult ks_normality(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 5) throw std::invalid_argument("Kolmogorov-Smirnov: sample too small (n < 5)");
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  const double m = mean(x);
  const double sd = sample_sd(x);
  if (!(sd > 0.0)) throw std::invalid_argument("Kolmogorov-Smirnov: constant sample");
  const double an = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = normal_cdf((x[i] - m) / sd);
    d = std::max({d, static_cast<double>(i + 1) / an - f, f - static_cast<double>(i) / an});
  }

  // Dallal & Wilkinson (1986) approximation to the Lilliefors distribution.
  double kd = d;
  double nd = an;
  if (n > 100) {
    kd = d * std::pow(an / 100.0, 0.49);
    nd = 100.0;
  }
  double p = std::exp(-7.01256 * kd * kd * (nd + 2.78019) +
                      2.99587 * kd * std::sqrt(nd + 2.78019) - 0.122119 +
                      0.974598 / std::sqrt(nd) + 1.67997 / nd);
  if (p > 0.1) {
    const double kk = (std::sqrt(an) - 0.01 + 0.85 / std::sqrt(an)) * d;
    if (kk <= 0.302) {
      p = 1.0;
    } else if (kk <= 0.5) {
      p = 2.76773 - 19.828315 * kk + 80.709644 * kk * kk - 138.55152 * kk * kk * kk +
          81.218052 * kk * kk * kk * kk;
    } else if (kk <= 0.9) {
      p = -4.901232 + 40.662806 * kk - 97.490286 * kk * kk + 94.029866 * kk * kk * kk -
          32.355711 * kk * kk * kk * kk;
    } else if (kk <= 1.31) {
      p = 6.198765 - 19.558097 * kk + 23.186922 * kk * kk - 12.234627 * kk * kk * kk +
          2.423045 * kk * kk * kk * kk;
    } else {
      p = 0.0;
    }
  }
  p = std::clamp(p, 0.0, 1.0);
  return {d, p, p < 0.05};
}

}  // namespace strokeforest::stats
