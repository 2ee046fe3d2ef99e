#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace strokeforest::stats {

// Distribution functions -----------------------------------------------------

double normal_cdf(double z);
/// Inverse standard normal CDF (Wichura AS 241, ~1e-16 relative accuracy).
double normal_quantile(double p);
/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double df);
/// P(|T| >= |t|) for T ~ t(df).
double student_t_two_sided(double t, double df);

// Descriptive ----------------------------------------------------------------

struct DescriptiveSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator; 0 for a singleton
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

DescriptiveSummary describe(std::span<const double> x);

/// Linear interpolation between order statistics (R type 7) on sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

double mean(std::span<const double> x);
double sample_sd(std::span<const double> x);

// Two-sample t-test ----------------------------------------------------------

enum class TTestVariance { Welch, Pooled };

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
  double abs_t = 0.0;
};

/// Welch unequal-variance t-test of mean(a) - mean(b).
TTestResult welch_t(std::span<const double> a, std::span<const double> b);
TTestResult t_test(std::span<const double> a, std::span<const double> b, TTestVariance variance);
/// One-sample t-test of the paired differences a - b against zero.
TTestResult paired_t(std::span<const double> a, std::span<const double> b);

// Normality ------------------------------------------------------------------

struct NormalityResult {
  double statistic = 0.0;  // W (Shapiro-Wilk) or D (Kolmogorov-Smirnov)
  double p_value = 1.0;
  bool reject_at_005 = false;
};

/// Shapiro-Wilk W with Royston's approximation, 3 <= n <= 5000.
NormalityResult shapiro_wilk(std::span<const double> x);

/// Kolmogorov-Smirnov distance to a normal with estimated mean and SD; the
/// p-value uses the Lilliefors correction (Dallal-Wilkinson approximation).
NormalityResult ks_normality(std::span<const double> x);

// Wilcoxon signed-rank --------------------------------------------------------

enum class WilcoxonMethod { Exact, NormalApproximation };

struct WilcoxonResult {
  double w_plus = 0.0;
  std::size_t n_effective = 0;
  double p_two_sided = 1.0;
  WilcoxonMethod method = WilcoxonMethod::Exact;
  double z = 0.0;  // normal approximation only
};

/// Paired signed-rank test on d = a - b. Zero differences are dropped;
/// exact null distribution when n_effective <= 25 and |d| has no ties,
/// otherwise normal approximation with tie and continuity corrections.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Midranks (1-based) of `x`.
std::vector<double> midranks(std::span<const double> x);

}  // namespace strokeforest::stats
