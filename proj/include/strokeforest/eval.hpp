#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "strokeforest/dataset.hpp"
#include "strokeforest/preprocess.hpp"

namespace strokeforest {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // score >= threshold is called positive
};

/// Starts at (0, 0) with threshold +inf and ends at (1, 1). Each distinct
/// score adds one point, so tied scores form a diagonal segment.
struct RocCurve {
  std::vector<RocPoint> points;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

struct AucResult {
  double auc = 0.5;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  bool flipped = false;  // single-variable analysis used the reversed score
};

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double threshold = 0.5;
};

struct AccuracyResult {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
};

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);
double auc_trapezoid(const RocCurve& curve);

/// (wins + ties / 2) / (n_pos * n_neg) via midranks, O(n log n).
double auc_mann_whitney(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// AUC with a DeLong standard error; CI = auc +/- z * se clipped to [0, 1].
AucResult auc_ci(std::span<const double> scores, std::span<const std::uint8_t> labels,
                 double z = 1.959963984540054);

/// Positive call when score >= threshold.
AccuracyResult accuracy(std::span<const double> scores, std::span<const std::uint8_t> labels,
                        double threshold = 0.5);

/// Raw feature value as the score over the endpoint population, reported in
/// the orientation with auc >= 0.5.
AucResult single_variable_roc(const Cohort& cohort, std::string_view feature, Endpoint endpoint,
                              MorbidityPopulation population = MorbidityPopulation::ExcludeDeaths);

/// Header fpr,tpr,threshold; the infinite first threshold is written "inf".
void write_roc_csv(std::ostream& out, const RocCurve& curve);

}  // namespace strokeforest
