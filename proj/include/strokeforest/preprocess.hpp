#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strokeforest/dataset.hpp"
#include "strokeforest/stats.hpp"

namespace strokeforest {

enum class Endpoint { Mortality, Morbidity };

/// Which patients the morbidity classifier sees.
enum class MorbidityPopulation { ExcludeDeaths, IncludeDeathsAsNegative };

std::string_view to_string(Endpoint endpoint);
std::string_view to_string(MorbidityPopulation population);
Endpoint parse_endpoint(std::string_view text);
MorbidityPopulation parse_morbidity_population(std::string_view text);

/// Rows of `cohort` taking part in the endpoint, in cohort order.
std::vector<std::size_t> endpoint_rows(const Cohort& cohort, Endpoint endpoint,
                                       MorbidityPopulation population);

/// Binary target per record (1 = positive class).
std::vector<std::uint8_t> endpoint_labels(const Cohort& cohort, Endpoint endpoint);

/// Restricts `cohort` to the endpoint population.
Cohort endpoint_cohort(const Cohort& cohort, Endpoint endpoint,
                       MorbidityPopulation population = MorbidityPopulation::ExcludeDeaths);

/// Candidate features for a group: those measured in it. For the combined
/// group only features measured in both stroke types qualify.
std::vector<std::size_t> modeling_features(const FeatureCodebook& codebook, Group group);

// ---------------------------------------------------------------------------
// Feature scoring

struct FeatureScore {
  std::size_t feature = 0;  // codebook index
  double abs_t = 0.0;
  double p_value = 1.0;
  bool scored = false;  // false when a class had < 2 values
};

struct CutoffRule {
  enum class Kind { TopK, PThreshold };
  Kind kind = Kind::TopK;
  std::size_t k = 7;
  double alpha = 0.05;
};

struct SelectionReport {
  std::vector<FeatureScore> scores;  // in candidate order
  std::vector<std::size_t> ranking;  // codebook indices, abs_t descending
  std::vector<std::size_t> selected;
  CutoffRule cutoff;
};

/// Welch t between the classes for each candidate feature, missing cells
/// skipped. Ties in |t| keep candidate (codebook) order.
SelectionReport score_features_ttest(
    const Cohort& cohort, std::span<const std::uint8_t> labels,
    std::span<const std::size_t> candidates,
    stats::TTestVariance variance = stats::TTestVariance::Welch);
SelectionReport score_features_ttest(const Cohort& cohort, Endpoint endpoint);

/// First `k` entries of the ranking; also records them in `report`.
std::vector<std::size_t> select_top_k(SelectionReport& report, std::size_t k = 7);

/// Features with p < alpha, in ranking order.
std::vector<std::size_t> select_p_threshold(SelectionReport& report, double alpha);

// ---------------------------------------------------------------------------
// Resampling

/// Balanced subset: every minority row plus an equal-size uniform sample of
/// the majority, returned as input indices in shuffled order.
std::vector<std::size_t> undersample_indices(std::span<const std::uint8_t> labels,
                                             std::uint64_t seed);
Cohort undersample(const Cohort& cohort, Endpoint endpoint, std::uint64_t seed);

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

/// Shuffled round-robin per class. The second class continues the rotation
/// where the first stopped, so fold sizes also differ by at most one.
FoldAssignment stratified_kfold(std::span<const std::uint8_t> labels, std::size_t k,
                                std::uint64_t seed, bool stratify = true);

struct RepetitionDraw {
  std::uint64_t seed = 0;
  std::vector<std::size_t> sample;  // undersampled input rows, in order
  FoldAssignment folds;             // over positions of `sample`
};

struct ResamplePlan {
  std::uint64_t master_seed = 0;
  std::size_t repetitions = 100;
  std::size_t folds = 10;
  std::vector<std::uint64_t> repetition_seeds;

  /// Undersampling and fold assignment of repetition `r` for `labels`.
  RepetitionDraw draw(std::size_t r, std::span<const std::uint8_t> labels,
                      bool stratify = true) const;
};

ResamplePlan build_resample_plan(std::uint64_t master_seed, std::size_t repetitions = 100,
                                 std::size_t folds = 10);

// ---------------------------------------------------------------------------
// Imputation

/// Fill values learned from a training cohort: median for continuous and
/// ordinal features, mode (lower value on ties) for binary ones.
struct ImputationModel {
  std::vector<std::optional<double>> fills;  // codebook order; nullopt = not fitted

  static ImputationModel fit(const Cohort& train, std::span<const std::size_t> features);
  /// Copy of `cohort` with the fitted features' missing cells filled.
  Cohort apply(const Cohort& cohort) const;
};

/// Fits on every feature of `train` and fills `apply_to`.
Cohort impute_missing(const Cohort& train, const Cohort& apply_to);

}  // namespace strokeforest
