#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "strokeforest/dataset.hpp"
#include "strokeforest/eval.hpp"
#include "strokeforest/forest.hpp"
#include "strokeforest/preprocess.hpp"
#include "strokeforest/stats.hpp"

namespace strokeforest {

inline constexpr int kReportSchemaVersion = 1;

enum class SelectionScope { PerFold, Global };

/// Where the tree count comes from. PerProblem tunes once on the first
/// repetition's balanced sample; PerFold tunes inside every training fold;
/// Fixed uses ExperimentPlan::fixed_trees.
enum class TuningScope { PerProblem, PerFold, Fixed };

std::string_view to_string(SelectionScope scope);
std::string_view to_string(TuningScope scope);
SelectionScope parse_selection_scope(std::string_view text);
TuningScope parse_tuning_scope(std::string_view text);

struct ExperimentPlan {
  Group group = Group::All;
  Endpoint endpoint = Endpoint::Mortality;
  std::size_t repetitions = 100;
  std::size_t folds = 10;
  std::size_t k_features = 7;
  std::size_t min_trees = 500;
  std::size_t max_trees = 1000;
  std::size_t tree_step = 100;
  std::size_t inner_folds = 5;
  TuningScope tuning = TuningScope::PerProblem;
  std::size_t fixed_trees = 500;
  std::uint64_t master_seed = 1;
  SelectionScope selection_scope = SelectionScope::PerFold;
  MorbidityPopulation morbidity_population = MorbidityPopulation::ExcludeDeaths;
  bool stratify = true;
  stats::TTestVariance ttest = stats::TTestVariance::Welch;
  ForestConfig forest;  // n_trees and seed are set per model
  double acc_threshold = 0.5;

  /// Seed owned by this (group, endpoint) problem.
  std::uint64_t problem_seed() const;
};

void validate(const ExperimentPlan& plan);
nlohmann::json to_json(const ExperimentPlan& plan);
/// Fields present in `doc` override those of `base`.
ExperimentPlan plan_from_json(const nlohmann::json& doc, ExperimentPlan base = {});

struct FoldResult {
  std::size_t repetition = 0;
  std::size_t fold = 0;
  double auc = 0.5;
  AccuracyResult acc;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_trees = 0;
  std::vector<std::string> selected;
  std::vector<double> gini;         // aligned with `selected`
  std::vector<double> permutation;  // aligned with `selected`
};

struct RunResult {
  ExperimentPlan plan;
  std::shared_ptr<const FeatureCodebook> codebook;
  std::size_t population = 0;  // endpoint population before balancing
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::optional<TuningResult> tuning;  // PerProblem scope only
  std::optional<SelectionReport> global_selection;
  std::vector<FoldResult> folds;  // ordered by (repetition, fold)
  // Out-of-fold scores of repetition 0, each balanced record once.
  std::vector<double> oof_scores;
  std::vector<std::uint8_t> oof_labels;
};

/// Full protocol for one problem. The result is a pure function of
/// (cohort, plan); `workers` only changes the speed.
RunResult run_problem(const Cohort& cohort, const ExperimentPlan& plan, std::size_t workers = 1);

struct AggregateReport {
  std::size_t n_runs = 0;
  double mean_auc = 0.0;
  double sd_auc = 0.0;
  double median_auc = 0.0;
  double min_auc = 0.0;
  double max_auc = 0.0;
  double mean_acc = 0.0;
  double sd_acc = 0.0;
  std::map<std::string, double> gini_sums;
  std::map<std::string, double> permutation_sums;
  std::map<std::string, std::size_t> selection_counts;
  std::vector<double> auc;
  std::vector<double> acc;

  /// Feature names by descending summed Gini importance (name order on ties).
  std::vector<std::string> gini_ranking() const;
  std::vector<std::string> permutation_ranking() const;
};

AggregateReport aggregate(const RunResult& result);
AggregateReport aggregate(std::span<const FoldResult> folds);

/// Model trained the way every fold model is, on repetition 0's whole
/// balanced sample, with the imputation fills it used.
struct ReferenceModel {
  Group group = Group::All;
  Endpoint endpoint = Endpoint::Mortality;
  MorbidityPopulation morbidity_population = MorbidityPopulation::ExcludeDeaths;
  std::vector<std::pair<std::string, double>> fills;
  Forest forest;
};

ReferenceModel train_reference_model(const Cohort& cohort, const ExperimentPlan& plan,
                                     std::size_t n_trees, std::size_t workers = 1);
nlohmann::json to_json(const ReferenceModel& model);
ReferenceModel reference_model_from_json(const nlohmann::json& doc);

// ---------------------------------------------------------------------------
// Group comparison

struct PairComparison {
  std::string a;
  std::string b;
  stats::WilcoxonResult wilcoxon;
  std::optional<stats::TTestResult> paired_t;  // absent when undefined
  std::string decision_test;                   // "wilcoxon" or "paired-t"
  double decision_p = 1.0;
  bool reject_at_005 = false;
};

struct ComparisonReport {
  std::vector<std::pair<std::string, stats::NormalityResult>> normality;
  std::optional<stats::NormalityResult> pooled_normality;  // absent above 5000 values
  bool any_normality_rejected = false;
  std::vector<PairComparison> pairs;
};

/// Shapiro-Wilk on each vector and on their pool, then every pair (or the
/// requested ones) compared by paired Wilcoxon. The decision uses the
/// Wilcoxon result when any normality test rejects, else the paired t-test.
ComparisonReport compare_groups(
    const std::vector<std::pair<std::string, std::vector<double>>>& samples,
    const std::vector<std::pair<std::string, std::string>>& pairs = {});

nlohmann::json to_json(const ComparisonReport& report);

// ---------------------------------------------------------------------------
// Decision-boundary heatmap

struct MisclassifiedRecord {
  std::size_t row = 0;
  double x = 0.0;
  double y = 0.0;
  std::uint8_t label = 0;
  double probability = 0.0;
};

struct HeatmapGrid {
  std::string x_feature;
  std::string y_feature;
  std::vector<double> x_values;
  std::vector<double> y_values;
  std::vector<double> cells;  // cells[iy * x_values.size() + ix]
  std::vector<std::pair<std::string, double>> fixed;
  std::vector<MisclassifiedRecord> misclassified;

  double at(std::size_t ix, std::size_t iy) const { return cells[iy * x_values.size() + ix]; }
};

/// Grid over the observed ranges of the two features, others held at their
/// cohort median (mode for binary features). When `labels` is given,
/// records the forest misclassifies are listed.
HeatmapGrid heatmap_grid(const Forest& forest, const Cohort& cohort, std::string_view x_feature,
                         std::string_view y_feature, std::size_t resolution,
                         std::span<const std::uint8_t> labels = {});

void write_heatmap_csv(std::ostream& out, const HeatmapGrid& grid);
void write_misclassified_csv(std::ostream& out, const HeatmapGrid& grid);

// ---------------------------------------------------------------------------
// Reports

nlohmann::json to_json(const AggregateReport& report);
nlohmann::json to_json(const RunResult& result);

/// Report document for a set of problems run on one cohort.
nlohmann::json make_report(const std::vector<RunResult>& results, const nlohmann::json& cohort_info);

/// Descriptive tables: exclusions, per-group outcomes and feature summaries.
nlohmann::json summarize_cohort(const Cohort& cohort);

/// Entry point of the command-line tool.
int cli_main(int argc, char** argv);

}  // namespace strokeforest
