#include <algorithm>
#include <stdexcept>
#include <string>

#include "strokeforest/experiment.hpp"
#include "strokeforest/parallel.hpp"
#include "strokeforest/rng.hpp"

namespace strokeforest {

namespace {

// Child-seed indices under the problem seed. Repetitions use 0..reps-1.
constexpr std::uint64_t kTuningStream = std::uint64_t{1} << 40;
constexpr std::uint64_t kReferenceStream = kTuningStream + 1;
constexpr std::size_t kMaxRepetitions = std::size_t{1} << 32;

std::uint64_t group_index(Group g) {
  switch (g) {
    case Group::IS: return 0;
    case Group::ICH: return 1;
    case Group::All: return 2;
  }
  return 0;
}

struct Population {
  Cohort cohort;
  std::vector<std::uint8_t> labels;
  std::vector<std::size_t> candidates;
};

Population prepare(const Cohort& cohort, const ExperimentPlan& plan) {
  Population p;
  p.cohort = endpoint_cohort(filter_group(cohort, plan.group), plan.endpoint,
                             plan.morbidity_population);
  p.labels = endpoint_labels(p.cohort, plan.endpoint);
  for (std::size_t f : modeling_features(*p.cohort.codebook, plan.group)) {
    const bool observed = std::any_of(p.cohort.records.begin(), p.cohort.records.end(),
                                      [&](const PatientRecord& r) { return r.values[f].has_value(); });
    if (observed) p.candidates.push_back(f);
  }
  if (p.candidates.empty()) throw std::invalid_argument("no observed candidate features");
  return p;
}

std::vector<std::uint8_t> pick(std::span<const std::uint8_t> labels,
                               std::span<const std::size_t> rows) {
  std::vector<std::uint8_t> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = labels[rows[i]];
  return out;
}

std::vector<std::size_t> observed_in(const Cohort& c, std::span<const std::size_t> features) {
  std::vector<std::size_t> out;
  for (std::size_t f : features) {
    for (const auto& r : c.records) {
      if (r.values[f]) {
        out.push_back(f);
        break;
      }
    }
  }
  return out;
}

/// Imputes with fills learned on `train`, selects features (unless fixed)
/// and returns the training matrix plus what is needed to score test rows.
struct FoldModelInput {
  ImputationModel fills;
  std::vector<std::size_t> selected;  // codebook order
  Dataset train;
};

FoldModelInput fit_inputs(const Cohort& train, std::span<const std::uint8_t> y,
                          std::span<const std::size_t> candidates, const ExperimentPlan& plan,
                          const std::vector<std::size_t>* fixed_selection) {
  FoldModelInput in;
  const auto usable = observed_in(train, candidates);
  in.fills = ImputationModel::fit(train, usable);
  const auto imputed = in.fills.apply(train);
  if (fixed_selection) {
    in.selected = *fixed_selection;
  } else {
    auto report = score_features_ttest(imputed, y, usable, plan.ttest);
    in.selected = select_top_k(report, plan.k_features);
  }
  std::sort(in.selected.begin(), in.selected.end());
  in.train = Dataset::from_cohort(imputed, in.selected, y);
  return in;
}

std::vector<std::size_t> global_selection(const Population& pop, const ExperimentPlan& plan,
                                          SelectionReport& report) {
  const auto fills = ImputationModel::fit(pop.cohort, pop.candidates);
  report = score_features_ttest(fills.apply(pop.cohort), pop.labels, pop.candidates, plan.ttest);
  auto selected = select_top_k(report, plan.k_features);
  std::sort(selected.begin(), selected.end());
  return selected;
}

TuningConfig tuning_config(const ExperimentPlan& plan, std::uint64_t seed) {
  return {plan.min_trees, plan.max_trees, plan.tree_step, plan.inner_folds, seed};
}

std::vector<std::string> names_of(const FeatureCodebook& cb, std::span<const std::size_t> f) {
  std::vector<std::string> out;
  for (std::size_t i : f) out.push_back(cb[i].name);
  return out;
}

}  // namespace

std::string_view to_string(SelectionScope scope) {
  return scope == SelectionScope::PerFold ? "per-fold" : "global";
}

std::string_view to_string(TuningScope scope) {
  switch (scope) {
    case TuningScope::PerProblem: return "per-problem";
    case TuningScope::PerFold: return "per-fold";
    case TuningScope::Fixed: return "fixed";
  }
  return "";
}

SelectionScope parse_selection_scope(std::string_view text) {
  if (text == "per-fold") return SelectionScope::PerFold;
  if (text == "global") return SelectionScope::Global;
  throw std::invalid_argument("unknown selection scope '" + std::string(text) + "'");
}

TuningScope parse_tuning_scope(std::string_view text) {
  if (text == "per-problem") return TuningScope::PerProblem;
  if (text == "per-fold") return TuningScope::PerFold;
  if (text == "fixed") return TuningScope::Fixed;
  throw std::invalid_argument("unknown tuning scope '" + std::string(text) + "'");
}

std::uint64_t ExperimentPlan::problem_seed() const {
  return derive_seed(master_seed, group_index(group) * 2 + (endpoint == Endpoint::Morbidity));
}

void validate(const ExperimentPlan& plan) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("plan: " + what); };
  if (plan.repetitions < 1 || plan.repetitions >= kMaxRepetitions) fail("repetitions out of range");
  if (plan.folds < 2) fail("folds must be >= 2");
  if (plan.k_features < 1) fail("k_features must be >= 1");
  if (plan.min_trees < 1 || plan.min_trees > plan.max_trees) fail("empty tree-count range");
  if (plan.inner_folds < 2) fail("inner_folds must be >= 2");
  if (plan.fixed_trees < 1) fail("fixed_trees must be >= 1");
  if (!(plan.acc_threshold >= 0.0 && plan.acc_threshold <= 1.0)) fail("acc_threshold outside [0, 1]");
  if (plan.forest.min_leaf < 1) fail("forest.min_leaf must be >= 1");
  if (plan.forest.mtry > plan.k_features) fail("forest.mtry exceeds k_features");
  if (!(plan.forest.bootstrap_fraction > 0.0)) fail("forest.bootstrap_fraction must be positive");
}

RunResult run_problem(const Cohort& cohort, const ExperimentPlan& plan, std::size_t workers) {
  validate(plan);
  const auto& cb = *cohort.codebook;
  const Population pop = prepare(cohort, plan);
  RunResult result;
  result.plan = plan;
  result.codebook = cohort.codebook;
  result.population = pop.cohort.size();
  result.n_pos = static_cast<std::size_t>(std::count(pop.labels.begin(), pop.labels.end(), 1));
  result.n_neg = result.population - result.n_pos;
  if (std::min(result.n_pos, result.n_neg) < plan.folds) {
    throw std::invalid_argument("problem " + std::string(to_string(plan.group)) + "/" +
                                std::string(to_string(plan.endpoint)) + ": minority class has " +
                                std::to_string(std::min(result.n_pos, result.n_neg)) +
                                " records, fewer than the " + std::to_string(plan.folds) + " folds");
  }

  const std::uint64_t problem_seed = plan.problem_seed();
  const auto resample = build_resample_plan(problem_seed, plan.repetitions, plan.folds);
  std::vector<RepetitionDraw> draws(plan.repetitions);
  for (std::size_t r = 0; r < plan.repetitions; ++r) draws[r] = resample.draw(r, pop.labels, plan.stratify);

  std::vector<std::size_t> fixed_selection;
  if (plan.selection_scope == SelectionScope::Global) {
    SelectionReport report;
    fixed_selection = global_selection(pop, plan, report);
    result.global_selection = std::move(report);
  }
  const auto* fixed = plan.selection_scope == SelectionScope::Global ? &fixed_selection : nullptr;

  std::size_t n_trees = plan.fixed_trees;
  if (plan.tuning == TuningScope::PerProblem) {
    const auto& sample = draws[0].sample;
    const auto input = fit_inputs(pop.cohort.subset(sample), pick(pop.labels, sample),
                                  pop.candidates, plan, fixed);
    result.tuning = tune_num_trees(input.train, plan.forest,
                                   tuning_config(plan, derive_seed(problem_seed, kTuningStream)),
                                   workers);
    n_trees = result.tuning->best_n_trees;
  }

  result.oof_scores.assign(draws[0].sample.size(), 0.0);
  result.oof_labels = pick(pop.labels, draws[0].sample);
  result.folds.resize(plan.repetitions * plan.folds);
  parallel_for(result.folds.size(), workers, [&](std::size_t unit) {
    const std::size_t r = unit / plan.folds;
    const std::size_t k = unit % plan.folds;
    try {
      const auto& draw = draws[r];
      std::vector<std::size_t> train_rows;
      std::vector<std::size_t> test_rows;
      std::vector<std::size_t> test_pos;
      for (std::size_t i = 0; i < draw.sample.size(); ++i) {
        if (draw.folds.fold_of[i] == k) {
          test_rows.push_back(draw.sample[i]);
          test_pos.push_back(i);
        } else {
          train_rows.push_back(draw.sample[i]);
        }
      }
      const auto y_train = pick(pop.labels, train_rows);
      const auto y_test = pick(pop.labels, test_rows);
      const auto input = fit_inputs(pop.cohort.subset(train_rows), y_train, pop.candidates, plan, fixed);
      const auto test = Dataset::from_cohort(input.fills.apply(pop.cohort.subset(test_rows)),
                                             input.selected, y_test);

      ForestConfig cfg = plan.forest;
      cfg.n_trees = n_trees;
      if (plan.tuning == TuningScope::PerFold) {
        cfg.n_trees = tune_num_trees(input.train, plan.forest,
                                     tuning_config(plan, derive_seed(draw.seed, 200 + k)))
                          .best_n_trees;
      }
      cfg.seed = derive_seed(draw.seed, 100 + k);
      const auto forest = train_forest(input.train, cfg);
      const auto scores = predict_proba(forest, test);

      FoldResult& out = result.folds[unit];
      out.repetition = r;
      out.fold = k;
      out.auc = auc_mann_whitney(scores, y_test);
      out.acc = accuracy(scores, y_test, plan.acc_threshold);
      out.n_train = train_rows.size();
      out.n_test = test_rows.size();
      out.n_trees = cfg.n_trees;
      out.selected = names_of(cb, input.selected);
      out.gini = gini_importance(forest);
      out.permutation = permutation_importance(forest, input.train, derive_seed(draw.seed, 300 + k));
      if (r == 0) {
        for (std::size_t i = 0; i < test_pos.size(); ++i) result.oof_scores[test_pos[i]] = scores[i];
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("repetition " + std::to_string(r) + ", fold " + std::to_string(k) +
                               ": " + e.what());
    }
  });
  return result;
}

ReferenceModel train_reference_model(const Cohort& cohort, const ExperimentPlan& plan,
                                     std::size_t n_trees, std::size_t workers) {
  validate(plan);
  const Population pop = prepare(cohort, plan);
  const std::uint64_t problem_seed = plan.problem_seed();
  const auto resample = build_resample_plan(problem_seed, 1, plan.folds);
  const auto draw = resample.draw(0, pop.labels, plan.stratify);
  std::vector<std::size_t> fixed_selection;
  if (plan.selection_scope == SelectionScope::Global) {
    SelectionReport report;
    fixed_selection = global_selection(pop, plan, report);
  }
  const auto input = fit_inputs(pop.cohort.subset(draw.sample), pick(pop.labels, draw.sample),
                                pop.candidates, plan,
                                plan.selection_scope == SelectionScope::Global ? &fixed_selection
                                                                               : nullptr);
  ReferenceModel model;
  model.group = plan.group;
  model.endpoint = plan.endpoint;
  model.morbidity_population = plan.morbidity_population;
  const auto& cb = *cohort.codebook;
  for (std::size_t f = 0; f < input.fills.fills.size(); ++f) {
    if (input.fills.fills[f]) model.fills.emplace_back(cb[f].name, *input.fills.fills[f]);
  }
  ForestConfig cfg = plan.forest;
  cfg.n_trees = n_trees;
  cfg.seed = derive_seed(problem_seed, kReferenceStream);
  model.forest = train_forest(input.train, cfg, workers);
  return model;
}

}  // namespace strokeforest
