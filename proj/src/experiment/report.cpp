#include <set>
#include <stdexcept>

#include "strokeforest/experiment.hpp"

namespace strokeforest {

namespace {

using nlohmann::json;

std::string_view to_string(stats::TTestVariance v) {
  return v == stats::TTestVariance::Welch ? "welch" : "pooled";
}

stats::TTestVariance parse_variance(std::string_view text) {
  if (text == "welch") return stats::TTestVariance::Welch;
  if (text == "pooled") return stats::TTestVariance::Pooled;
  throw std::invalid_argument("unknown t-test variance '" + std::string(text) + "'");
}

void check_keys(const json& doc, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!doc.is_object()) throw std::invalid_argument(std::string(where) + ": expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

json to_json(const stats::NormalityResult& r) {
  return {{"statistic", r.statistic}, {"p_value", r.p_value}, {"reject_at_005", r.reject_at_005}};
}

json to_json(const SelectionReport& report, const FeatureCodebook& cb) {
  json scores = json::array();
  for (const auto& s : report.scores) {
    scores.push_back({{"feature", cb[s.feature].name},
                      {"abs_t", s.abs_t},
                      {"p_value", s.p_value},
                      {"scored", s.scored}});
  }
  json ranking = json::array();
  for (std::size_t f : report.ranking) ranking.push_back(cb[f].name);
  json selected = json::array();
  for (std::size_t f : report.selected) selected.push_back(cb[f].name);
  json cutoff = report.cutoff.kind == CutoffRule::Kind::TopK
                    ? json{{"rule", "top-k"}, {"k", report.cutoff.k}}
                    : json{{"rule", "p-threshold"}, {"alpha", report.cutoff.alpha}};
  return {{"scores", scores}, {"ranking", ranking}, {"selected", selected}, {"cutoff", cutoff}};
}

json to_json(const FoldResult& f) {
  json importance = json::object();
  for (std::size_t i = 0; i < f.selected.size(); ++i) {
    importance[f.selected[i]] = {{"gini", f.gini[i]}, {"permutation", f.permutation[i]}};
  }
  const auto& c = f.acc.confusion;
  return {{"repetition", f.repetition},
          {"fold", f.fold},
          {"auc", f.auc},
          {"acc", f.acc.accuracy},
          {"confusion", {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}, {"threshold", c.threshold}}},
          {"n_train", f.n_train},
          {"n_test", f.n_test},
          {"n_trees", f.n_trees},
          {"selected", f.selected},
          {"importance", importance}};
}

}  // namespace

json to_json(const ExperimentPlan& plan) {
  const auto& f = plan.forest;
  return {{"group", to_string(plan.group)},
          {"endpoint", to_string(plan.endpoint)},
          {"repetitions", plan.repetitions},
          {"folds", plan.folds},
          {"k_features", plan.k_features},
          {"trees",
           {{"min", plan.min_trees},
            {"max", plan.max_trees},
            {"step", plan.tree_step},
            {"inner_folds", plan.inner_folds},
            {"scope", to_string(plan.tuning)},
            {"fixed", plan.fixed_trees}}},
          {"master_seed", plan.master_seed},
          {"selection_scope", to_string(plan.selection_scope)},
          {"morbidity_population", to_string(plan.morbidity_population)},
          {"stratify", plan.stratify},
          {"ttest", to_string(plan.ttest)},
          {"forest",
           {{"mtry", f.mtry},
            {"min_leaf", f.min_leaf},
            {"max_depth", f.max_depth ? json(*f.max_depth) : json()},
            {"bootstrap", f.bootstrap},
            {"bootstrap_fraction", f.bootstrap_fraction}}},
          {"acc_threshold", plan.acc_threshold}};
}

ExperimentPlan plan_from_json(const json& doc, ExperimentPlan plan) {
  check_keys(doc, "plan",
             {"schema_version", "kind", "problems", "group", "endpoint", "repetitions", "folds",
              "k_features", "trees", "master_seed", "selection_scope", "morbidity_population",
              "stratify", "ttest", "forest", "acc_threshold"});
  try {
    if (doc.contains("group")) plan.group = parse_group(doc.at("group").get<std::string>());
    if (doc.contains("endpoint")) plan.endpoint = parse_endpoint(doc.at("endpoint").get<std::string>());
    read(doc, "repetitions", plan.repetitions);
    read(doc, "folds", plan.folds);
    read(doc, "k_features", plan.k_features);
    if (doc.contains("trees")) {
      const auto& t = doc.at("trees");
      check_keys(t, "plan.trees", {"min", "max", "step", "inner_folds", "scope", "fixed"});
      read(t, "min", plan.min_trees);
      read(t, "max", plan.max_trees);
      read(t, "step", plan.tree_step);
      read(t, "inner_folds", plan.inner_folds);
      read(t, "fixed", plan.fixed_trees);
      if (t.contains("scope")) plan.tuning = parse_tuning_scope(t.at("scope").get<std::string>());
    }
    read(doc, "master_seed", plan.master_seed);
    if (doc.contains("selection_scope")) {
      plan.selection_scope = parse_selection_scope(doc.at("selection_scope").get<std::string>());
    }
    if (doc.contains("morbidity_population")) {
      plan.morbidity_population =
          parse_morbidity_population(doc.at("morbidity_population").get<std::string>());
    }
    read(doc, "stratify", plan.stratify);
    if (doc.contains("ttest")) plan.ttest = parse_variance(doc.at("ttest").get<std::string>());
    if (doc.contains("forest")) {
      const auto& f = doc.at("forest");
      check_keys(f, "plan.forest", {"mtry", "min_leaf", "max_depth", "bootstrap", "bootstrap_fraction"});
      read(f, "mtry", plan.forest.mtry);
      read(f, "min_leaf", plan.forest.min_leaf);
      if (f.contains("max_depth")) {
        plan.forest.max_depth = f.at("max_depth").is_null()
                                    ? std::nullopt
                                    : std::optional(f.at("max_depth").get<std::size_t>());
      }
      read(f, "bootstrap", plan.forest.bootstrap);
      read(f, "bootstrap_fraction", plan.forest.bootstrap_fraction);
    }
    read(doc, "acc_threshold", plan.acc_threshold);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("plan: ") + e.what());
  }
  validate(plan);
  return plan;
}

json to_json(const AggregateReport& a) {
  json importance = json::object();
  for (const auto& [name, g] : a.gini_sums) {
    importance[name] = {{"gini_sum", g},
                        {"permutation_sum", a.permutation_sums.at(name)},
                        {"selected_count", a.selection_counts.at(name)}};
  }
  return {{"n_runs", a.n_runs},
          {"mean_auc", a.mean_auc},
          {"sd_auc", a.sd_auc},
          {"median_auc", a.median_auc},
          {"min_auc", a.min_auc},
          {"max_auc", a.max_auc},
          {"mean_acc", a.mean_acc},
          {"sd_acc", a.sd_acc},
          {"importance", importance},
          {"gini_ranking", a.gini_ranking()},
          {"permutation_ranking", a.permutation_ranking()},
          {"auc", a.auc},
          {"acc", a.acc}};
}

json to_json(const RunResult& r) {
  json doc;
  doc["group"] = to_string(r.plan.group);
  doc["endpoint"] = to_string(r.plan.endpoint);
  doc["plan"] = to_json(r.plan);
  doc["problem_seed"] = r.plan.problem_seed();
  doc["population"] = {{"n", r.population}, {"n_pos", r.n_pos}, {"n_neg", r.n_neg}};
  if (r.tuning) {
    json table = json::array();
    for (const auto& [n, auc] : r.tuning->table) table.push_back({{"n_trees", n}, {"mean_auc", auc}});
    doc["tuning"] = {{"best_n_trees", r.tuning->best_n_trees}, {"table", table}};
  } else {
    doc["tuning"] = nullptr;
  }
  doc["global_selection"] =
      r.global_selection ? to_json(*r.global_selection, *r.codebook) : json();
  doc["aggregate"] = to_json(aggregate(r));
  const auto ci = auc_ci(r.oof_scores, r.oof_labels);
  doc["roc"] = {{"source", "repetition 0 out-of-fold scores"},
                {"auc", ci.auc},
                {"se", ci.se},
                {"ci_low", ci.ci_low},
                {"ci_high", ci.ci_high}};
  json runs = json::array();
  for (const auto& f : r.folds) runs.push_back(to_json(f));
  doc["runs"] = std::move(runs);
  return doc;
}

json make_report(const std::vector<RunResult>& results, const json& cohort_info) {
  json problems = json::array();
  for (const auto& r : results) problems.push_back(to_json(r));
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "report"},
          {"cohort", cohort_info},
          {"conventions",
           {{"accuracy", "positive when vote fraction >= acc_threshold"},
            {"leaf_tie_vote", 0.5},
            {"wilcoxon_zero_differences", "dropped"},
            {"quantiles", "linear interpolation between order statistics"},
            {"importance_sums", "plain sums over all (repetition, fold) models"}}},
          {"problems", problems}};
}

json to_json(const ComparisonReport& report) {
  json normality = json::object();
  for (const auto& [name, r] : report.normality) normality[name] = to_json(r);
  json pairs = json::array();
  for (const auto& p : report.pairs) {
    const auto& w = p.wilcoxon;
    json t = p.paired_t ? json{{"t", p.paired_t->t}, {"df", p.paired_t->df}, {"p_two_sided", p.paired_t->p_two_sided}}
                        : json();
    pairs.push_back(
        {{"a", p.a},
         {"b", p.b},
         {"wilcoxon",
          {{"w_plus", w.w_plus},
           {"n_effective", w.n_effective},
           {"p_two_sided", w.p_two_sided},
           {"method", w.method == stats::WilcoxonMethod::Exact ? "exact" : "normal-approximation"},
           {"z", w.z}}},
         {"paired_t", t},
         {"decision_test", p.decision_test},
         {"decision_p", p.decision_p},
         {"reject_at_005", p.reject_at_005}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "comparison"},
          {"normality", normality},
          {"pooled_normality", report.pooled_normality ? to_json(*report.pooled_normality) : json()},
          {"any_normality_rejected", report.any_normality_rejected},
          {"pairs", pairs}};
}

json to_json(const ReferenceModel& model) {
  json fills = json::object();
  for (const auto& [name, v] : model.fills) fills[name] = v;
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "model"},
          {"group", to_string(model.group)},
          {"endpoint", to_string(model.endpoint)},
          {"morbidity_population", to_string(model.morbidity_population)},
          {"fills", fills},
          {"forest", to_json(model.forest)}};
}

ReferenceModel reference_model_from_json(const json& doc) {
  if (doc.value("kind", "") != "model") throw std::invalid_argument("model JSON: kind must be \"model\"");
  if (doc.value("schema_version", 0) != kReportSchemaVersion) {
    throw std::invalid_argument("model JSON: unsupported schema_version");
  }
  ReferenceModel m;
  m.group = parse_group(doc.at("group").get<std::string>());
  m.endpoint = parse_endpoint(doc.at("endpoint").get<std::string>());
  m.morbidity_population = parse_morbidity_population(doc.at("morbidity_population").get<std::string>());
  for (const auto& [name, v] : doc.at("fills").items()) m.fills.emplace_back(name, v.get<double>());
  m.forest = forest_from_json(doc.at("forest"));
  return m;
}

}  // namespace strokeforest
