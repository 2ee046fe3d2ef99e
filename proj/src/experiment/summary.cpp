#include <algorithm>
#include <cmath>

#include "strokeforest/experiment.hpp"

namespace strokeforest {

namespace {

using nlohmann::json;

json share(std::size_t count, std::size_t n) {
  return {{"count", count}, {"fraction", n ? static_cast<double>(count) / static_cast<double>(n) : 0.0}};
}

json describe_feature(const FeatureDef& def, const std::vector<double>& values) {
  json j;
  j["kind"] = to_string(def.kind);
  j["n_observed"] = values.size();
  if (values.empty()) return j;
  if (def.kind == FeatureKind::Binary || def.kind == FeatureKind::Categorical) {
    const auto count = static_cast<std::size_t>(std::count(values.begin(), values.end(), 1.0));
    j["count"] = count;
    j["fraction"] = static_cast<double>(count) / static_cast<double>(values.size());
    return j;
  }
  const auto d = stats::describe(values);
  j["mean"] = d.mean;
  j["sd"] = d.sd;
  j["median"] = d.median;
  j["q1"] = d.q1;
  j["q3"] = d.q3;
  const bool constant = std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
  if (values.size() >= 5 && !constant) {
    const auto ks = stats::ks_normality(values);
    j["normality"] = {{"test", "kolmogorov-smirnov (lilliefors)"},
                      {"statistic", ks.statistic},
                      {"p_value", ks.p_value},
                      {"reject_at_005", ks.reject_at_005}};
  } else {
    j["normality"] = nullptr;
  }
  return j;
}

json describe_group(const Cohort& c, std::size_t retained) {
  const auto& cb = *c.codebook;
  std::size_t poor = 0;
  std::size_t morb = 0;
  std::size_t mort = 0;
  std::vector<std::size_t> mrs(7, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    poor += c.labels[i].poor_outcome;
    morb += c.labels[i].morbidity;
    mort += c.labels[i].mortality;
    ++mrs[static_cast<std::size_t>(c.records[i].mrs_3m)];
  }
  const auto n0 = cb.index_of("NIHSS0");
  const auto n24 = cb.index_of("NIHSS24");
  const auto n48 = cb.index_of("NIHSS48");
  std::size_t ed = 0;
  std::size_t reperfusion = 0;
  std::size_t with_nihss = 0;
  if (n0 && n24 && n48) {
    for (const auto& r : c.records) {
      if (!r.values[*n0] || !r.values[*n24] || !r.values[*n48]) continue;
      const auto flags = derive_clinical_flags(static_cast<int>(*r.values[*n0]),
                                               static_cast<int>(*r.values[*n24]),
                                               static_cast<int>(*r.values[*n48]));
      ++with_nihss;
      ed += flags.early_deterioration;
      reperfusion += flags.effective_reperfusion;
    }
  }
  json features = json::object();
  std::vector<double> values;
  for (std::size_t f = 0; f < cb.size(); ++f) {
    values.clear();
    for (const auto& r : c.records) {
      if (r.values[f]) values.push_back(*r.values[f]);
    }
    features[cb[f].name] = describe_feature(cb[f], values);
  }
  return {{"n", c.size()},
          {"fraction_of_retained", retained ? static_cast<double>(c.size()) / static_cast<double>(retained) : 0.0},
          {"outcomes", {{"poor_outcome", share(poor, c.size())},
                        {"morbidity", share(morb, c.size())},
                        {"mortality", share(mort, c.size())}}},
          {"mrs_distribution", mrs},
          {"clinical_flags", {{"n_with_nihss", with_nihss},
                              {"early_deterioration", share(ed, with_nihss)},
                              {"effective_reperfusion", share(reperfusion, with_nihss)}}},
          {"features", features}};
}

}  // namespace

json summarize_cohort(const Cohort& cohort) {
  const auto ex = apply_exclusions(cohort);
  json groups = json::object();
  for (Group g : {Group::All, Group::IS, Group::ICH}) {
    groups[std::string(to_string(g))] = describe_group(filter_group(ex.cohort, g), ex.cohort.size());
  }
  return {{"schema_version", kReportSchemaVersion},
          {"kind", "summary"},
          {"n_records", cohort.size()},
          {"exclusions", {{"died_first_24h", ex.died_first_24h},
                          {"lost_followup", ex.lost_followup},
                          {"retained", ex.cohort.size()}}},
          {"groups", groups}};
}

}  // namespace strokeforest
