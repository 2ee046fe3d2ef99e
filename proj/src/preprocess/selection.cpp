#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "strokeforest/preprocess.hpp"
#include "strokeforest/stats.hpp"

namespace strokeforest {

std::string_view to_string(Endpoint endpoint) {
  return endpoint == Endpoint::Mortality ? "mortality" : "morbidity";
}

std::string_view to_string(MorbidityPopulation population) {
  return population == MorbidityPopulation::ExcludeDeaths ? "exclude-deaths"
                                                          : "include-deaths-as-negative";
}

Endpoint parse_endpoint(std::string_view text) {
  if (text == "mortality") return Endpoint::Mortality;
  if (text == "morbidity") return Endpoint::Morbidity;
  throw std::invalid_argument("unknown endpoint '" + std::string(text) + "'");
}

MorbidityPopulation parse_morbidity_population(std::string_view text) {
  if (text == "exclude-deaths") return MorbidityPopulation::ExcludeDeaths;
  if (text == "include-deaths-as-negative") return MorbidityPopulation::IncludeDeathsAsNegative;
  throw std::invalid_argument("unknown morbidity population '" + std::string(text) + "'");
}

std::vector<std::size_t> endpoint_rows(const Cohort& cohort, Endpoint endpoint,
                                       MorbidityPopulation population) {
  std::vector<std::size_t> rows;
  rows.reserve(cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const bool drop = endpoint == Endpoint::Morbidity &&
                      population == MorbidityPopulation::ExcludeDeaths &&
                      cohort.labels[i].mortality;
    if (!drop) rows.push_back(i);
  }
  return rows;
}

std::vector<std::uint8_t> endpoint_labels(const Cohort& cohort, Endpoint endpoint) {
  std::vector<std::uint8_t> y(cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto& l = cohort.labels[i];
    y[i] = endpoint == Endpoint::Mortality ? l.mortality : l.morbidity;
  }
  return y;
}

Cohort endpoint_cohort(const Cohort& cohort, Endpoint endpoint, MorbidityPopulation population) {
  const auto rows = endpoint_rows(cohort, endpoint, population);
  return cohort.subset(rows);
}

std::vector<std::size_t> modeling_features(const FeatureCodebook& codebook, Group group) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < codebook.size(); ++f) {
    const auto& g = codebook[f].groups;
    const bool keep = group == Group::All ? (g.is && g.ich) : g.applies_to(group);
    if (keep) out.push_back(f);
  }
  return out;
}

SelectionReport score_features_ttest(const Cohort& cohort, std::span<const std::uint8_t> labels,
                                     std::span<const std::size_t> candidates,
                                     stats::TTestVariance variance) {
  if (labels.size() != cohort.size()) throw std::invalid_argument("label count mismatch");
  SelectionReport report;
  report.scores.reserve(candidates.size());
  std::vector<double> pos;
  std::vector<double> neg;
  bool any_scored = false;
  for (std::size_t f : candidates) {
    pos.clear();
    neg.clear();
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      const auto& v = cohort.records[i].values[f];
      if (!v) continue;
      (labels[i] ? pos : neg).push_back(*v);
    }
    FeatureScore s;
    s.feature = f;
    if (pos.size() >= 2 && neg.size() >= 2) {
      s.scored = true;
      any_scored = true;
      try {
        const auto t = stats::t_test(pos, neg, variance);
        s.abs_t = t.abs_t;
        s.p_value = t.p_two_sided;
      } catch (const std::invalid_argument&) {
        // Constant and identical in both classes: no separation.
      }
    }
    report.scores.push_back(s);
  }
  if (!any_scored && !candidates.empty()) {
    throw std::invalid_argument("feature scoring: a class has fewer than 2 values for every feature");
  }
  std::vector<std::size_t> order(report.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.scores[a].abs_t > report.scores[b].abs_t;
  });
  report.ranking.reserve(order.size());
  for (std::size_t i : order) report.ranking.push_back(report.scores[i].feature);
  return report;
}

SelectionReport score_features_ttest(const Cohort& cohort, Endpoint endpoint) {
  std::vector<std::size_t> all(cohort.codebook->size());
  std::iota(all.begin(), all.end(), 0);
  return score_features_ttest(cohort, endpoint_labels(cohort, endpoint), all);
}

std::vector<std::size_t> select_top_k(SelectionReport& report, std::size_t k) {
  if (k == 0) throw std::invalid_argument("select_top_k: k must be positive");
  const auto n = std::min(k, report.ranking.size());
  report.selected.assign(report.ranking.begin(), report.ranking.begin() + static_cast<std::ptrdiff_t>(n));
  report.cutoff = {CutoffRule::Kind::TopK, k, report.cutoff.alpha};
  return report.selected;
}

std::vector<std::size_t> select_p_threshold(SelectionReport& report, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");
  report.selected.clear();
  for (std::size_t f : report.ranking) {
    const auto it = std::find_if(report.scores.begin(), report.scores.end(),
                                 [&](const FeatureScore& s) { return s.feature == f; });
    if (it->scored && it->p_value < alpha) report.selected.push_back(f);
  }
  report.cutoff = {CutoffRule::Kind::PThreshold, report.cutoff.k, alpha};
  return report.selected;
}

}  // namespace strokeforest
