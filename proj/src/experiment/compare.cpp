#include <stdexcept>

#include "strokeforest/experiment.hpp"

namespace strokeforest {

ComparisonReport compare_groups(
    const std::vector<std::pair<std::string, std::vector<double>>>& samples,
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (samples.size() < 2) throw std::invalid_argument("compare: need at least 2 named vectors");
  ComparisonReport report;
  std::vector<double> pooled;
  for (const auto& [name, values] : samples) {
    report.normality.emplace_back(name, stats::shapiro_wilk(values));
    report.any_normality_rejected |= report.normality.back().second.reject_at_005;
    pooled.insert(pooled.end(), values.begin(), values.end());
  }
  if (pooled.size() <= 5000) {
    report.pooled_normality = stats::shapiro_wilk(pooled);
    report.any_normality_rejected |= report.pooled_normality->reject_at_005;
  }

  auto find = [&](const std::string& name) -> const std::vector<double>& {
    for (const auto& [n, v] : samples) {
      if (n == name) return v;
    }
    throw std::invalid_argument("compare: unknown vector '" + name + "'");
  };
  std::vector<std::pair<std::string, std::string>> todo = pairs;
  if (todo.empty()) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (std::size_t j = i + 1; j < samples.size(); ++j) {
        todo.emplace_back(samples[i].first, samples[j].first);
      }
    }
  }
  for (const auto& [na, nb] : todo) {
    const auto& a = find(na);
    const auto& b = find(nb);
    if (a.size() != b.size()) {
      throw std::invalid_argument("compare: '" + na + "' and '" + nb + "' differ in length (" +
                                  std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    PairComparison pc;
    pc.a = na;
    pc.b = nb;
    pc.wilcoxon = stats::wilcoxon_signed_rank(a, b);
    try {
      pc.paired_t = stats::paired_t(a, b);
    } catch (const std::invalid_argument&) {
      // Identical vectors or a single pair: no t statistic.
    }
    if (report.any_normality_rejected || !pc.paired_t) {
      pc.decision_test = "wilcoxon";
      pc.decision_p = pc.wilcoxon.p_two_sided;
    } else {
      pc.decision_test = "paired-t";
      pc.decision_p = pc.paired_t->p_two_sided;
    }
    pc.reject_at_005 = pc.decision_p < 0.05;
    report.pairs.push_back(std::move(pc));
  }
  return report;
}

}  // namespace strokeforest
