#include <algorithm>
#include <stdexcept>

#include "strokeforest/experiment.hpp"

namespace strokeforest {

namespace {

std::vector<std::string> rank_by(const std::map<std::string, double>& sums) {
  std::vector<std::pair<std::string, double>> v(sums.begin(), sums.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (const auto& [name, value] : v) out.push_back(name);
  return out;
}

}  // namespace

std::vector<std::string> AggregateReport::gini_ranking() const { return rank_by(gini_sums); }
std::vector<std::string> AggregateReport::permutation_ranking() const {
  return rank_by(permutation_sums);
}

AggregateReport aggregate(std::span<const FoldResult> folds) {
  if (folds.empty()) throw std::invalid_argument("aggregate: no results");
  AggregateReport a;
  a.n_runs = folds.size();
  for (const auto& f : folds) {
    a.auc.push_back(f.auc);
    a.acc.push_back(f.acc.accuracy);
    for (std::size_t i = 0; i < f.selected.size(); ++i) {
      a.gini_sums[f.selected[i]] += f.gini[i];
      a.permutation_sums[f.selected[i]] += f.permutation[i];
      ++a.selection_counts[f.selected[i]];
    }
  }
  a.mean_auc = stats::mean(a.auc);
  a.sd_auc = stats::sample_sd(a.auc);
  a.mean_acc = stats::mean(a.acc);
  a.sd_acc = stats::sample_sd(a.acc);
  std::vector<double> sorted = a.auc;
  std::sort(sorted.begin(), sorted.end());
  a.median_auc = stats::quantile_sorted(sorted, 0.5);
  a.min_auc = sorted.front();
  a.max_auc = sorted.back();
  return a;
}

AggregateReport aggregate(const RunResult& result) { return aggregate(result.folds); }

}  // namespace strokeforest
