#include <stdexcept>

#include "strokeforest/eval.hpp"
#include "strokeforest/forest.hpp"
#include "strokeforest/preprocess.hpp"
#include "strokeforest/rng.hpp"

namespace strokeforest {

TuningResult tune_num_trees(const Dataset& data, const ForestConfig& base,
                            const TuningConfig& tuning, std::size_t workers) {
  if (tuning.min_trees == 0 || tuning.min_trees > tuning.max_trees) {
    throw std::invalid_argument("tuning: empty tree-count range");
  }
  std::vector<std::size_t> grid;
  for (std::size_t m = tuning.min_trees; m <= tuning.max_trees;) {
    grid.push_back(m);
    if (tuning.step == 0) break;
    m += tuning.step;
  }
  TuningResult result;
  if (grid.size() == 1) {
    result.best_n_trees = grid.front();
    result.table.emplace_back(grid.front(), 0.0);
    return result;
  }
  const std::size_t largest = grid.back();
  const auto folds = stratified_kfold(data.labels(), tuning.inner_folds, derive_seed(tuning.seed, 0));
  std::vector<double> auc_sum(grid.size(), 0.0);
  for (std::size_t k = 0; k < tuning.inner_folds; ++k) {
    const auto train = data.subset(folds.train_rows(k));
    const auto test = data.subset(folds.test_rows(k));
    ForestConfig cfg = base;
    cfg.n_trees = largest;
    cfg.seed = derive_seed(tuning.seed, 1 + k);
    const auto forest = train_forest(train, cfg, workers);
    const auto votes = tree_votes(forest, test);
    const std::size_t n = test.rows();
    std::vector<double> cum(n, 0.0);
    std::size_t g = 0;
    std::vector<double> score(n);
    for (std::size_t t = 0; t < largest && g < grid.size(); ++t) {
      for (std::size_t i = 0; i < n; ++i) cum[i] += votes[t * n + i];
      if (t + 1 == grid[g]) {
        for (std::size_t i = 0; i < n; ++i) score[i] = cum[i] / static_cast<double>(t + 1);
        auc_sum[g] += auc_mann_whitney(score, test.labels());
        ++g;
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double mean = auc_sum[g] / static_cast<double>(tuning.inner_folds);
    result.table.emplace_back(grid[g], mean);
    if (mean > result.table[best].second) best = g;
  }
  result.best_n_trees = grid[best];
  return result;
}

}  // namespace strokeforest
