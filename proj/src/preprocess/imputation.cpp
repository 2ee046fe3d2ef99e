#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "strokeforest/preprocess.hpp"
#include "strokeforest/stats.hpp"

namespace strokeforest {

ImputationModel ImputationModel::fit(const Cohort& train, std::span<const std::size_t> features) {
  const auto& cb = *train.codebook;
  ImputationModel model;
  model.fills.assign(cb.size(), std::nullopt);
  std::vector<double> values;
  for (std::size_t f : features) {
    values.clear();
    for (const auto& rec : train.records) {
      if (rec.values[f]) values.push_back(*rec.values[f]);
    }
    if (values.empty()) {
      throw std::invalid_argument("imputation: feature " + cb[f].name +
                                  " has no training values");
    }
    std::sort(values.begin(), values.end());
    const auto kind = cb[f].kind;
    if (kind == FeatureKind::Continuous || kind == FeatureKind::Ordinal) {
      model.fills[f] = stats::quantile_sorted(values, 0.5);
    } else {
      // Mode; the sorted scan keeps the lowest value among equally common ones.
      double best = values.front();
      std::size_t best_count = 0;
      for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        if (j - i > best_count) {
          best_count = j - i;
          best = values[i];
        }
        i = j;
      }
      model.fills[f] = best;
    }
  }
  return model;
}

Cohort ImputationModel::apply(const Cohort& cohort) const {
  Cohort out = cohort;
  for (auto& rec : out.records) {
    for (std::size_t f = 0; f < fills.size(); ++f) {
      if (fills[f] && !rec.values[f]) rec.values[f] = fills[f];
    }
  }
  return out;
}

Cohort impute_missing(const Cohort& train, const Cohort& apply_to) {
  std::vector<std::size_t> all(train.codebook->size());
  std::iota(all.begin(), all.end(), 0);
  return ImputationModel::fit(train, all).apply(apply_to);
}

}  // namespace strokeforest
