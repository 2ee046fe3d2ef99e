#include <algorithm>
#include <stdexcept>

#include "split_internal.hpp"
#include "strokeforest/forest.hpp"

namespace strokeforest {

double gini_impurity(std::uint64_t n_neg, std::uint64_t n_pos) {
  const std::uint64_t n = n_neg + n_pos;
  if (n == 0) throw std::invalid_argument("gini impurity of an empty node");
  const double p0 = static_cast<double>(n_neg) / static_cast<double>(n);
  const double p1 = static_cast<double>(n_pos) / static_cast<double>(n);
  return 1.0 - (p0 * p0 + p1 * p1);
}

namespace detail {

double weighted_decrease(std::uint64_t n_neg, std::uint64_t n_pos, std::uint64_t ln,
                         std::uint64_t lp) {
  const std::uint64_t rn = n_neg - ln;
  const std::uint64_t rp = n_pos - lp;
  const double n = static_cast<double>(n_neg + n_pos);
  const double nl = static_cast<double>(ln + lp);
  const double nr = static_cast<double>(rn + rp);
  const double d = gini_impurity(n_neg, n_pos) - (nl / n) * gini_impurity(ln, lp) -
                   (nr / n) * gini_impurity(rn, rp);
  return std::max(d, 0.0);
}

}  // namespace detail

std::optional<Split> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidate_features,
                                std::size_t min_leaf) {
  if (rows.size() < 2) return std::nullopt;
  std::uint64_t n_neg = 0;
  std::uint64_t n_pos = 0;
  for (std::size_t r : rows) (data.label(r) ? n_pos : n_neg) += 1;
  if (n_neg == 0 || n_pos == 0) return std::nullopt;

  std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());

  detail::SplitSweep sweep(n_neg, n_pos, std::max<std::size_t>(min_leaf, 1));
  std::vector<std::pair<double, std::uint8_t>> pairs(rows.size());
  for (std::size_t f : features) {
    const auto col = data.column(f);
    for (std::size_t i = 0; i < rows.size(); ++i) pairs[i] = {col[rows[i]], data.label(rows[i])};
    std::sort(pairs.begin(), pairs.end());
    sweep.begin_feature(f);
    for (std::size_t i = 0; i < pairs.size();) {
      std::uint64_t neg = 0;
      std::uint64_t pos = 0;
      std::size_t j = i;
      for (; j < pairs.size() && pairs[j].first == pairs[i].first; ++j) {
        (pairs[j].second ? pos : neg) += 1;
      }
      sweep.add(pairs[i].first, neg, pos);
      i = j;
    }
  }
  if (!sweep.found()) return std::nullopt;
  return Split{sweep.feature(), sweep.threshold(),
               detail::weighted_decrease(n_neg, n_pos, sweep.left_neg(), sweep.left_pos())};
}

}  // namespace strokeforest
