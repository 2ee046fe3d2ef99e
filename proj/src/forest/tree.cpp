#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "forest_internal.hpp"
#include "split_internal.hpp"
#include "strokeforest/rng.hpp"

namespace strokeforest {

std::size_t ForestConfig::resolved_mtry(std::size_t n_features) const {
  if (n_features == 0) throw std::invalid_argument("forest: no features");
  std::size_t m = mtry;
  if (m == 0) m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))));
  return std::clamp<std::size_t>(m, 1, n_features);
}

std::size_t Tree::leaf_index(const Dataset& data, std::size_t row) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = data.at(row, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right;
  }
  return i;
}

std::size_t Tree::leaf_index(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return i;
}

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) {
      d[nodes[i].left] = d[i] + 1;
      d[nodes[i].right] = d[i] + 1;
    }
  }
  return best;
}

namespace detail {

FeatureIndex::FeatureIndex(const Dataset& data) : ranks(data.features()), values(data.features()) {
  const std::size_t n = data.rows();
  std::vector<std::uint32_t> order(n);
  for (std::size_t f = 0; f < data.features(); ++f) {
    const auto col = data.column(f);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return col[a] < col[b]; });
    ranks[f].resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double v = col[order[k]];
      if (values[f].empty() || values[f].back() != v) values[f].push_back(v);
      ranks[f][order[k]] = static_cast<std::uint32_t>(values[f].size() - 1);
    }
    max_distinct = std::max(max_distinct, values[f].size());
  }
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const FeatureIndex& index, const ForestConfig& config,
              std::uint64_t seed)
      : data_(data), index_(index), config_(config), rng_(seed),
        mtry_(config.resolved_mtry(data.features())),
        min_leaf_(std::max<std::size_t>(config.min_leaf, 1)),
        hist_neg_(index.max_distinct), hist_pos_(index.max_distinct) {
    features_.resize(data.features());
    for (std::size_t f = 0; f < features_.size(); ++f) features_[f] = f;
  }

  Tree build() {
    const std::size_t n = data_.rows();
    if (n < 1) throw std::invalid_argument("tree: no training rows");
    weight_.assign(n, 0);
    if (config_.bootstrap) {
      const auto draws = static_cast<std::size_t>(
          std::ceil(config_.bootstrap_fraction * static_cast<double>(n)));
      for (std::size_t k = 0; k < draws; ++k) ++weight_[rng_.below(n)];
    } else {
      std::fill(weight_.begin(), weight_.end(), 1u);
    }
    std::uint64_t n_neg = 0;
    std::uint64_t n_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight_[i] == 0) {
        tree_.oob.push_back(static_cast<std::uint32_t>(i));
      } else {
        rows_.push_back(static_cast<std::uint32_t>(i));
        (data_.label(i) ? n_pos : n_neg) += weight_[i];
      }
    }
    grow(0, rows_.size(), 0, n_neg, n_pos);
    return std::move(tree_);
  }

 private:
  std::uint32_t grow(std::size_t begin, std::size_t end, std::size_t depth, std::uint64_t n_neg,
                     std::uint64_t n_pos) {
    const auto id = static_cast<std::uint32_t>(tree_.nodes.size());
    TreeNode node;
    node.n_neg = static_cast<std::uint32_t>(n_neg);
    node.n_pos = static_cast<std::uint32_t>(n_pos);
    tree_.nodes.push_back(node);

    const bool stop = n_neg == 0 || n_pos == 0 || n_neg + n_pos < 2 * min_leaf_ ||
                      (config_.max_depth && depth >= *config_.max_depth) || end - begin < 2;
    if (stop) return id;

    // Fresh random candidate subset (partial Fisher-Yates).
    for (std::size_t j = 0; j < mtry_; ++j) {
      std::swap(features_[j], features_[j + rng_.below(features_.size() - j)]);
    }
    candidates_.assign(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(mtry_));
    std::sort(candidates_.begin(), candidates_.end());

    SplitSweep sweep(n_neg, n_pos, min_leaf_);
    for (std::size_t f : candidates_) scan(sweep, f, begin, end);
    if (!sweep.found()) return id;

    const std::size_t f = sweep.feature();
    const double threshold = sweep.threshold();
    const auto col = data_.column(f);
    const auto mid = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                    rows_.begin() + static_cast<std::ptrdiff_t>(end),
                                    [&](std::uint32_t r) { return col[r] <= threshold; });
    const auto split = static_cast<std::size_t>(mid - rows_.begin());
    const std::uint64_t ln = sweep.left_neg();
    const std::uint64_t lp = sweep.left_pos();

    const double decrease = weighted_decrease(n_neg, n_pos, ln, lp);
    const auto left = grow(begin, split, depth + 1, ln, lp);
    const auto right = grow(split, end, depth + 1, n_neg - ln, n_pos - lp);
    auto& self = tree_.nodes[id];
    self.feature = static_cast<std::int32_t>(f);
    self.threshold = threshold;
    self.left = left;
    self.right = right;
    self.impurity_decrease = decrease;
    return id;
  }

  void scan(SplitSweep& sweep, std::size_t f, std::size_t begin, std::size_t end) {
    const auto& rank = index_.ranks[f];
    const auto& vals = index_.values[f];
    const std::size_t m = end - begin;
    sweep.begin_feature(f);
    if (vals.size() <= 8 * m) {
      std::fill_n(hist_neg_.begin(), vals.size(), 0u);
      std::fill_n(hist_pos_.begin(), vals.size(), 0u);
      for (std::size_t k = begin; k < end; ++k) {
        const auto r = rows_[k];
        (data_.label(r) ? hist_pos_ : hist_neg_)[rank[r]] += weight_[r];
      }
      for (std::size_t v = 0; v < vals.size(); ++v) {
        if (hist_neg_[v] | hist_pos_[v]) sweep.add(vals[v], hist_neg_[v], hist_pos_[v]);
      }
      return;
    }
    keys_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const auto r = rows_[begin + k];
      keys_[k] = (static_cast<std::uint64_t>(rank[r]) << 32) | r;
    }
    std::sort(keys_.begin(), keys_.end());
    for (std::size_t k = 0; k < m;) {
      const auto rk = static_cast<std::uint32_t>(keys_[k] >> 32);
      std::uint64_t neg = 0;
      std::uint64_t pos = 0;
      for (; k < m && static_cast<std::uint32_t>(keys_[k] >> 32) == rk; ++k) {
        const auto r = static_cast<std::uint32_t>(keys_[k]);
        (data_.label(r) ? pos : neg) += weight_[r];
      }
      sweep.add(vals[rk], neg, pos);
    }
  }

  const Dataset& data_;
  const FeatureIndex& index_;
  const ForestConfig& config_;
  Rng rng_;
  std::size_t mtry_;
  std::size_t min_leaf_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> candidates_;
  std::vector<std::uint32_t> weight_;
  std::vector<std::uint32_t> rows_;
  std::vector<std::uint32_t> hist_neg_;
  std::vector<std::uint32_t> hist_pos_;
  std::vector<std::uint64_t> keys_;
  Tree tree_;
};

}  // namespace

Tree train_tree(const Dataset& data, const FeatureIndex& index, const ForestConfig& config,
                std::uint64_t tree_seed) {
  return TreeBuilder(data, index, config, tree_seed).build();
}

}  // namespace detail

Tree train_tree(const Dataset& data, const ForestConfig& config, std::uint64_t tree_seed) {
  if (data.features() == 0) throw std::invalid_argument("tree: no features");
  const detail::FeatureIndex index(data);
  return detail::train_tree(data, index, config, tree_seed);
}

}  // namespace strokeforest
