#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "strokeforest/dataset.hpp"

namespace strokeforest {

/// Dense numeric training matrix, column-major, with binary labels.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> feature_names, std::size_t n_rows, std::vector<double> values,
          std::vector<std::uint8_t> labels);

  /// Columns `features` of `cohort`; throws on a missing cell.
  static Dataset from_cohort(const Cohort& cohort, std::span<const std::size_t> features,
                             std::span<const std::uint8_t> labels);

  std::size_t rows() const { return n_rows_; }
  std::size_t features() const { return names_.size(); }
  const std::vector<std::string>& feature_names() const { return names_; }
  double at(std::size_t row, std::size_t feature) const { return values_[feature * n_rows_ + row]; }
  std::span<const double> column(std::size_t feature) const {
    return {values_.data() + feature * n_rows_, n_rows_};
  }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  std::uint8_t label(std::size_t row) const { return labels_[row]; }

  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<std::string> names_;
  std::size_t n_rows_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> labels_;
};

struct ForestConfig {
  std::size_t n_trees = 500;
  std::size_t mtry = 0;  // 0 = floor(sqrt(feature count)), at least 1
  std::size_t min_leaf = 1;
  std::optional<std::size_t> max_depth;
  bool bootstrap = true;
  double bootstrap_fraction = 1.0;
  std::uint64_t seed = 0;

  std::size_t resolved_mtry(std::size_t n_features) const;
};

/// Flat pre-order node. Leaves have feature == -1. Counts are bootstrap
/// weighted; rows go left when value <= threshold.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double impurity_decrease = 0.0;  // parent gini - weighted child gini
  std::uint32_t n_neg = 0;
  std::uint32_t n_pos = 0;

  bool is_leaf() const { return feature < 0; }
  std::uint32_t n_node() const { return n_neg + n_pos; }
  /// Leaf vote: 1 positive majority, 0 negative, 0.5 tie.
  double vote() const { return n_pos > n_neg ? 1.0 : (n_pos < n_neg ? 0.0 : 0.5); }
};

struct Tree {
  std::vector<TreeNode> nodes;   // nodes[0] is the root
  std::vector<std::uint32_t> oob;  // training rows left out of the bootstrap

  std::size_t leaf_index(const Dataset& data, std::size_t row) const;
  std::size_t leaf_index(std::span<const double> x) const;
  std::size_t depth() const;
};

struct Forest {
  std::vector<Tree> trees;
  ForestConfig config;
  std::vector<std::string> feature_names;

  std::size_t feature_index(std::string_view name) const;
};

double gini_impurity(std::uint64_t n_neg, std::uint64_t n_pos);

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double decrease = 0.0;
};

/// Best impurity-reducing split of `rows` (duplicates allowed) over the
/// candidate features, or nullopt if none strictly reduces impurity with
/// both children holding at least `min_leaf` rows. Ties prefer the lower
/// feature index, then the lower threshold.
std::optional<Split> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidate_features,
                                std::size_t min_leaf);

/// One tree from its own random stream.
Tree train_tree(const Dataset& data, const ForestConfig& config, std::uint64_t tree_seed);

/// Tree t is seeded by derive_seed(config.seed, t), so the result does not
/// depend on `workers`.
Forest train_forest(const Dataset& data, const ForestConfig& config, std::size_t workers = 1);

/// Fraction of trees voting positive, over the first `n_trees` trees
/// (all when 0).
double predict_proba(const Forest& forest, std::span<const double> x, std::size_t n_trees = 0);
std::vector<double> predict_proba(const Forest& forest, const Dataset& data,
                                  std::size_t n_trees = 0);
/// Record given as (feature name, value) pairs; throws on an unknown or
/// absent feature.
double predict_proba(const Forest& forest,
                     std::span<const std::pair<std::string, double>> record);

/// Per-tree votes, votes[t * rows + i].
std::vector<double> tree_votes(const Forest& forest, const Dataset& data);

/// Mean decrease in impurity: per tree, sum over a feature's splits of
/// (n_node / n_root) * decrease; averaged over trees.
std::vector<double> gini_importance(const Forest& forest);

/// Mean over trees of OOB accuracy minus OOB accuracy with the feature's
/// column permuted among the OOB rows. Trees that never split on a feature
/// contribute exactly 0 for it.
std::vector<double> permutation_importance(const Forest& forest, const Dataset& data,
                                           std::uint64_t seed);

struct TuningConfig {
  std::size_t min_trees = 500;
  std::size_t max_trees = 1000;
  std::size_t step = 100;
  std::size_t inner_folds = 5;
  std::uint64_t seed = 0;
};

struct TuningResult {
  std::size_t best_n_trees = 0;
  std::vector<std::pair<std::size_t, double>> table;  // (n_trees, mean inner AUC)
};

/// Inner stratified CV over the tree-count grid. One forest of max_trees is
/// grown per inner fold and its prefixes scored, which equals training each
/// candidate separately because trees are seeded by index.
TuningResult tune_num_trees(const Dataset& data, const ForestConfig& base,
                            const TuningConfig& tuning, std::size_t workers = 1);

nlohmann::json to_json(const Forest& forest);
Forest forest_from_json(const nlohmann::json& doc);

}  // namespace strokeforest
