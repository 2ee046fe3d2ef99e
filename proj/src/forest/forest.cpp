#include <algorithm>
#include <stdexcept>

#include "forest_internal.hpp"
#include "strokeforest/rng.hpp"

namespace strokeforest {

Dataset::Dataset(std::vector<std::string> feature_names, std::size_t n_rows,
                 std::vector<double> values, std::vector<std::uint8_t> labels)
    : names_(std::move(feature_names)), n_rows_(n_rows), values_(std::move(values)),
      labels_(std::move(labels)) {
  if (values_.size() != names_.size() * n_rows_) throw std::invalid_argument("dataset: shape mismatch");
  if (labels_.size() != n_rows_) throw std::invalid_argument("dataset: label count mismatch");
}

Dataset Dataset::from_cohort(const Cohort& cohort, std::span<const std::size_t> features,
                             std::span<const std::uint8_t> labels) {
  const auto& cb = *cohort.codebook;
  const std::size_t n = cohort.size();
  if (labels.size() != n) throw std::invalid_argument("dataset: label count mismatch");
  std::vector<std::string> names;
  std::vector<double> values(features.size() * n);
  for (std::size_t j = 0; j < features.size(); ++j) {
    const std::size_t f = features[j];
    names.push_back(cb[f].name);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = cohort.records[i].values[f];
      if (!v) {
        throw std::invalid_argument("dataset: missing value for " + cb[f].name + " in row " +
                                    std::to_string(i) + " (impute first)");
      }
      values[j * n + i] = *v;
    }
  }
  return Dataset(std::move(names), n, std::move(values),
                 std::vector<std::uint8_t>(labels.begin(), labels.end()));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<double> values(names_.size() * rows.size());
  std::vector<std::uint8_t> labels(rows.size());
  for (std::size_t f = 0; f < names_.size(); ++f) {
    for (std::size_t i = 0; i < rows.size(); ++i) values[f * rows.size() + i] = at(rows[i], f);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = labels_[rows[i]];
  return Dataset(names_, rows.size(), std::move(values), std::move(labels));
}

std::size_t Forest::feature_index(std::string_view name) const {
  const auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) {
    throw std::invalid_argument("forest: unknown feature '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - feature_names.begin());
}

Forest train_forest(const Dataset& data, const ForestConfig& config, std::size_t workers) {
  if (config.n_trees == 0) throw std::invalid_argument("forest: n_trees must be >= 1");
  if (config.min_leaf == 0) throw std::invalid_argument("forest: min_leaf must be >= 1");
  if (data.rows() < 2) throw std::invalid_argument("forest: need at least 2 training rows");
  if (config.mtry > data.features()) throw std::invalid_argument("forest: mtry exceeds feature count");
  if (!(config.bootstrap_fraction > 0.0)) {
    throw std::invalid_argument("forest: bootstrap_fraction must be positive");
  }
  const detail::FeatureIndex index(data);
  Forest forest;
  forest.config = config;
  forest.feature_names = data.feature_names();
  forest.trees.resize(config.n_trees);
  parallel_for(config.n_trees, workers, [&](std::size_t t) {
    forest.trees[t] = detail::train_tree(data, index, config, derive_seed(config.seed, t));
  });
  return forest;
}

double predict_proba(const Forest& forest, std::span<const double> x, std::size_t n_trees) {
  if (x.size() != forest.feature_names.size()) throw std::invalid_argument("predict: feature count mismatch");
  const std::size_t m = n_trees == 0 ? forest.trees.size() : std::min(n_trees, forest.trees.size());
  if (m == 0) throw std::invalid_argument("predict: empty forest");
  double votes = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const auto& tree = forest.trees[t];
    votes += tree.nodes[tree.leaf_index(x)].vote();
  }
  return votes / static_cast<double>(m);
}

std::vector<double> predict_proba(const Forest& forest, const Dataset& data, std::size_t n_trees) {
  if (data.features() != forest.feature_names.size()) {
    throw std::invalid_argument("predict: feature count mismatch");
  }
  const std::size_t m = n_trees == 0 ? forest.trees.size() : std::min(n_trees, forest.trees.size());
  if (m == 0) throw std::invalid_argument("predict: empty forest");
  std::vector<double> p(data.rows(), 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    const auto& tree = forest.trees[t];
    for (std::size_t i = 0; i < data.rows(); ++i) p[i] += tree.nodes[tree.leaf_index(data, i)].vote();
  }
  for (double& v : p) v /= static_cast<double>(m);
  return p;
}

double predict_proba(const Forest& forest,
                     std::span<const std::pair<std::string, double>> record) {
  std::vector<double> x(forest.feature_names.size());
  std::vector<bool> seen(x.size(), false);
  for (const auto& [name, value] : record) {
    const auto f = forest.feature_index(name);
    x[f] = value;
    seen[f] = true;
  }
  for (std::size_t f = 0; f < x.size(); ++f) {
    if (!seen[f]) throw std::invalid_argument("predict: record lacks feature " + forest.feature_names[f]);
  }
  return predict_proba(forest, x);
}

std::vector<double> tree_votes(const Forest& forest, const Dataset& data) {
  if (data.features() != forest.feature_names.size()) {
    throw std::invalid_argument("predict: feature count mismatch");
  }
  const std::size_t n = data.rows();
  std::vector<double> votes(forest.trees.size() * n);
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const auto& tree = forest.trees[t];
    for (std::size_t i = 0; i < n; ++i) votes[t * n + i] = tree.nodes[tree.leaf_index(data, i)].vote();
  }
  return votes;
}

}  // namespace strokeforest
