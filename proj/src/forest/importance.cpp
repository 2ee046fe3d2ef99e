#include <algorithm>
#include <stdexcept>

#include "strokeforest/forest.hpp"
#include "strokeforest/rng.hpp"

namespace strokeforest {

std::vector<double> gini_importance(const Forest& forest) {
  std::vector<double> imp(forest.feature_names.size(), 0.0);
  if (forest.trees.empty()) return imp;
  for (const auto& tree : forest.trees) {
    const double root = tree.nodes.front().n_node();
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      imp[static_cast<std::size_t>(node.feature)] += node.n_node() / root * node.impurity_decrease;
    }
  }
  for (double& v : imp) v /= static_cast<double>(forest.trees.size());
  return imp;
}

namespace {

// Leaf vote for `row`, reading `feature` from `donor` instead.
double vote_with(const Tree& tree, const Dataset& data, std::size_t row, std::size_t feature,
                 std::size_t donor) {
  std::size_t i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const auto& n = tree.nodes[i];
    const auto f = static_cast<std::size_t>(n.feature);
    const double v = data.at(f == feature ? donor : row, f);
    i = v <= n.threshold ? n.left : n.right;
  }
  return tree.nodes[i].vote();
}

bool correct(double vote, std::uint8_t label) { return (vote >= 0.5) == (label != 0); }

}  // namespace

std::vector<double> permutation_importance(const Forest& forest, const Dataset& data,
                                           std::uint64_t seed) {
  const std::size_t p = forest.feature_names.size();
  if (data.features() != p) throw std::invalid_argument("importance: feature count mismatch");
  std::vector<double> imp(p, 0.0);
  std::size_t trees_with_oob = 0;
  std::vector<std::uint32_t> perm;
  // Bit f of path_mask[k]: row k's path tests feature f. Beyond 64 features
  // every row is re-evaluated.
  std::vector<std::uint64_t> path_mask;
  std::vector<std::uint8_t> base_hit;
  std::vector<bool> used(p);
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const auto& tree = forest.trees[t];
    if (tree.oob.empty()) continue;
    ++trees_with_oob;
    std::fill(used.begin(), used.end(), false);
    for (const auto& n : tree.nodes) {
      if (!n.is_leaf()) used[static_cast<std::size_t>(n.feature)] = true;
    }
    const std::size_t n_oob = tree.oob.size();
    path_mask.assign(n_oob, p > 64 ? ~std::uint64_t{0} : 0);
    base_hit.assign(n_oob, 0);
    std::size_t base = 0;
    for (std::size_t k = 0; k < n_oob; ++k) {
      const auto r = tree.oob[k];
      std::size_t i = 0;
      while (!tree.nodes[i].is_leaf()) {
        const auto& n = tree.nodes[i];
        const auto f = static_cast<std::size_t>(n.feature);
        if (p <= 64) path_mask[k] |= std::uint64_t{1} << f;
        i = data.at(r, f) <= n.threshold ? n.left : n.right;
      }
      base_hit[k] = correct(tree.nodes[i].vote(), data.label(r));
      base += base_hit[k];
    }
    const std::uint64_t tree_seed = derive_seed(seed, t);
    for (std::size_t f = 0; f < p; ++f) {
      if (!used[f]) continue;
      perm.assign(tree.oob.begin(), tree.oob.end());
      Rng rng(derive_seed(tree_seed, f));
      rng.shuffle(std::span(perm));
      // Rows whose path never tests f keep their prediction.
      std::size_t hits = base;
      for (std::size_t k = 0; k < n_oob; ++k) {
        if (!(path_mask[k] >> (f & 63) & 1)) continue;
        const auto r = tree.oob[k];
        hits -= base_hit[k];
        hits += correct(vote_with(tree, data, r, f, perm[k]), data.label(r));
      }
      imp[f] += (static_cast<double>(base) - static_cast<double>(hits)) / static_cast<double>(n_oob);
    }
  }
  if (trees_with_oob == 0) throw std::invalid_argument("importance: no tree has out-of-bag rows");
  for (double& v : imp) v /= static_cast<double>(trees_with_oob);
  return imp;
}

}  // namespace strokeforest
