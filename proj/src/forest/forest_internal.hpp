#pragma once

#include <cstdint>
#include <vector>

#include "strokeforest/forest.hpp"
#include "strokeforest/parallel.hpp"

namespace strokeforest::detail {

/// Per-feature dense ranks of every row and the sorted distinct values.
struct FeatureIndex {
  explicit FeatureIndex(const Dataset& data);

  std::vector<std::vector<std::uint32_t>> ranks;
  std::vector<std::vector<double>> values;
  std::size_t max_distinct = 0;
};

Tree train_tree(const Dataset& data, const FeatureIndex& index, const ForestConfig& config,
                std::uint64_t tree_seed);

}  // namespace strokeforest::detail
