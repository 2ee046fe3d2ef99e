#include <stdexcept>

#include "strokeforest/forest.hpp"

namespace strokeforest {

namespace {

constexpr int kForestSchemaVersion = 1;

nlohmann::json node_json(const Forest& forest, const Tree& tree, std::size_t i) {
  const auto& n = tree.nodes[i];
  nlohmann::json j;
  j["counts"] = {n.n_neg, n.n_pos};
  if (n.is_leaf()) return j;
  j["feature"] = forest.feature_names[static_cast<std::size_t>(n.feature)];
  j["threshold"] = n.threshold;
  j["impurity_decrease"] = n.impurity_decrease;
  j["n_node"] = n.n_node();
  j["left"] = node_json(forest, tree, n.left);
  j["right"] = node_json(forest, tree, n.right);
  return j;
}

std::uint32_t read_node(const Forest& forest, const nlohmann::json& j, Tree& tree) {
  const auto id = static_cast<std::uint32_t>(tree.nodes.size());
  TreeNode node;
  const auto& counts = j.at("counts");
  node.n_neg = counts.at(0).get<std::uint32_t>();
  node.n_pos = counts.at(1).get<std::uint32_t>();
  tree.nodes.push_back(node);
  if (!j.contains("feature")) return id;
  const auto f = forest.feature_index(j.at("feature").get<std::string>());
  const double threshold = j.at("threshold").get<double>();
  const double decrease = j.at("impurity_decrease").get<double>();
  const auto left = read_node(forest, j.at("left"), tree);
  const auto right = read_node(forest, j.at("right"), tree);
  auto& self = tree.nodes[id];
  self.feature = static_cast<std::int32_t>(f);
  self.threshold = threshold;
  self.impurity_decrease = decrease;
  self.left = left;
  self.right = right;
  return id;
}

}  // namespace

nlohmann::json to_json(const Forest& forest) {
  const auto& c = forest.config;
  nlohmann::json doc;
  doc["schema_version"] = kForestSchemaVersion;
  doc["kind"] = "forest";
  doc["feature_names"] = forest.feature_names;
  doc["config"] = {{"n_trees", c.n_trees},
                   {"mtry", c.mtry},
                   {"min_leaf", c.min_leaf},
                   {"max_depth", c.max_depth ? nlohmann::json(*c.max_depth) : nlohmann::json()},
                   {"bootstrap", c.bootstrap},
                   {"bootstrap_fraction", c.bootstrap_fraction},
                   {"seed", c.seed}};
  auto& trees = doc["trees"] = nlohmann::json::array();
  for (const auto& tree : forest.trees) {
    trees.push_back({{"oob", tree.oob}, {"root", node_json(forest, tree, 0)}});
  }
  return doc;
}

Forest forest_from_json(const nlohmann::json& doc) {
  if (doc.value("kind", "") != "forest") throw std::invalid_argument("forest JSON: kind must be \"forest\"");
  if (doc.value("schema_version", 0) != kForestSchemaVersion) {
    throw std::invalid_argument("forest JSON: unsupported schema_version");
  }
  Forest forest;
  forest.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  const auto& c = doc.at("config");
  forest.config.n_trees = c.at("n_trees").get<std::size_t>();
  forest.config.mtry = c.at("mtry").get<std::size_t>();
  forest.config.min_leaf = c.at("min_leaf").get<std::size_t>();
  if (!c.at("max_depth").is_null()) forest.config.max_depth = c.at("max_depth").get<std::size_t>();
  forest.config.bootstrap = c.at("bootstrap").get<bool>();
  forest.config.bootstrap_fraction = c.at("bootstrap_fraction").get<double>();
  forest.config.seed = c.at("seed").get<std::uint64_t>();
  for (const auto& t : doc.at("trees")) {
    Tree tree;
    tree.oob = t.at("oob").get<std::vector<std::uint32_t>>();
    read_node(forest, t.at("root"), tree);
    forest.trees.push_back(std::move(tree));
  }
  if (forest.trees.size() != forest.config.n_trees) {
    throw std::invalid_argument("forest JSON: tree count does not match config.n_trees");
  }
  return forest;
}

}  // namespace strokeforest
