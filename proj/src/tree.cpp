#include "revstream/tree.hpp"

#include <algorithm>
#include <functional>

#include "revstream/error.hpp"

namespace revstream {

double FeatureVector::value(std::size_t column) const {
  if (column < dense.size()) return dense[column];
  const auto it = std::lower_bound(
      sparse.begin(), sparse.end(), column,
      [](const std::pair<std::uint32_t, double>& e, std::size_t c) { return e.first < c; });
  return (it != sparse.end() && it->first == column) ? it->second : 0.0;
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features)
    : nodes_(std::move(nodes)), n_features_(n_features) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) continue;
    const auto count = static_cast<int>(nodes_.size());
    if (n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) || n.left >= count ||
        n.right >= count || static_cast<std::size_t>(n.feature) >= n_features_) {
      throw DataError("malformed decision tree at node " + std::to_string(i));
    }
  }
}

template <class Lookup>
std::size_t DecisionTree::descend(Lookup&& value) const {
  if (nodes_.empty()) throw InvalidArgument("empty decision tree");
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(value(static_cast<std::size_t>(n.feature)) < n.threshold
                                     ? n.left
                                     : n.right);
  }
  return i;
}

std::size_t DecisionTree::leaf_for(const FeatureVector& x) const {
  if (x.dimension != n_features_) throw InvalidArgument("feature-space mismatch");
  return descend([&](std::size_t f) { return x.value(f); });
}

std::size_t DecisionTree::leaf_for(std::span<const double> row) const {
  if (row.size() != n_features_) throw InvalidArgument("feature-space mismatch");
  return descend([&](std::size_t f) { return row[f]; });
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::function<std::size_t(std::size_t)> rec = [&](std::size_t i) -> std::size_t {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(rec(static_cast<std::size_t>(n.left)), rec(static_cast<std::size_t>(n.right)));
  };
  return rec(0);
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

nlohmann::json DecisionTree::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nlohmann::json jn{{"counts", n.class_counts}, {"gini", n.gini}};
    if (!n.is_leaf()) {
      jn["feature"] = n.feature;
      jn["threshold"] = n.threshold;
      jn["left"] = n.left;
      jn["right"] = n.right;
    }
    arr.push_back(std::move(jn));
  }
  return {{"n_features", n_features_}, {"nodes", std::move(arr)}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
  try {
    std::vector<TreeNode> nodes;
    for (const auto& jn : j.at("nodes")) {
      TreeNode n;
      n.class_counts = jn.at("counts").get<ClassDistribution>();
      n.gini = jn.at("gini").get<double>();
      if (jn.contains("feature")) {
        n.feature = jn.at("feature").get<int>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
      }
      nodes.push_back(n);
    }
    return DecisionTree(std::move(nodes), j.at("n_features").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed tree: ") + e.what());
  }
}

}  // namespace revstream
