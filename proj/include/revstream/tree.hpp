#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "revstream/feature_vector.hpp"
#include "revstream/label.hpp"

namespace revstream {

/// One node of a binary decision tree. A sample goes left when
/// x[feature] < threshold.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  ClassDistribution class_counts{};
  double gini = 0.0;

  bool is_leaf() const { return feature < 0; }
  Label predicted_class() const { return argmax(class_counts); }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Flat tree used by the batch learners and as the read-only snapshot of a
/// Hoeffding tree. nodes[0] is the root.
class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }
  std::size_t n_features() const { return n_features_; }
  bool empty() const { return nodes_.empty(); }

  std::size_t leaf_for(const FeatureVector& x) const;
  std::size_t leaf_for(std::span<const double> row) const;
  Label predict(const FeatureVector& x) const { return node(leaf_for(x)).predicted_class(); }
  Label predict(std::span<const double> row) const {
    return node(leaf_for(row)).predicted_class();
  }

  /// Longest root-to-leaf edge count.
  std::size_t depth() const;
  std::size_t leaf_count() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  template <class Lookup>
  std::size_t descend(Lookup&& value) const;

  std::vector<TreeNode> nodes_;
  std::size_t n_features_ = 0;
};

}  // namespace revstream
