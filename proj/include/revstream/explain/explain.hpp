#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revstream/feature_vector.hpp"
#include "revstream/label.hpp"
#include "revstream/tree.hpp"

namespace revstream {

class NgramVocabulary;

enum class NgramBlock { kNone, kInserted, kDeleted };

/// Names of the model's input columns.
class FeatureSchema {
 public:
  /// Generic names feature0, feature1, ...
  explicit FeatureSchema(std::size_t dimension);
  /// Dense display names followed by the inserted and deleted n-gram blocks.
  static FeatureSchema for_profiles(const NgramVocabulary& vocab);

  std::size_t dimension() const { return names_.size(); }
  const std::string& name(std::size_t column) const { return names_.at(column); }
  NgramBlock block(std::size_t column) const { return blocks_.at(column); }
  /// The n-gram text of a block column; empty otherwise.
  const std::string& token(std::size_t column) const { return tokens_.at(column); }

 private:
  FeatureSchema() = default;

  std::vector<std::string> names_;
  std::vector<NgramBlock> blocks_;
  std::vector<std::string> tokens_;
};

enum class Comparison { kLess, kGreater };

/// One step of a root-to-leaf path. kLess means x < threshold, kGreater
/// means x >= threshold (displayed as ">").
struct Predicate {
  std::size_t feature = 0;
  std::string name;
  Comparison op = Comparison::kLess;
  double threshold = 0.0;
  NgramBlock block = NgramBlock::kNone;
  std::string token;

  /// A presence test on an n-gram count: the threshold lies in (0, 1].
  bool is_containment() const {
    return block != NgramBlock::kNone && threshold > 0.0 && threshold <= 1.0;
  }
};

struct Explanation {
  std::string sample_id;
  std::vector<Predicate> predicates;
  Label predicted = Label::kNonRevert;
  std::size_t tree_id = 0;
  /// Visited node indices, root first, leaf last.
  std::vector<std::size_t> nodes;
  /// Gini of each visited node.
  std::vector<double> ginis;
};

/// Throws InvalidArgument when x or the schema does not match the tree's
/// feature space.
Explanation decision_path(const DecisionTree& tree, const FeatureVector& x,
                          const FeatureSchema& schema, const std::string& sample_id,
                          std::size_t tree_id = 0);

/// Among the trees whose own prediction equals the majority vote (ties go
/// to non-revert), the path with the fewest predicates; equal lengths go to
/// the lowest tree id. Trees whose reached leaf is empty abstain. Throws
/// InvalidArgument when every tree abstains.
Explanation shortest_ensemble_path(std::span<const DecisionTree> trees, const FeatureVector& x,
                                   const FeatureSchema& schema, const std::string& sample_id);

/// Header line, one indented line per fact, then the predicted class.
/// Thresholds are printed with two decimals.
std::string render_nl(const Explanation& explanation);

/// Graphviz digraph; revert leaves are green, non-revert leaves yellow, and
/// edges on the highlighted path are bold.
std::string export_dot(const DecisionTree& tree, const FeatureSchema& schema,
                       const Explanation* highlight = nullptr);

/// True when following the predicates from the root of `tree` reproduces
/// the recorded nodes and class, and every predicate holds for x.
bool is_faithful(const Explanation& explanation, const DecisionTree& tree, const FeatureVector& x);

}  // namespace revstream
