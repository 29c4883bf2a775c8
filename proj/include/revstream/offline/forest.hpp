#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "revstream/offline/dataset.hpp"
#include "revstream/tree.hpp"

namespace revstream {

struct ForestParams {
  std::size_t n_estimators = 500;
  std::uint64_t seed = 0;
  bool bootstrap = true;
  /// Features tried per split; 0 means floor(sqrt(d)), at least 1.
  std::size_t max_features = 0;
  std::size_t max_depth = 0;
  std::size_t min_samples_split = 2;
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend
  /// on it.
  std::size_t n_jobs = 0;
};

class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(std::vector<DecisionTree> trees, ForestParams params,
               std::vector<std::vector<std::uint32_t>> in_bag_counts);

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }
  std::size_t n_features() const { return trees_.empty() ? 0 : trees_.front().n_features(); }

  ClassDistribution votes(std::span<const double> row) const;
  ClassDistribution votes(const FeatureVector& x) const;
  /// Majority vote; ties go to non-revert.
  Label predict(std::span<const double> row) const { return argmax(votes(row)); }
  Label predict(const FeatureVector& x) const { return argmax(votes(x)); }

  /// Times each training row was drawn for each tree (empty when unknown).
  const std::vector<std::vector<std::uint32_t>>& in_bag_counts() const { return in_bag_; }

  nlohmann::json to_json() const;
  static ForestModel from_json(const nlohmann::json& j);

 private:
  std::vector<DecisionTree> trees_;
  ForestParams params_;
  std::vector<std::vector<std::uint32_t>> in_bag_;
};

ForestModel train_forest(const Dataset& data, const ForestParams& params = {});

/// Accuracy of out-of-bag majority votes over the rows that are out of bag
/// for at least one tree. Requires bootstrap training on `data`.
double oob_accuracy(const ForestModel& forest, const Dataset& data);

struct FeatureImportance {
  std::vector<double> values;
  /// Set when no tree contains a split; values are then all zero.
  bool all_zero = false;
};

/// Mean decrease in gini impurity, averaged over trees and normalised to
/// sum to one.
FeatureImportance feature_importance(const ForestModel& forest);
FeatureImportance feature_importance(std::span<const DecisionTree> trees, std::size_t n_features);

/// Keeps feature i iff importance[i] >= threshold; the default threshold is
/// the mean importance.
std::vector<bool> select_features(std::span<const double> importances,
                                  std::optional<double> threshold = std::nullopt);

}  // namespace revstream
