#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "revstream/stream/model.hpp"
#include "revstream/tree.hpp"

namespace revstream {

struct HoeffdingConfig {
  double grace_period = 200.0;  // n_min, in sample weight
  double split_confidence = 1e-7;
  double tie_threshold = 0.05;

  void validate() const;
};

/// sqrt(R² ln(1/δ) / (2n)).
double hoeffding_bound(double range, double delta, double n);

/// Weighted Gaussian summary of one feature for one class.
struct GaussianEstimator {
  double weight = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void add(double x, double w);
  double variance() const { return weight > 0.0 ? m2 / weight : 0.0; }
  /// Estimated weight of observations strictly below t.
  double weight_below(double t) const;

  friend bool operator==(const GaussianEstimator&, const GaussianEstimator&) = default;
};

/// VFDT with gini merit and Gaussian per-class summaries at the leaves. A
/// leaf is checked every `grace_period` weight; the candidate threshold for
/// a feature is the midpoint of the two class means.
class HoeffdingTree : public StreamModel {
 public:
  explicit HoeffdingTree(HoeffdingConfig config = {});

  std::string kind() const override { return "ht"; }
  void learn(const FeatureVector& x, Label y, double weight = 1.0) override;
  std::optional<ClassDistribution> predict_proba(const FeatureVector& x) const override;

  const HoeffdingConfig& config() const { return config_; }
  bool trained() const { return trained_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t split_count() const;
  /// Feature tested at the root, or -1 while the root is a leaf.
  int root_feature() const { return nodes_.front().feature; }

  /// Flat copy for explanation and export. Leaf counts are the distribution
  /// used for prediction; internal counts sum their subtree.
  DecisionTree snapshot() const;

  nlohmann::json checkpoint() const override;
  static HoeffdingTree from_checkpoint(const nlohmann::json& j);

 private:
  struct LeafStats {
    std::array<std::vector<GaussianEstimator>, kNumClasses> dense;
    std::array<std::map<std::uint32_t, GaussianEstimator>, kNumClasses> sparse;
    ClassDistribution observed{};
    double weight_at_last_check = 0.0;
  };

  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int parent = -1;
    ClassDistribution class_weights{};
    LeafStats stats;

    bool is_leaf() const { return feature < 0; }
  };

  std::size_t leaf_for(const FeatureVector& x) const;
  /// The leaf's own distribution, or its nearest non-empty ancestor's.
  ClassDistribution effective_distribution(std::size_t node) const;
  void attempt_split(std::size_t leaf);
  GaussianEstimator feature_estimator(const LeafStats& stats, std::size_t cls,
                                      std::size_t feature) const;

  HoeffdingConfig config_;
  std::vector<Node> nodes_;
  std::size_t dense_width_ = 0;
  std::size_t dimension_ = 0;
  bool trained_ = false;
};

}  // namespace revstream
