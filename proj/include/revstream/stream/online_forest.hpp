#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "revstream/random.hpp"
#include "revstream/stream/hoeffding_tree.hpp"

namespace revstream {

struct OnlineForestConfig {
  std::size_t n_trees = 10;
  double poisson_lambda = 6.0;
  std::uint64_t seed = 0;
  /// Every member sees every sample once; turns the ensemble into plain
  /// copies of one tree.
  bool unit_weights = false;
  HoeffdingConfig tree;

  void validate() const;
};

/// Online bagging over Hoeffding trees: each member receives each sample
/// with a Poisson(λ) weight from its own generator.
class OnlineForest : public StreamModel {
 public:
  explicit OnlineForest(OnlineForestConfig config = {});

  std::string kind() const override { return "arf"; }
  void learn(const FeatureVector& x, Label y, double weight = 1.0) override;
  /// Vote shares of the members that do not abstain.
  std::optional<ClassDistribution> predict_proba(const FeatureVector& x) const override;
  std::optional<ClassDistribution> votes(const FeatureVector& x) const;

  const OnlineForestConfig& config() const { return config_; }
  const std::vector<HoeffdingTree>& members() const { return members_; }

  nlohmann::json checkpoint() const override;
  static OnlineForest from_checkpoint(const nlohmann::json& j);

 private:
  OnlineForestConfig config_;
  std::vector<HoeffdingTree> members_;
  std::vector<Rng> rngs_;
};

}  // namespace revstream
