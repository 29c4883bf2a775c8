#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "revstream/stream/model.hpp"

namespace revstream {

/// Weighted Welford moments.
struct WelfordMoments {
  double weight = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x, double w = 1.0) {
    const double total = weight + w;
    const double delta = x - mean;
    mean += delta * w / total;
    m2 += w * delta * (x - mean);
    weight = total;
  }
  /// Population variance.
  double variance() const { return weight > 0.0 ? m2 / weight : 0.0; }

  friend bool operator==(const WelfordMoments&, const WelfordMoments&) = default;
};

/// Gaussian likelihood over the dense block, Laplace-smoothed multinomial
/// over the sparse block, both updated one sample at a time.
class IncrementalNaiveBayes : public StreamModel {
 public:
  static constexpr double kVarianceFloor = 1e-9;
  static constexpr double kSmoothing = 1.0;

  std::string kind() const override { return "nb"; }
  void learn(const FeatureVector& x, Label y, double weight = 1.0) override;
  std::optional<ClassDistribution> predict_proba(const FeatureVector& x) const override;
  std::optional<Label> predict(const FeatureVector& x) const override;
  std::optional<ClassDistribution> joint_log_likelihood(const FeatureVector& x) const;

  nlohmann::json checkpoint() const override;
  static IncrementalNaiveBayes from_checkpoint(const nlohmann::json& j);

 private:
  struct ClassStats {
    double weight = 0.0;
    std::vector<WelfordMoments> dense;
    std::map<std::uint32_t, double> sparse;  // keyed by sparse offset
    double sparse_total = 0.0;
  };

  double total_weight_ = 0.0;
  std::size_t dense_width_ = 0;
  std::size_t sparse_width_ = 0;
  std::array<ClassStats, kNumClasses> classes_;
};

}  // namespace revstream
