#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "revstream/feature_vector.hpp"
#include "revstream/label.hpp"
#include "revstream/offline/dataset.hpp"

namespace revstream {

/// Gaussian likelihood on the dense block plus a Laplace-smoothed
/// multinomial on the sparse block, fitted in one pass over stored data
/// with two-pass moments.
class BatchNaiveBayes {
 public:
  static constexpr double kVarianceFloor = 1e-9;
  static constexpr double kSmoothing = 1.0;

  void fit(std::span<const FeatureVector> xs, std::span<const Label> ys);
  void fit(const Dataset& data);

  bool fitted() const { return n_total_ > 0; }
  /// Unnormalised log posteriors; classes never observed get -infinity.
  std::optional<ClassDistribution> joint_log_likelihood(const FeatureVector& x) const;
  std::optional<ClassDistribution> predict_proba(const FeatureVector& x) const;
  std::optional<Label> predict(const FeatureVector& x) const;
  std::optional<Label> predict(std::span<const double> row) const {
    return predict(FeatureVector::from_dense(row));
  }

 private:
  std::size_t n_total_ = 0;
  std::size_t dense_width_ = 0;
  std::size_t sparse_width_ = 0;
  std::array<std::size_t, kNumClasses> class_n_{};
  std::array<std::vector<double>, kNumClasses> mean_;
  std::array<std::vector<double>, kNumClasses> var_;
  std::array<std::vector<double>, kNumClasses> sparse_counts_;
  std::array<double, kNumClasses> sparse_total_{};
};

}  // namespace revstream
