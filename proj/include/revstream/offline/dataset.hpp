#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "revstream/label.hpp"

namespace revstream {

/// Row-major dense matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  void append_row(std::span<const double> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Dataset {
  FeatureMatrix features;
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t n_features() const { return features.cols(); }

  /// Rows at the given positions, in that order.
  Dataset subset(std::span<const std::size_t> rows) const;
  std::array<std::size_t, kNumClasses> class_counts() const;
};

}  // namespace revstream
