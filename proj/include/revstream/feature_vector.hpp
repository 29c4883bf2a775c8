#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace revstream {

/// A dense prefix followed by a sparse tail.
///
/// Indices of `sparse` are global column indices, all >= dense.size() and
/// < dimension, strictly increasing. Absent sparse columns are zero.
struct FeatureVector {
  std::vector<double> dense;
  std::vector<std::pair<std::uint32_t, double>> sparse;
  std::size_t dimension = 0;

  static FeatureVector from_dense(std::span<const double> values) {
    FeatureVector v;
    v.dense.assign(values.begin(), values.end());
    v.dimension = values.size();
    return v;
  }

  double value(std::size_t column) const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

}  // namespace revstream
