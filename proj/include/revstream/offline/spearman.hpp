#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace revstream {

struct SpearmanResult {
  double coefficient = 0.0;
  std::size_t n = 0;
};

/// Fractional ranks starting at 1; tied values share their mean rank.
std::vector<double> mean_ranks(std::span<const double> values);

/// Rank correlation: the product-moment formula
///   (n Σxy − Σx Σy) / (sqrt(n Σx² − (Σx)²) sqrt(n Σy² − (Σy)²))
/// evaluated on mean ranks. Throws InvalidArgument on a length mismatch,
/// fewer than two samples, or a constant input.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

}  // namespace revstream
