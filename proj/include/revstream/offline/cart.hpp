#pragma once

#include <cstddef>
#include <span>

#include "revstream/offline/dataset.hpp"
#include "revstream/random.hpp"
#include "revstream/tree.hpp"

namespace revstream {

struct CartParams {
  std::size_t max_depth = 0;  // 0: unlimited
  std::size_t min_samples_split = 2;
  /// Candidate features per split; 0 considers all of them.
  std::size_t max_features = 0;
};

/// Greedy gini CART. Thresholds are midpoints between consecutive distinct
/// values; equal gains go to the lowest feature index, then the lowest
/// threshold. Throws InvalidArgument on an empty dataset.
DecisionTree train_cart(const Dataset& data, const CartParams& params = {});

/// Trains on a multiset of row indices (bootstrap samples repeat rows).
/// `rng` is consulted only when params.max_features subsamples features.
DecisionTree train_cart(const Dataset& data, std::span<const std::size_t> rows,
                        const CartParams& params, Rng* rng);

/// Weighted impurity decrease n·g − n_l·g_l − n_r·g_r of an internal node.
double impurity_decrease(const DecisionTree& tree, std::size_t node);

}  // namespace revstream
