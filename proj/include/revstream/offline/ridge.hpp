#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "revstream/offline/dataset.hpp"

namespace revstream {

/// Least squares on ±1 targets with an L2 penalty on the weights only.
struct RidgeModel {
  std::vector<double> weights;
  double intercept = 0.0;
  double alpha = 1.0;

  double decision(std::span<const double> row) const;
  /// Revert iff the decision value is positive.
  Label predict(std::span<const double> row) const;

  nlohmann::json to_json() const;
  static RidgeModel from_json(const nlohmann::json& j);
};

/// Throws InvalidArgument for alpha <= 0, an empty dataset, or a single
/// observed class; DataError if the system stays singular.
RidgeModel train_ridge(const Dataset& data, double alpha = 1.0);

}  // namespace revstream
