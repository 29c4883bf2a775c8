#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "revstream/feature_vector.hpp"
#include "revstream/label.hpp"

namespace revstream {

/// Incremental classifier. Predictions are empty (an abstention) until the
/// model has learned something.
class StreamModel {
 public:
  virtual ~StreamModel() = default;

  virtual std::string kind() const = 0;
  virtual void learn(const FeatureVector& x, Label y, double weight = 1.0) = 0;
  /// Sums to one when present.
  virtual std::optional<ClassDistribution> predict_proba(const FeatureVector& x) const = 0;
  /// argmax of predict_proba; ties go to non-revert.
  virtual std::optional<Label> predict(const FeatureVector& x) const {
    const auto p = predict_proba(x);
    if (!p) return std::nullopt;
    return argmax(*p);
  }

  virtual nlohmann::json checkpoint() const = 0;
};

/// Rebuilds a model from StreamModel::checkpoint(). Throws DataError on an
/// unknown kind or malformed content.
std::unique_ptr<StreamModel> load_checkpoint(const nlohmann::json& j);

}  // namespace revstream
