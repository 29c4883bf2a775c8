#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "revstream/metrics.hpp"
#include "revstream/offline/batch_naive_bayes.hpp"
#include "revstream/offline/cart.hpp"
#include "revstream/offline/dataset.hpp"
#include "revstream/offline/forest.hpp"
#include "revstream/offline/ridge.hpp"

namespace revstream {

class BatchClassifier {
 public:
  virtual ~BatchClassifier() = default;
  virtual std::string name() const = 0;
  virtual void fit(const Dataset& data) = 0;
  virtual Label predict(std::span<const double> row) const = 0;
};

class CartClassifier : public BatchClassifier {
 public:
  explicit CartClassifier(CartParams params = {}) : params_(params) {}
  std::string name() const override { return "dt"; }
  void fit(const Dataset& data) override { tree_ = train_cart(data, params_); }
  Label predict(std::span<const double> row) const override { return tree_.predict(row); }
  const DecisionTree& tree() const { return tree_; }

 private:
  CartParams params_;
  DecisionTree tree_;
};

class ForestClassifier : public BatchClassifier {
 public:
  explicit ForestClassifier(ForestParams params = {}) : params_(params) {}
  std::string name() const override { return "rf"; }
  void fit(const Dataset& data) override { forest_ = train_forest(data, params_); }
  Label predict(std::span<const double> row) const override { return forest_.predict(row); }
  const ForestModel& forest() const { return forest_; }

 private:
  ForestParams params_;
  ForestModel forest_;
};

class RidgeClassifier : public BatchClassifier {
 public:
  explicit RidgeClassifier(double alpha = 1.0) : alpha_(alpha) {}
  std::string name() const override { return "rc"; }
  void fit(const Dataset& data) override { model_ = train_ridge(data, alpha_); }
  Label predict(std::span<const double> row) const override { return model_.predict(row); }

 private:
  double alpha_;
  RidgeModel model_;
};

class GaussianNbClassifier : public BatchClassifier {
 public:
  std::string name() const override { return "nb"; }
  void fit(const Dataset& data) override { model_.fit(data); }
  Label predict(std::span<const double> row) const override {
    return model_.predict(row).value_or(Label::kNonRevert);
  }

 private:
  BatchNaiveBayes model_;
};

std::unique_ptr<BatchClassifier> make_batch_classifier(const std::string& name,
                                                       std::uint64_t seed = 0);

/// Fits on `train`, scores on `test`; `seconds` holds the wall-clock time.
MetricsReport evaluate_split(BatchClassifier& model, const Dataset& train, const Dataset& test);

enum class FoldOrder {
  kChronological,  // contiguous blocks in row order
  kShuffled,       // seeded permutation first
};

struct CrossValidationResult {
  std::vector<MetricsReport> folds;
  MetricsReport pooled;  // metrics of the summed confusion matrices
};

/// k-fold driver. Throws InvalidArgument when k < 2 or k > rows.
CrossValidationResult cross_validate(BatchClassifier& model, const Dataset& data,
                                     std::size_t k, FoldOrder order = FoldOrder::kChronological,
                                     std::uint64_t seed = 0);

}  // namespace revstream
