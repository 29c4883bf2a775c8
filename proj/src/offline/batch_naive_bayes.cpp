#include "revstream/offline/batch_naive_bayes.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "revstream/error.hpp"

namespace revstream {

void BatchNaiveBayes::fit(std::span<const FeatureVector> xs, std::span<const Label> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("naive bayes: sample/label count mismatch");
  if (xs.empty()) throw InvalidArgument("cannot train on an empty dataset");

  dense_width_ = xs.front().dense.size();
  sparse_width_ = xs.front().dimension - dense_width_;
  for (const auto& x : xs) {
    if (x.dense.size() != dense_width_ || x.dimension != xs.front().dimension) {
      throw InvalidArgument("naive bayes: inconsistent feature dimensions");
    }
  }

  class_n_ = {};
  sparse_total_ = {};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    mean_[c].assign(dense_width_, 0.0);
    var_[c].assign(dense_width_, 0.0);
    sparse_counts_[c].assign(sparse_width_, 0.0);
  }

  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t c = index_of(ys[i]);
    ++class_n_[c];
    for (std::size_t j = 0; j < dense_width_; ++j) mean_[c][j] += xs[i].dense[j];
    for (const auto& [col, v] : xs[i].sparse) {
      sparse_counts_[c][col - dense_width_] += v;
      sparse_total_[c] += v;
    }
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (class_n_[c] == 0) continue;
    for (auto& m : mean_[c]) m /= static_cast<double>(class_n_[c]);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t c = index_of(ys[i]);
    for (std::size_t j = 0; j < dense_width_; ++j) {
      const double dlt = xs[i].dense[j] - mean_[c][j];
      var_[c][j] += dlt * dlt;
    }
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (auto& v : var_[c]) {
      v = class_n_[c] > 0 ? v / static_cast<double>(class_n_[c]) : 0.0;
      if (v < kVarianceFloor) v = kVarianceFloor;
    }
  }
  n_total_ = xs.size();
}

void BatchNaiveBayes::fit(const Dataset& data) {
  std::vector<FeatureVector> xs;
  xs.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    xs.push_back(FeatureVector::from_dense(data.features.row(i)));
  }
  fit(xs, data.labels);
}

std::optional<ClassDistribution> BatchNaiveBayes::joint_log_likelihood(
    const FeatureVector& x) const {
  if (!fitted()) return std::nullopt;
  if (x.dense.size() != dense_width_) throw InvalidArgument("naive bayes: dense width mismatch");
  ClassDistribution out{};
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (class_n_[c] == 0) {
      out[c] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double ll = std::log(static_cast<double>(class_n_[c]) / static_cast<double>(n_total_));
    for (std::size_t j = 0; j < dense_width_; ++j) {
      const double dlt = x.dense[j] - mean_[c][j];
      ll -= 0.5 * (log_2pi + std::log(var_[c][j])) + dlt * dlt / (2.0 * var_[c][j]);
    }
    if (sparse_width_ > 0) {
      const double denom = sparse_total_[c] + kSmoothing * static_cast<double>(sparse_width_);
      for (const auto& [col, v] : x.sparse) {
        const std::size_t k = col - dense_width_;
        if (k >= sparse_width_) continue;
        ll += v * std::log((sparse_counts_[c][k] + kSmoothing) / denom);
      }
    }
    out[c] = ll;
  }
  return out;
}

std::optional<ClassDistribution> BatchNaiveBayes::predict_proba(const FeatureVector& x) const {
  const auto jll = joint_log_likelihood(x);
  if (!jll) return std::nullopt;
  const double m = std::max((*jll)[0], (*jll)[1]);
  ClassDistribution p{};
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    p[c] = std::isinf((*jll)[c]) ? 0.0 : std::exp((*jll)[c] - m);
    sum += p[c];
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::optional<Label> BatchNaiveBayes::predict(const FeatureVector& x) const {
  const auto jll = joint_log_likelihood(x);
  if (!jll) return std::nullopt;
  return argmax(*jll);
}

}  // namespace revstream
