#include "revstream/stream/naive_bayes.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "revstream/error.hpp"

namespace revstream {

void IncrementalNaiveBayes::learn(const FeatureVector& x, Label y, double weight) {
  if (!(weight > 0.0)) return;
  if (total_weight_ == 0.0) {
    dense_width_ = x.dense.size();
    sparse_width_ = x.dimension - x.dense.size();
    for (auto& c : classes_) c.dense.assign(dense_width_, {});
  } else if (x.dense.size() != dense_width_ || x.dimension - x.dense.size() != sparse_width_) {
    throw InvalidArgument("naive bayes: feature dimensions changed");
  }
  auto& c = classes_[index_of(y)];
  c.weight += weight;
  total_weight_ += weight;
  for (std::size_t j = 0; j < dense_width_; ++j) c.dense[j].add(x.dense[j], weight);
  for (const auto& [col, v] : x.sparse) {
    const auto k = static_cast<std::uint32_t>(col - dense_width_);
    c.sparse[k] += v * weight;
    c.sparse_total += v * weight;
  }
}

std::optional<ClassDistribution> IncrementalNaiveBayes::joint_log_likelihood(
    const FeatureVector& x) const {
  if (total_weight_ == 0.0) return std::nullopt;
  if (x.dense.size() != dense_width_) throw InvalidArgument("naive bayes: dense width mismatch");
  ClassDistribution out{};
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  for (std::size_t ci = 0; ci < kNumClasses; ++ci) {
    const auto& c = classes_[ci];
    if (c.weight == 0.0) {
      out[ci] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double ll = std::log(c.weight / total_weight_);
    for (std::size_t j = 0; j < dense_width_; ++j) {
      double var = c.dense[j].variance();
      if (var < kVarianceFloor) var = kVarianceFloor;
      const double dlt = x.dense[j] - c.dense[j].mean;
      ll -= 0.5 * (log_2pi + std::log(var)) + dlt * dlt / (2.0 * var);
    }
    if (sparse_width_ > 0) {
      const double denom = c.sparse_total + kSmoothing * static_cast<double>(sparse_width_);
      for (const auto& [col, v] : x.sparse) {
        const std::size_t k = col - dense_width_;
        if (k >= sparse_width_) continue;
        const auto it = c.sparse.find(static_cast<std::uint32_t>(k));
        const double count = it == c.sparse.end() ? 0.0 : it->second;
        ll += v * std::log((count + kSmoothing) / denom);
      }
    }
    out[ci] = ll;
  }
  return out;
}

std::optional<ClassDistribution> IncrementalNaiveBayes::predict_proba(
    const FeatureVector& x) const {
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

std::optional<Label> IncrementalNaiveBayes::predict(const FeatureVector& x) const {
  // Decided on log scores so that near-certain posteriors keep their order.
  const auto jll = joint_log_likelihood(x);
  if (!jll) return std::nullopt;
  return argmax(*jll);
}

nlohmann::json IncrementalNaiveBayes::checkpoint() const {
  auto classes = nlohmann::json::array();
  for (const auto& c : classes_) {
    auto dense = nlohmann::json::array();
    for (const auto& m : c.dense) dense.push_back({m.weight, m.mean, m.m2});
    nlohmann::json sparse = nlohmann::json::object();
    for (const auto& [k, v] : c.sparse) sparse[std::to_string(k)] = v;
    classes.push_back({{"weight", c.weight},
                       {"dense", std::move(dense)},
                       {"sparse", std::move(sparse)},
                       {"sparse_total", c.sparse_total}});
  }
  return {{"kind", "nb"},
          {"version", 1},
          {"total_weight", total_weight_},
          {"dense_width", dense_width_},
          {"sparse_width", sparse_width_},
          {"classes", std::move(classes)}};
}

IncrementalNaiveBayes IncrementalNaiveBayes::from_checkpoint(const nlohmann::json& j) {
  try {
    if (j.at("kind") != "nb" || j.at("version") != 1) throw DataError("not a naive bayes checkpoint");
    IncrementalNaiveBayes m;
    m.total_weight_ = j.at("total_weight").get<double>();
    m.dense_width_ = j.at("dense_width").get<std::size_t>();
    m.sparse_width_ = j.at("sparse_width").get<std::size_t>();
    const auto& classes = j.at("classes");
    if (classes.size() != kNumClasses) throw DataError("naive bayes checkpoint: bad class count");
    for (std::size_t ci = 0; ci < kNumClasses; ++ci) {
      const auto& jc = classes[ci];
      auto& c = m.classes_[ci];
      c.weight = jc.at("weight").get<double>();
      c.sparse_total = jc.at("sparse_total").get<double>();
      for (const auto& d : jc.at("dense")) {
        c.dense.push_back({d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>()});
      }
      if (c.dense.size() != m.dense_width_ && m.total_weight_ > 0.0) {
        throw DataError("naive bayes checkpoint: dense width mismatch");
      }
      for (const auto& [k, v] : jc.at("sparse").items()) {
        c.sparse[static_cast<std::uint32_t>(std::stoul(k))] = v.get<double>();
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed naive bayes checkpoint: ") + e.what());
  } catch (const std::logic_error& e) {
    throw DataError(std::string("malformed naive bayes checkpoint: ") + e.what());
  }
}

}  // namespace revstream
