#include "revstream/stream/hoeffding_tree.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "revstream/error.hpp"

namespace revstream {

void HoeffdingConfig::validate() const {
  if (!(grace_period >= 1.0)) throw InvalidArgument("grace period must be at least 1");
  if (!(split_confidence > 0.0 && split_confidence < 1.0)) {
    throw InvalidArgument("split confidence must lie in (0, 1)");
  }
  if (!(tie_threshold >= 0.0)) throw InvalidArgument("tie threshold must be non-negative");
}

double hoeffding_bound(double range, double delta, double n) {
  return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

void GaussianEstimator::add(double x, double w) {
  const double total = weight + w;
  const double delta = x - mean;
  mean += delta * w / total;
  m2 += w * delta * (x - mean);
  weight = total;
  min = std::min(min, x);
  max = std::max(max, x);
}

double GaussianEstimator::weight_below(double t) const {
  if (weight <= 0.0 || t <= min) return 0.0;
  if (t > max) return weight;
  const double sd = std::sqrt(variance());
  if (sd <= 0.0) return mean < t ? weight : 0.0;
  return weight * 0.5 * std::erfc(-(t - mean) / (sd * std::sqrt(2.0)));
}

HoeffdingTree::HoeffdingTree(HoeffdingConfig config) : config_(config) {
  config_.validate();
  nodes_.emplace_back();
}

std::size_t HoeffdingTree::leaf_for(const FeatureVector& x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x.value(static_cast<std::size_t>(n.feature)) < n.threshold
                                     ? n.left
                                     : n.right);
  }
  return i;
}

ClassDistribution HoeffdingTree::effective_distribution(std::size_t node) const {
  int i = static_cast<int>(node);
  while (i >= 0) {
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    if (total(n.class_weights) > 0.0) return n.class_weights;
    i = n.parent;
  }
  return {};
}

std::size_t HoeffdingTree::split_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return !n.is_leaf(); }));
}

void HoeffdingTree::learn(const FeatureVector& x, Label y, double weight) {
  if (!(weight > 0.0)) return;
  if (!trained_) {
    dense_width_ = x.dense.size();
    dimension_ = x.dimension;
    trained_ = true;
  } else if (x.dense.size() != dense_width_ || x.dimension != dimension_) {
    throw InvalidArgument("hoeffding tree: feature dimensions changed");
  }

  const std::size_t leaf = leaf_for(x);
  auto& node = nodes_[leaf];
  auto& st = node.stats;
  const std::size_t c = index_of(y);
  if (st.dense[c].size() != dense_width_) st.dense[c].resize(dense_width_);
  for (std::size_t j = 0; j < dense_width_; ++j) st.dense[c][j].add(x.dense[j], weight);
  for (const auto& [col, v] : x.sparse) {
    if (v == 0.0) continue;
    st.sparse[c][static_cast<std::uint32_t>(col - dense_width_)].add(v, weight);
  }
  st.observed[c] += weight;
  node.class_weights[c] += weight;

  const double seen = total(st.observed);
  if (seen - st.weight_at_last_check >= config_.grace_period) {
    st.weight_at_last_check = seen;
    attempt_split(leaf);
  }
}

GaussianEstimator HoeffdingTree::feature_estimator(const LeafStats& st, std::size_t cls,
                                                   std::size_t feature) const {
  if (feature < dense_width_) {
    return st.dense[cls].empty() ? GaussianEstimator{} : st.dense[cls][feature];
  }
  // Sparse columns only record non-zero values; the rest of the class
  // weight sits at zero.
  const double w_total = st.observed[cls];
  GaussianEstimator nz;
  const auto it = st.sparse[cls].find(static_cast<std::uint32_t>(feature - dense_width_));
  if (it != st.sparse[cls].end()) nz = it->second;
  const double zeros = std::max(0.0, w_total - nz.weight);
  if (w_total <= 0.0) return {};
  GaussianEstimator e;
  e.weight = w_total;
  e.mean = nz.weight * nz.mean / w_total;
  e.m2 = nz.m2 + nz.weight * (nz.mean - e.mean) * (nz.mean - e.mean) + zeros * e.mean * e.mean;
  e.min = nz.min;
  e.max = nz.max;
  if (zeros > 1e-12) {
    e.min = std::min(e.min, 0.0);
    e.max = std::max(e.max, 0.0);
  }
  return e;
}

void HoeffdingTree::attempt_split(std::size_t leaf) {
  const LeafStats& st = nodes_[leaf].stats;
  const ClassDistribution parent = st.observed;
  if (parent[0] <= 0.0 || parent[1] <= 0.0) return;  // pure
  const double n = total(parent);
  const double parent_gini = gini(parent);

  std::vector<std::size_t> candidates(dense_width_);
  for (std::size_t j = 0; j < dense_width_; ++j) candidates[j] = j;
  std::set<std::uint32_t> sparse_cols;
  for (const auto& m : st.sparse) {
    for (const auto& [k, e] : m) sparse_cols.insert(k);
  }
  for (auto k : sparse_cols) candidates.push_back(dense_width_ + k);

  struct Candidate {
    double gain = -1.0;
    std::size_t feature = 0;
    double threshold = 0.0;
    ClassDistribution left{};
    ClassDistribution right{};
  };
  Candidate best;
  double second = 0.0;
  for (std::size_t f : candidates) {
    const auto e0 = feature_estimator(st, 0, f);
    const auto e1 = feature_estimator(st, 1, f);
    if (e0.weight <= 0.0 || e1.weight <= 0.0 || e0.mean == e1.mean) continue;
    const double t = 0.5 * (e0.mean + e1.mean);
    ClassDistribution left{e0.weight_below(t), e1.weight_below(t)};
    ClassDistribution right{e0.weight - left[0], e1.weight - left[1]};
    const double nl = total(left);
    const double nr = total(right);
    if (nl <= 0.0 || nr <= 0.0) continue;
    const double gain = parent_gini - (nl / n) * gini(left) - (nr / n) * gini(right);
    if (gain > best.gain) {
      if (best.gain > second) second = best.gain;
      best = {gain, f, t, left, right};
    } else if (gain > second) {
      second = gain;
    }
  }
  if (!(best.gain > 0.0)) return;
  const double eps = hoeffding_bound(1.0, config_.split_confidence, n);
  if (!(best.gain - second > eps || eps < config_.tie_threshold)) return;

  Node left;
  left.parent = static_cast<int>(leaf);
  left.class_weights = best.left;
  Node right;
  right.parent = static_cast<int>(leaf);
  right.class_weights = best.right;
  const int li = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(left));
  nodes_.push_back(std::move(right));

  auto& node = nodes_[leaf];
  node.feature = static_cast<int>(best.feature);
  node.threshold = best.threshold;
  node.left = li;
  node.right = li + 1;
  node.stats = LeafStats{};
}

std::optional<ClassDistribution> HoeffdingTree::predict_proba(const FeatureVector& x) const {
  if (!trained_) return std::nullopt;
  const auto dist = effective_distribution(leaf_for(x));
  const double n = total(dist);
  if (n <= 0.0) return std::nullopt;
  return ClassDistribution{dist[0] / n, dist[1] / n};
}

DecisionTree HoeffdingTree::snapshot() const {
  std::vector<TreeNode> out(nodes_.size());
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const auto& n = nodes_[i];
    auto& t = out[i];
    if (n.is_leaf()) {
      t.class_counts = effective_distribution(i);
    } else {
      t.feature = n.feature;
      t.threshold = n.threshold;
      t.left = n.left;
      t.right = n.right;
      const auto& l = out[static_cast<std::size_t>(n.left)].class_counts;
      const auto& r = out[static_cast<std::size_t>(n.right)].class_counts;
      t.class_counts = {l[0] + r[0], l[1] + r[1]};
    }
    t.gini = gini(t.class_counts);
  }
  return DecisionTree(std::move(out), dimension_);
}

namespace {

nlohmann::json estimator_json(const GaussianEstimator& e) {
  if (e.weight <= 0.0) return nlohmann::json::array({0.0, 0.0, 0.0, 0.0, 0.0});
  return nlohmann::json::array({e.weight, e.mean, e.m2, e.min, e.max});
}

GaussianEstimator estimator_from_json(const nlohmann::json& j) {
  GaussianEstimator e;
  e.weight = j.at(0).get<double>();
  if (e.weight <= 0.0) return GaussianEstimator{};
  e.mean = j.at(1).get<double>();
  e.m2 = j.at(2).get<double>();
  e.min = j.at(3).get<double>();
  e.max = j.at(4).get<double>();
  return e;
}

}  // namespace

nlohmann::json HoeffdingTree::checkpoint() const {
  auto nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nlohmann::json jn = {{"class_weights", n.class_weights}, {"parent", n.parent}};
    if (!n.is_leaf()) {
      jn["feature"] = n.feature;
      jn["threshold"] = n.threshold;
      jn["left"] = n.left;
      jn["right"] = n.right;
    } else {
      auto dense = nlohmann::json::array();
      auto sparse = nlohmann::json::array();
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        auto d = nlohmann::json::array();
        for (const auto& e : n.stats.dense[c]) d.push_back(estimator_json(e));
        dense.push_back(std::move(d));
        nlohmann::json s = nlohmann::json::object();
        for (const auto& [k, e] : n.stats.sparse[c]) s[std::to_string(k)] = estimator_json(e);
        sparse.push_back(std::move(s));
      }
      jn["stats"] = {{"observed", n.stats.observed},
                     {"weight_at_last_check", n.stats.weight_at_last_check},
                     {"dense", std::move(dense)},
                     {"sparse", std::move(sparse)}};
    }
    nodes.push_back(std::move(jn));
  }
  return {{"kind", "ht"},
          {"version", 1},
          {"config",
           {{"grace_period", config_.grace_period},
            {"split_confidence", config_.split_confidence},
            {"tie_threshold", config_.tie_threshold}}},
          {"trained", trained_},
          {"dense_width", dense_width_},
          {"dimension", dimension_},
          {"nodes", std::move(nodes)}};
}

HoeffdingTree HoeffdingTree::from_checkpoint(const nlohmann::json& j) {
  try {
    if (j.at("kind") != "ht" || j.at("version") != 1) throw DataError("not a hoeffding tree checkpoint");
    HoeffdingConfig cfg;
    cfg.grace_period = j.at("config").at("grace_period").get<double>();
    cfg.split_confidence = j.at("config").at("split_confidence").get<double>();
    cfg.tie_threshold = j.at("config").at("tie_threshold").get<double>();
    HoeffdingTree t(cfg);
    t.trained_ = j.at("trained").get<bool>();
    t.dense_width_ = j.at("dense_width").get<std::size_t>();
    t.dimension_ = j.at("dimension").get<std::size_t>();
    t.nodes_.clear();
    const auto& jnodes = j.at("nodes");
    for (const auto& jn : jnodes) {
      Node n;
      n.class_weights = jn.at("class_weights").get<ClassDistribution>();
      n.parent = jn.at("parent").get<int>();
      if (jn.contains("feature")) {
        n.feature = jn.at("feature").get<int>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
        const int self = static_cast<int>(t.nodes_.size());
        const int size = static_cast<int>(jnodes.size());
        if (n.left <= self || n.right <= self || n.left >= size || n.right >= size ||
            n.feature < 0 || static_cast<std::size_t>(n.feature) >= t.dimension_) {
          throw DataError("hoeffding tree checkpoint: bad node structure");
        }
      } else {
        const auto& js = jn.at("stats");
        n.stats.observed = js.at("observed").get<ClassDistribution>();
        n.stats.weight_at_last_check = js.at("weight_at_last_check").get<double>();
        for (std::size_t c = 0; c < kNumClasses; ++c) {
          for (const auto& e : js.at("dense").at(c)) n.stats.dense[c].push_back(estimator_from_json(e));
          for (const auto& [k, e] : js.at("sparse").at(c).items()) {
            n.stats.sparse[c][static_cast<std::uint32_t>(std::stoul(k))] = estimator_from_json(e);
          }
        }
      }
      t.nodes_.push_back(std::move(n));
    }
    if (t.nodes_.empty()) throw DataError("hoeffding tree checkpoint: no nodes");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed hoeffding tree checkpoint: ") + e.what());
  } catch (const std::logic_error& e) {
    throw DataError(std::string("malformed hoeffding tree checkpoint: ") + e.what());
  }
}

}  // namespace revstream
