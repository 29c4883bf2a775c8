#include "revstream/offline/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "revstream/error.hpp"
#include "revstream/offline/cart.hpp"
#include "revstream/random.hpp"

namespace revstream {

ForestModel::ForestModel(std::vector<DecisionTree> trees, ForestParams params,
                         std::vector<std::vector<std::uint32_t>> in_bag_counts)
    : trees_(std::move(trees)), params_(params), in_bag_(std::move(in_bag_counts)) {}

ClassDistribution ForestModel::votes(std::span<const double> row) const {
  ClassDistribution v{};
  for (const auto& t : trees_) v[index_of(t.predict(row))] += 1.0;
  return v;
}

ClassDistribution ForestModel::votes(const FeatureVector& x) const {
  ClassDistribution v{};
  for (const auto& t : trees_) v[index_of(t.predict(x))] += 1.0;
  return v;
}

nlohmann::json ForestModel::to_json() const {
  auto trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"version", 1},
          {"kind", "batch_forest"},
          {"params",
           {{"n_estimators", params_.n_estimators},
            {"seed", params_.seed},
            {"bootstrap", params_.bootstrap},
            {"max_features", params_.max_features},
            {"max_depth", params_.max_depth},
            {"min_samples_split", params_.min_samples_split}}},
          {"trees", std::move(trees)}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != 1) throw DataError("unsupported forest version");
    ForestParams p;
    const auto& jp = j.at("params");
    p.n_estimators = jp.at("n_estimators").get<std::size_t>();
    p.seed = jp.at("seed").get<std::uint64_t>();
    p.bootstrap = jp.at("bootstrap").get<bool>();
    p.max_features = jp.at("max_features").get<std::size_t>();
    p.max_depth = jp.at("max_depth").get<std::size_t>();
    p.min_samples_split = jp.at("min_samples_split").get<std::size_t>();
    std::vector<DecisionTree> trees;
    for (const auto& jt : j.at("trees")) trees.push_back(DecisionTree::from_json(jt));
    return ForestModel(std::move(trees), p, {});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed forest: ") + e.what());
  }
}

ForestModel train_forest(const Dataset& data, const ForestParams& params) {
  if (data.size() == 0) throw InvalidArgument("cannot train on an empty dataset");
  if (params.n_estimators == 0) throw InvalidArgument("forest needs at least one tree");

  const std::size_t n = data.size();
  const std::size_t d = data.n_features();
  CartParams cart;
  cart.max_depth = params.max_depth;
  cart.min_samples_split = params.min_samples_split;
  cart.max_features = params.max_features > 0
                          ? params.max_features
                          : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                         std::floor(std::sqrt(static_cast<double>(d)))));

  std::vector<DecisionTree> trees(params.n_estimators);
  std::vector<std::vector<std::uint32_t>> in_bag(params.n_estimators);

  auto grow = [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows;
    std::vector<std::uint32_t> counts(n, 0);
    if (params.bootstrap) {
      rows.resize(n);
      for (auto& r : rows) {
        r = static_cast<std::size_t>(rng.index(n));
        ++counts[r];
      }
    } else {
      rows.resize(n);
      std::iota(rows.begin(), rows.end(), 0);
      std::fill(counts.begin(), counts.end(), 1);
    }
    trees[t] = train_cart(data, rows, cart, &rng);
    in_bag[t] = std::move(counts);
  };

  std::size_t workers = params.n_jobs > 0 ? params.n_jobs : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, params.n_estimators);
  if (workers == 1) {
    for (std::size_t t = 0; t < params.n_estimators; ++t) grow(t);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < params.n_estimators; t += workers) grow(t);
      });
    }
  }
  return ForestModel(std::move(trees), params, std::move(in_bag));
}

double oob_accuracy(const ForestModel& forest, const Dataset& data) {
  const auto& in_bag = forest.in_bag_counts();
  if (in_bag.size() != forest.trees().size()) {
    throw InvalidArgument("forest carries no in-bag bookkeeping");
  }
  std::size_t scored = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ClassDistribution votes{};
    bool any = false;
    for (std::size_t t = 0; t < forest.trees().size(); ++t) {
      if (in_bag[t].size() != data.size()) throw InvalidArgument("dataset differs from training set");
      if (in_bag[t][i] != 0) continue;
      votes[index_of(forest.trees()[t].predict(data.features.row(i)))] += 1.0;
      any = true;
    }
    if (!any) continue;
    ++scored;
    if (argmax(votes) == data.labels[i]) ++correct;
  }
  if (scored == 0) throw InvalidArgument("no out-of-bag rows");
  return static_cast<double>(correct) / static_cast<double>(scored);
}

FeatureImportance feature_importance(std::span<const DecisionTree> trees, std::size_t n_features) {
  FeatureImportance out;
  out.values.assign(n_features, 0.0);
  std::size_t contributing = 0;
  for (const auto& tree : trees) {
    if (tree.empty()) continue;
    std::vector<double> per_tree(n_features, 0.0);
    const double n_root = total(tree.node(0).class_counts);
    for (std::size_t i = 0; i < tree.size(); ++i) {
      const auto& node = tree.node(i);
      if (node.is_leaf()) continue;
      per_tree[static_cast<std::size_t>(node.feature)] += impurity_decrease(tree, i) / n_root;
    }
    const double sum = std::accumulate(per_tree.begin(), per_tree.end(), 0.0);
    ++contributing;
    if (sum <= 0.0) continue;
    for (std::size_t f = 0; f < n_features; ++f) out.values[f] += per_tree[f] / sum;
  }
  const double sum = std::accumulate(out.values.begin(), out.values.end(), 0.0);
  if (contributing == 0 || sum <= 0.0) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.all_zero = true;
    return out;
  }
  for (auto& v : out.values) v /= sum;
  return out;
}

FeatureImportance feature_importance(const ForestModel& forest) {
  return feature_importance(forest.trees(), forest.n_features());
}

std::vector<bool> select_features(std::span<const double> importances,
                                  std::optional<double> threshold) {
  std::vector<bool> mask(importances.size(), false);
  if (importances.empty()) return mask;
  double cut = 0.0;
  double slack = 0.0;
  if (threshold) {
    cut = *threshold;
  } else {
    cut = std::accumulate(importances.begin(), importances.end(), 0.0) /
          static_cast<double>(importances.size());
    // The computed mean of equal values can land one ulp above them.
    slack = 1e-12 * std::max(1.0, std::abs(cut));
  }
  for (std::size_t i = 0; i < importances.size(); ++i) mask[i] = importances[i] >= cut - slack;
  return mask;
}

}  // namespace revstream
