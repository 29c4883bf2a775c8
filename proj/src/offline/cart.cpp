#include "revstream/offline/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "revstream/error.hpp"

namespace revstream {

namespace {

constexpr double kGainTolerance = 1e-12;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;

  bool found() const { return feature >= 0; }

  // Higher gain wins; near-equal gains go to the lower feature, then the
  // lower threshold.
  bool beaten_by(double g, int f, double t) const {
    if (!found() || g > gain + kGainTolerance) return true;
    if (g < gain - kGainTolerance) return false;
    return f < feature || (f == feature && t < threshold);
  }
};

ClassDistribution count_classes(const Dataset& data, std::span<const std::size_t> rows) {
  ClassDistribution counts{};
  for (auto r : rows) counts[index_of(data.labels[r])] += 1.0;
  return counts;
}

class CartBuilder {
 public:
  CartBuilder(const Dataset& data, const CartParams& params, Rng* rng)
      : data_(data), params_(params), rng_(rng) {}

  DecisionTree run(std::vector<std::size_t> rows) {
    build(std::move(rows), 0);
    return DecisionTree(std::move(nodes_), data_.n_features());
  }

 private:
  int build(std::vector<std::size_t> rows, std::size_t depth) {
    const int index = static_cast<int>(nodes_.size());
    TreeNode node;
    node.class_counts = count_classes(data_, rows);
    node.gini = gini(node.class_counts);
    nodes_.push_back(node);

    const bool can_split = node.gini > 0.0 && rows.size() >= params_.min_samples_split &&
                           (params_.max_depth == 0 || depth < params_.max_depth);
    if (!can_split) return index;

    const Split split = best_split(rows, node);
    if (!split.found()) return index;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto r : rows) {
      (data_.features(r, static_cast<std::size_t>(split.feature)) < split.threshold ? left : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    auto& n = nodes_[static_cast<std::size_t>(index)];
    n.feature = split.feature;
    n.threshold = split.threshold;
    n.left = l;
    n.right = r;
    return index;
  }

  std::vector<std::size_t> feature_order() {
    std::vector<std::size_t> order(data_.n_features());
    std::iota(order.begin(), order.end(), 0);
    if (subsampling()) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng_->index(i)]);
      }
    }
    return order;
  }

  bool subsampling() const {
    return rng_ != nullptr && params_.max_features > 0 &&
           params_.max_features < data_.n_features();
  }

  Split best_split(const std::vector<std::size_t>& rows, const TreeNode& node) {
    Split best;
    const double n = static_cast<double>(rows.size());
    const std::size_t budget = subsampling() ? params_.max_features : data_.n_features();
    std::size_t visited = 0;
    std::vector<std::pair<double, Label>> column(rows.size());

    for (const auto f : feature_order()) {
      if (visited >= budget) break;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        column[i] = {data_.features(rows[i], f), data_.labels[rows[i]]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (column.front().first == column.back().first) continue;  // constant here
      ++visited;

      ClassDistribution left{};
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left[index_of(column[i].second)] += 1.0;
        const double v = column[i].first;
        const double next = column[i + 1].first;
        if (!(v < next)) continue;
        double threshold = v + (next - v) / 2.0;
        if (!(threshold > v)) threshold = next;
        const ClassDistribution right{node.class_counts[0] - left[0],
                                      node.class_counts[1] - left[1]};
        const double nl = total(left);
        const double nr = total(right);
        const double gain = node.gini - (nl * gini(left) + nr * gini(right)) / n;
        if (best.beaten_by(gain, static_cast<int>(f), threshold)) {
          best = {static_cast<int>(f), threshold, gain};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const CartParams& params_;
  Rng* rng_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree train_cart(const Dataset& data, const CartParams& params) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  return train_cart(data, rows, params, nullptr);
}

DecisionTree train_cart(const Dataset& data, std::span<const std::size_t> rows,
                        const CartParams& params, Rng* rng) {
  if (data.size() == 0 || rows.empty()) throw InvalidArgument("cannot train on an empty dataset");
  if (data.n_features() == 0) throw InvalidArgument("dataset has no features");
  if (data.features.rows() != data.labels.size()) {
    throw InvalidArgument("feature rows and labels differ in length");
  }
  CartBuilder builder(data, params, rng);
  return builder.run(std::vector<std::size_t>(rows.begin(), rows.end()));
}

double impurity_decrease(const DecisionTree& tree, std::size_t node) {
  const auto& n = tree.node(node);
  if (n.is_leaf()) return 0.0;
  const auto& l = tree.node(static_cast<std::size_t>(n.left));
  const auto& r = tree.node(static_cast<std::size_t>(n.right));
  return total(n.class_counts) * n.gini - total(l.class_counts) * l.gini -
         total(r.class_counts) * r.gini;
}

}  // namespace revstream
