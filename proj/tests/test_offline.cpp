#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "revstream/error.hpp"
#include "revstream/offline/batch_naive_bayes.hpp"
#include "revstream/offline/cart.hpp"
#include "revstream/offline/cross_validation.hpp"
#include "revstream/offline/forest.hpp"
#include "revstream/offline/ridge.hpp"
#include "revstream/offline/spearman.hpp"
#include "support.hpp"

using namespace revstream;
using namespace revstream::testing;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  Dataset d;
  d.features = FeatureMatrix(0, rows.empty() ? 0 : rows[0].size());
  for (const auto& r : rows) d.features.append_row(r);
  for (int l : labels) d.labels.push_back(label_at(std::size_t(l)));
  return d;
}

/// Column 0 copies the label, the rest is noise.
Dataset label_copy(Rng& rng, std::size_t n, std::size_t noise) {
  Dataset d;
  d.features = FeatureMatrix(0, 1 + noise);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = int(rng.index(2));
    std::vector<double> row{double(y)};
    for (std::size_t j = 0; j < noise; ++j) row.push_back(rng.uniform01());
    d.features.append_row(row);
    d.labels.push_back(label_at(std::size_t(y)));
  }
  return d;
}

Dataset blobs(Rng& rng, std::size_t n, double margin) {
  Dataset d;
  d.features = FeatureMatrix(0, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = int(i % 2);
    const double c = y ? margin : -margin;
    d.features.append_row(std::vector<double>{c + rng.normal(), c + rng.normal(), rng.normal()});
    d.labels.push_back(label_at(std::size_t(y)));
  }
  return d;
}

double training_accuracy(const DecisionTree& t, const Dataset& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.size(); ++i) ok += t.predict(d.features.row(i)) == d.labels[i];
  return double(ok) / double(d.size());
}

// Σd² form, valid without ties.
double spearman_sum_d2(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto rank = [&](const std::vector<double>& v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[idx[k]] = double(k + 1);
    return r;
  };
  const auto rx = rank(x), ry = rank(y);
  double d2 = 0;
  for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const double nn = double(n);
  return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
}

}  // namespace

TEST_CASE("spearman examples") {
  const std::vector<double> a{1, 2, 3};
  CHECK(spearman(a, std::vector<double>{2, 4, 6}).coefficient == doctest::Approx(1.0));
  CHECK(spearman(a, std::vector<double>{3, 2, 1}).coefficient == doctest::Approx(-1.0));
  CHECK(spearman(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{2, 1, 4, 3, 5}).coefficient ==
        doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_AS(spearman(a, std::vector<double>{1, 2}), InvalidArgument);
  CHECK_THROWS_AS(spearman(a, std::vector<double>{5, 5, 5}), InvalidArgument);
  CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
  CHECK(mean_ranks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("property: spearman symmetry, monotone invariance, Σd² agreement") {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.index(49);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform01();
      y[i] = rng.uniform01() + 0.3 * x[i];
    }
    const double r = spearman(x, y).coefficient;
    CHECK(std::abs(r - spearman_sum_d2(x, y)) <= 1e-12);
    CHECK(r == spearman(y, x).coefficient);
    std::vector<double> fx(n);
    for (std::size_t i = 0; i < n; ++i) fx[i] = std::exp(3.0 * x[i]) - 7.0;
    CHECK(spearman(fx, y).coefficient == r);
    CHECK(std::abs(r) <= 1.0);
  }
}

TEST_CASE("cart: pure data is a single leaf") {
  const auto d = make_dataset({{1, 2}, {3, 4}, {5, 6}}, {1, 1, 1});
  const auto t = train_cart(d);
  CHECK(t.size() == 1);
  CHECK(t.predict(std::vector<double>{0, 0}) == Label::kRevert);
  CHECK_THROWS_AS(train_cart(make_dataset({}, {})), InvalidArgument);
}

TEST_CASE("cart: one separable feature gives a depth-1 tree") {
  const auto d = make_dataset({{0}, {1}, {0}, {1}}, {0, 1, 0, 1});
  const auto t = train_cart(d);
  CHECK(t.depth() == 1);
  CHECK(t.node(0).threshold > 0.0);
  CHECK(t.node(0).threshold < 1.0);
  CHECK(training_accuracy(t, d) == 1.0);
}

TEST_CASE("cart: XOR needs depth 2") {
  const auto d = make_dataset({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
  CartParams p;
  p.max_depth = 2;
  const auto t = train_cart(d, p);
  CHECK(training_accuracy(t, d) == 1.0);
  // Exhaustive oracle: no depth-1 stump reaches more than 3/4 on XOR.
  for (double thr : {0.5}) {
    for (int f = 0; f < 2; ++f) {
      int best = 0;
      for (int left_cls = 0; left_cls < 2; ++left_cls) {
        int ok = 0;
        for (std::size_t i = 0; i < 4; ++i) {
          const int pred = d.features(i, std::size_t(f)) < thr ? left_cls : 1 - left_cls;
          ok += pred == int(index_of(d.labels[i]));
        }
        best = std::max(best, ok);
      }
      CHECK(best <= 2);
    }
  }
  p.max_depth = 1;
  CHECK(training_accuracy(train_cart(d, p), d) < 1.0);
}

TEST_CASE("cart: ties go to the lowest feature index") {
  // Features 0 and 1 are identical; the split must use 0.
  const auto d = make_dataset({{0, 0}, {1, 1}, {0, 0}, {1, 1}}, {0, 1, 0, 1});
  CHECK(train_cart(d).node(0).feature == 0);
}

TEST_CASE("property: cart accuracy grows with depth, gini decreases along splits") {
  Rng rng(32);
  for (int t = 0; t < 10; ++t) {
    const auto d = blobs(rng, 120, 0.4);
    double prev = 0.0;
    for (std::size_t depth = 1; depth <= 6; ++depth) {
      CartParams p;
      p.max_depth = depth;
      const auto tree = train_cart(d, p);
      const double acc = training_accuracy(tree, d);
      CHECK(acc >= prev);
      prev = acc;
      CHECK(tree.depth() <= depth);
      for (std::size_t i = 0; i < tree.size(); ++i) {
        if (tree.node(i).is_leaf()) continue;
        CHECK(impurity_decrease(tree, i) >= -1e-12);
      }
    }
  }
}

TEST_CASE("tree JSON round trip") {
  Rng rng(33);
  const auto d = blobs(rng, 80, 0.5);
  const auto t = train_cart(d);
  CHECK(DecisionTree::from_json(t.to_json()) == t);
  auto bad = t.to_json();
  bad["nodes"][0]["left"] = 0;
  if (!t.node(0).is_leaf()) CHECK_THROWS(DecisionTree::from_json(bad));
}

TEST_CASE("forest: one tree without bootstrap equals CART") {
  Rng rng(34);
  const auto d = blobs(rng, 150, 0.3);
  ForestParams p;
  p.n_estimators = 1;
  p.bootstrap = false;
  p.max_features = d.n_features();
  const auto forest = train_forest(d, p);
  const auto tree = train_cart(d);
  const auto probe = blobs(rng, 200, 0.3);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    CHECK(forest.predict(probe.features.row(i)) == tree.predict(probe.features.row(i)));
  }
}

TEST_CASE("forest: determinism, thread independence, OOB accuracy") {
  Rng rng(35);
  const auto d = blobs(rng, 300, 2.0);
  ForestParams p;
  p.n_estimators = 40;
  p.seed = 9;
  p.n_jobs = 1;
  const auto a = train_forest(d, p);
  p.n_jobs = 4;
  const auto b = train_forest(d, p);
  CHECK(a.to_json() == b.to_json());
  const auto probe = blobs(rng, 100, 2.0);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    CHECK(a.predict(probe.features.row(i)) == b.predict(probe.features.row(i)));
  }
  CHECK(oob_accuracy(a, d) >= 0.95);
  for (const auto& counts : a.in_bag_counts()) {
    CHECK(std::accumulate(counts.begin(), counts.end(), 0u) == d.size());
  }
  const auto back = ForestModel::from_json(a.to_json());
  CHECK(back.to_json() == a.to_json());
  CHECK_THROWS_AS(train_forest(Dataset{}, p), InvalidArgument);
}

TEST_CASE("feature importance and selection") {
  Rng rng(36);
  const auto d = label_copy(rng, 300, 4);
  ForestParams p;
  p.n_estimators = 30;
  const auto im = feature_importance(train_forest(d, p));
  CHECK_FALSE(im.all_zero);
  CHECK(std::accumulate(im.values.begin(), im.values.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::max_element(im.values.begin(), im.values.end()) == im.values.begin());
  CHECK(select_features(im.values)[0]);

  const auto pure = make_dataset({{1, 2}, {2, 3}, {3, 1}}, {0, 0, 0});
  const auto zero = feature_importance(train_forest(pure, p));
  CHECK(zero.all_zero);
  CHECK(std::all_of(zero.values.begin(), zero.values.end(), [](double v) { return v == 0.0; }));

  const std::vector<double> uniform(7, 1.0 / 7.0);
  const auto all = select_features(uniform);
  CHECK(std::all_of(all.begin(), all.end(), [](bool b) { return b; }));
  CHECK(select_features(std::vector<double>{0.7, 0.2, 0.1}) == std::vector<bool>{true, false, false});
  const auto keep = select_features(std::vector<double>{0.7, 0.2, 0.1}, 0.0);
  CHECK(std::all_of(keep.begin(), keep.end(), [](bool b) { return b; }));
  const auto none = select_features(std::vector<double>{0.7, 0.2, 0.1}, 1.0 + 1e-9);
  CHECK(std::none_of(none.begin(), none.end(), [](bool b) { return b; }));
}

TEST_CASE("ridge: 1-D separable data against the hand-solved normal equations") {
  const auto d = make_dataset({{0}, {1}, {3}, {4}}, {0, 0, 1, 1});
  const double alpha = 0.01;
  const auto m = train_ridge(d, alpha);
  // Centered: x = [-2,-1,1,2], y = [-1,-1,1,1]; w = Σxy / (Σx² + α) = 6 / (10 + α).
  CHECK(m.weights[0] == doctest::Approx(6.0 / (10.0 + alpha)).epsilon(1e-12));
  CHECK(m.intercept == doctest::Approx(-2.0 * 6.0 / (10.0 + alpha)).epsilon(1e-12));
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(m.predict(d.features.row(i)) == d.labels[i]);
  CHECK(RidgeModel::from_json(m.to_json()).weights == m.weights);
}

TEST_CASE("ridge: weight norm shrinks as alpha grows; bad inputs rejected") {
  Rng rng(37);
  const auto d = blobs(rng, 100, 1.0);
  double prev = 1e300;
  for (double alpha : {0.1, 1.0, 10.0, 100.0, 1e4, 1e6}) {
    const auto m = train_ridge(d, alpha);
    double norm = 0;
    for (double w : m.weights) norm += w * w;
    CHECK(norm < prev);
    prev = norm;
  }
  CHECK(prev < 1e-6);
  CHECK_THROWS_AS(train_ridge(d, 0.0), InvalidArgument);
  CHECK_THROWS_AS(train_ridge(make_dataset({{1}, {2}}, {1, 1}), 1.0), InvalidArgument);
}

TEST_CASE("batch naive bayes: closed-form density on a 3-sample set") {
  const auto d = make_dataset({{0.0}, {2.0}, {5.0}}, {0, 0, 1});
  BatchNaiveBayes nb;
  CHECK_FALSE(nb.predict(std::vector<double>{1.0}));
  nb.fit(d);
  // class 0: mean 1, var 1; class 1: one sample, variance floored.
  const double x = 1.5;
  const double l0 = std::log(2.0 / 3.0) - 0.5 * std::log(2 * M_PI * 1.0) - (x - 1) * (x - 1) / 2.0;
  const double l1 = std::log(1.0 / 3.0) - 0.5 * std::log(2 * M_PI * 1e-9) - (x - 5) * (x - 5) / (2 * 1e-9);
  const auto jll = *nb.joint_log_likelihood(FeatureVector::from_dense(std::vector<double>{x}));
  CHECK(jll[0] == doctest::Approx(l0).epsilon(1e-12));
  CHECK(jll[1] == doctest::Approx(l1).epsilon(1e-12));
  const auto p = *nb.predict_proba(FeatureVector::from_dense(std::vector<double>{x}));
  CHECK(p[0] + p[1] == doctest::Approx(1.0));
  CHECK(nb.predict(std::vector<double>{x}) == Label::kNonRevert);
}

TEST_CASE("cross-validation driver") {
  Rng rng(38);
  const auto d = blobs(rng, 103, 3.0);
  CartClassifier cart;
  const auto cv = cross_validate(cart, d, 10);
  CHECK(cv.folds.size() == 10);
  std::uint64_t total = 0;
  for (const auto& f : cv.folds) total += f.confusion.total();
  CHECK(total == d.size());
  CHECK(cv.pooled.confusion.total() == d.size());
  CHECK(cv.pooled.accuracy >= 0.95);
  CHECK_THROWS_AS(cross_validate(cart, d, 1), InvalidArgument);
  CHECK_THROWS_AS(cross_validate(cart, d, 104), InvalidArgument);
  const auto shuffled = cross_validate(cart, d, 5, FoldOrder::kShuffled, 3);
  CHECK(shuffled.pooled.confusion.total() == d.size());

  // A constant predictor on a 50/50 split.
  struct Constant : BatchClassifier {
    std::string name() const override { return "const"; }
    void fit(const Dataset&) override {}
    Label predict(std::span<const double>) const override { return Label::kNonRevert; }
  } constant;
  const auto half = blobs(rng, 100, 1.0);
  const auto r = evaluate_split(constant, half, half);
  CHECK(r.accuracy == 0.5);
  CHECK(r.recall[1] == 0.0);

  for (const char* name : {"dt", "rf", "rc", "nb"}) CHECK(make_batch_classifier(name)->name() == name);
  CHECK_THROWS_AS(make_batch_classifier("bc"), InvalidArgument);
}
