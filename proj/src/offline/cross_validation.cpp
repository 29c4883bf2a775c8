#include "revstream/offline/cross_validation.hpp"

#include <chrono>
#include <numeric>

#include "revstream/error.hpp"

namespace revstream {

std::unique_ptr<BatchClassifier> make_batch_classifier(const std::string& name,
                                                       std::uint64_t seed) {
  if (name == "dt") return std::make_unique<CartClassifier>();
  if (name == "rf") {
    ForestParams p;
    p.seed = seed;
    return std::make_unique<ForestClassifier>(p);
  }
  if (name == "rc") return std::make_unique<RidgeClassifier>();
  if (name == "nb") return std::make_unique<GaussianNbClassifier>();
  throw InvalidArgument("unknown classifier '" + name + "' (expected dt, rf, rc or nb)");
}

MetricsReport evaluate_split(BatchClassifier& model, const Dataset& train, const Dataset& test) {
  const auto start = std::chrono::steady_clock::now();
  model.fit(train);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < test.size(); ++i) {
    cm.add(test.labels[i], model.predict(test.features.row(i)));
  }
  auto report = compute_metrics(cm);
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

CrossValidationResult cross_validate(BatchClassifier& model, const Dataset& data, std::size_t k,
                                     FoldOrder order, std::uint64_t seed) {
  if (k < 2 || k > data.size()) throw InvalidArgument("cross-validation needs 2 <= k <= rows");
  std::vector<std::size_t> perm(data.size());
  std::iota(perm.begin(), perm.end(), 0);
  if (order == FoldOrder::kShuffled) {
    Rng rng(seed);
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.index(i))]);
    }
  }

  CrossValidationResult out;
  ConfusionMatrix pooled;
  const std::size_t n = data.size();
  for (std::size_t f = 0; f < k; ++f) {
    // Fold sizes differ by at most one; the first n % k folds are larger.
    const std::size_t begin = f * (n / k) + std::min(f, n % k);
    const std::size_t end = begin + n / k + (f < n % k ? 1 : 0);
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                                       perm.begin() + static_cast<std::ptrdiff_t>(end));
    train_rows.insert(train_rows.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(begin));
    train_rows.insert(train_rows.end(), perm.begin() + static_cast<std::ptrdiff_t>(end), perm.end());
    auto report = evaluate_split(model, data.subset(train_rows), data.subset(test_rows));
    pooled += report.confusion;
    out.folds.push_back(std::move(report));
  }
  out.pooled = compute_metrics(pooled);
  return out;
}

}  // namespace revstream
