#include <doctest.h>

#include "revstream/error.hpp"
#include "revstream/metrics.hpp"
#include "support.hpp"

using namespace revstream;
using namespace revstream::testing;

TEST_CASE("metrics: all correct") {
  const auto m = compute_metrics(ConfusionMatrix::from_binary(5, 0, 0, 7));
  CHECK(m.accuracy == 1.0);
  for (double v : {m.precision[0], m.precision[1], m.recall[0], m.recall[1], m.f_measure[0],
                   m.f_measure[1], m.macro_f, m.micro_f}) {
    CHECK(v == 1.0);
  }
}

TEST_CASE("metrics: hand-computed 2x2") {
  const auto m = compute_metrics(ConfusionMatrix::from_binary(6, 1, 1, 2));
  CHECK(m.accuracy == doctest::Approx(0.8));
  CHECK(m.precision[1] == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall[1] == doctest::Approx(2.0 / 3.0));
  CHECK(m.f_measure[0] == doctest::Approx(6.0 / 7.0));
  CHECK(m.macro_f == doctest::Approx((6.0 / 7.0 + 2.0 / 3.0) / 2.0));
  CHECK(m.n_scored == 10);
}

TEST_CASE("metrics: zero denominators and empty matrix") {
  const auto m = compute_metrics(ConfusionMatrix::from_binary(4, 0, 3, 0));
  CHECK(m.precision[1] == 0.0);
  CHECK(m.recall[1] == 0.0);
  CHECK(m.f_measure[1] == 0.0);
  CHECK_THROWS_AS(compute_metrics(ConfusionMatrix{}), InvalidArgument);
}

TEST_CASE("property: class permutation swaps per-class rates, keeps macro values") {
  Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    const auto tn = rng.index(50), fp = rng.index(50), fn = rng.index(50), tp = 1 + rng.index(50);
    const auto a = compute_metrics(ConfusionMatrix::from_binary(tn, fp, fn, tp));
    const auto b = compute_metrics(ConfusionMatrix::from_binary(tp, fn, fp, tn));
    CHECK(a.precision[0] == b.precision[1]);
    CHECK(a.recall[1] == b.recall[0]);
    CHECK(a.macro_f == doctest::Approx(b.macro_f).epsilon(1e-15));
    CHECK(a.micro_precision == a.accuracy);
    CHECK(a.micro_recall == a.accuracy);
  }
}

TEST_CASE("metrics output formats") {
  auto m = compute_metrics(ConfusionMatrix::from_binary(6, 1, 1, 2));
  auto j = to_json(m);
  CHECK(j["confusion_matrix"]["tn"] == 6);
  CHECK_FALSE(j.contains("seconds"));
  m.seconds = 1.5;
  CHECK(to_json(m)["seconds"] == 1.5);
  const auto header = metrics_csv_header();
  const auto row = to_csv_row("last10", m);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.rfind("last10,", 0) == 0);
}
