#include "revstream/metrics.hpp"

#include "revstream/data_model.hpp"
#include "revstream/error.hpp"

namespace revstream {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts) {
    for (auto c : row) n += c;
  }
  return n;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t a = 0; a < kNumClasses; ++a) {
    for (std::size_t p = 0; p < kNumClasses; ++p) counts[a][p] += other.counts[a][p];
  }
  return *this;
}

ConfusionMatrix ConfusionMatrix::from_binary(std::uint64_t tn, std::uint64_t fp,
                                             std::uint64_t fn, std::uint64_t tp) {
  ConfusionMatrix m;
  m.counts[0][0] = tn;
  m.counts[0][1] = fp;
  m.counts[1][0] = fn;
  m.counts[1][1] = tp;
  return m;
}

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

MetricsReport compute_metrics(const ConfusionMatrix& confusion) {
  const auto n = confusion.total();
  if (n == 0) throw InvalidArgument("cannot compute metrics of an empty confusion matrix");

  MetricsReport r;
  r.confusion = confusion;
  r.n_scored = n;

  std::uint64_t correct = 0;
  std::uint64_t pooled_fp = 0;
  std::uint64_t pooled_fn = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto tp = confusion.counts[c][c];
    std::uint64_t predicted = 0;
    std::uint64_t actual = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      predicted += confusion.counts[k][c];
      actual += confusion.counts[c][k];
    }
    correct += tp;
    pooled_fp += predicted - tp;
    pooled_fn += actual - tp;
    r.precision[c] = ratio(static_cast<double>(tp), static_cast<double>(predicted));
    r.recall[c] = ratio(static_cast<double>(tp), static_cast<double>(actual));
    r.f_measure[c] = harmonic(r.precision[c], r.recall[c]);
  }

  r.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    r.macro_precision += r.precision[c];
    r.macro_recall += r.recall[c];
    r.macro_f += r.f_measure[c];
  }
  r.macro_precision /= kNumClasses;
  r.macro_recall /= kNumClasses;
  r.macro_f /= kNumClasses;

  // For single-label data both pooled denominators equal n.
  r.micro_precision = static_cast<double>(correct) / static_cast<double>(correct + pooled_fp);
  r.micro_recall = static_cast<double>(correct) / static_cast<double>(correct + pooled_fn);
  r.micro_f = harmonic(r.micro_precision, r.micro_recall);
  return r;
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j{
      {"confusion_matrix",
       {{"tn", r.confusion.counts[0][0]},
        {"fp", r.confusion.counts[0][1]},
        {"fn", r.confusion.counts[1][0]},
        {"tp", r.confusion.counts[1][1]}}},
      {"n_scored", r.n_scored},
      {"accuracy", r.accuracy},
      {"precision", {{"macro", r.macro_precision}, {"micro", r.micro_precision},
                     {"non_revert", r.precision[0]}, {"revert", r.precision[1]}}},
      {"recall", {{"macro", r.macro_recall}, {"micro", r.micro_recall},
                  {"non_revert", r.recall[0]}, {"revert", r.recall[1]}}},
      {"f_measure", {{"macro", r.macro_f}, {"micro", r.micro_f},
                     {"non_revert", r.f_measure[0]}, {"revert", r.f_measure[1]}}},
  };
  if (r.seconds) j["seconds"] = *r.seconds;
  return j;
}

std::string metrics_csv_header() {
  return "window,tn,fp,fn,tp,n_scored,accuracy,macro_precision,macro_recall,macro_f,"
         "micro_precision,micro_recall,micro_f,precision_0,precision_1,recall_0,recall_1,"
         "f_0,f_1";
}

std::string to_csv_row(const std::string& window, const MetricsReport& r) {
  std::string row = window;
  auto add = [&row](const std::string& s) {
    row.push_back(',');
    row += s;
  };
  for (std::size_t a = 0; a < kNumClasses; ++a) {
    for (std::size_t p = 0; p < kNumClasses; ++p) add(std::to_string(r.confusion.counts[a][p]));
  }
  add(std::to_string(r.n_scored));
  for (double v : {r.accuracy, r.macro_precision, r.macro_recall, r.macro_f, r.micro_precision,
                   r.micro_recall, r.micro_f, r.precision[0], r.precision[1], r.recall[0],
                   r.recall[1], r.f_measure[0], r.f_measure[1]}) {
    add(format_double(v));
  }
  return row;
}

}  // namespace revstream
