#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "revstream/label.hpp"

namespace revstream {

/// counts[actual][predicted].
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  void add(Label actual, Label predicted) { ++counts[index_of(actual)][index_of(predicted)]; }
  std::uint64_t total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  static ConfusionMatrix from_binary(std::uint64_t tn, std::uint64_t fp, std::uint64_t fn,
                                     std::uint64_t tp);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct MetricsReport {
  ConfusionMatrix confusion;
  std::uint64_t n_scored = 0;
  double accuracy = 0.0;
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f_measure{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f = 0.0;
  std::optional<double> seconds;
};

/// Per-class rates with 0/0 taken as 0, unweighted macro means, and micro
/// rates from pooled counts. Throws InvalidArgument on an empty matrix.
MetricsReport compute_metrics(const ConfusionMatrix& confusion);

nlohmann::json to_json(const MetricsReport& report);

std::string metrics_csv_header();
std::string to_csv_row(const std::string& window, const MetricsReport& report);

}  // namespace revstream
