#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace revstream {

/// Binary target: 0 is a kept edit, 1 is a revert.
enum class Label : std::uint8_t { kNonRevert = 0, kRevert = 1 };

inline constexpr std::size_t kNumClasses = 2;

using ClassDistribution = std::array<double, kNumClasses>;

constexpr std::size_t index_of(Label label) { return static_cast<std::size_t>(label); }

constexpr Label label_at(std::size_t index) {
  return index == 0 ? Label::kNonRevert : Label::kRevert;
}

constexpr Label label_from_flag(bool revert) {
  return revert ? Label::kRevert : Label::kNonRevert;
}

constexpr std::string_view class_name(Label label) {
  return label == Label::kRevert ? "revert" : "non-revert";
}

/// Index of the largest entry; ties resolve to the lower class id.
constexpr Label argmax(const ClassDistribution& dist) {
  return dist[1] > dist[0] ? Label::kRevert : Label::kNonRevert;
}

constexpr double total(const ClassDistribution& dist) { return dist[0] + dist[1]; }

/// Gini impurity 1 - sum p_c^2; zero for an empty distribution.
constexpr double gini(const ClassDistribution& dist) {
  const double n = total(dist);
  if (n <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double w : dist) sum_sq += (w / n) * (w / n);
  return 1.0 - sum_sq;
}

}  // namespace revstream
