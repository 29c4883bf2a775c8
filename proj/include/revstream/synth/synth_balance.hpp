#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revstream/data_model.hpp"

namespace revstream {

struct QuartileStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Linear-interpolation quantiles (the usual "type 7" rule). Throws
/// InvalidArgument on an empty input.
QuartileStats quartile_stats(std::span<const double> values);

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<double> centroids;  // ascending
  std::vector<std::size_t> sizes;
  double sse = 0.0;
};

/// 1-D k-means. Initial centroids are `k` distinct input values picked with
/// `seed`; k shrinks when fewer distinct values exist. Lloyd iterations run
/// until no centroid moves by 1e-9 or 100 rounds, then single-point moves
/// that lower the SSE are applied until none is left.
KMeansResult kmeans_1d(std::span<const double> values, std::size_t k, std::uint64_t seed);

struct SynthConfig {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t k = 2;
  /// Inclusive; defaults to the span of the input dates.
  std::optional<std::pair<Day, Day>> date_range;
};

struct SynthResult {
  std::vector<DailyRecord> records;
  /// Fallbacks taken during generation, for the user.
  std::vector<std::string> notes;
};

/// Slots drawn from observed values rather than from cluster ranges: the
/// two flags and the bad-word average, which barely vary.
bool is_hashmap_slot(std::size_t slot);

/// Quartile intervals are taken on avg_revision_size; each interval gets
/// count/4 records, the remainder going to the first ones. Only revert
/// records of `originals` are used. Throws InvalidArgument when there are
/// none, or when k is zero.
SynthResult generate_reverts(std::span<const DailyRecord> originals, const SynthConfig& config);

/// Concatenates and stable-sorts by (date, editor_id, synthetic).
std::vector<DailyRecord> merge_balance(std::vector<DailyRecord> original,
                                       std::vector<DailyRecord> synthetic);

struct FidelityRow {
  std::string feature;
  std::string quartile;  // Q1, Q2 or Q3
  double original = 0.0;
  double synthetic = 0.0;
  double relative_change_pct = 0.0;
};

/// |s - o| / |o| * 100; with o == 0 the denominator is taken as 1.
double relative_change_pct(double original, double synthetic);

/// Q1/Q2/Q3 per dense feature, original reverts against synthetic records.
std::vector<FidelityRow> fidelity_report(std::span<const DailyRecord> original_reverts,
                                         std::span<const DailyRecord> synthetic);

std::string fidelity_csv(const std::vector<FidelityRow>& rows);

}  // namespace revstream
