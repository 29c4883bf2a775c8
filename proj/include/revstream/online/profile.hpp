#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "revstream/data_model.hpp"
#include "revstream/feature_vector.hpp"

namespace revstream {

struct RunningMean {
  double mean = 0.0;
  std::uint64_t count = 0;

  void add(double v) {
    mean += (v - mean) / static_cast<double>(count + 1);
    ++count;
  }

  friend bool operator==(const RunningMean&, const RunningMean&) = default;
};

inline constexpr std::size_t kMeanSlots = kDenseWidth - kStaticSlots;

/// Incremental per-editor state. The two flags are fixed by the first
/// record; every other dense slot keeps a running mean; n-gram counts are
/// summed.
struct EditorProfile {
  std::string editor_id;
  bool bot_flag = false;
  bool editor_is_creator = false;
  std::array<RunningMean, kMeanSlots> means{};
  SparseCounts inserted_ngrams;
  SparseCounts deleted_ngrams;
  Day last_updated{};
  std::uint64_t n_records = 0;
  /// Records whose flags disagreed with the stored ones.
  std::uint64_t static_conflicts = 0;

  friend bool operator==(const EditorProfile&, const EditorProfile&) = default;
};

/// Absorbs one record. Returns true when the record's flags contradict the
/// stored static block (the stored values are kept). Throws InvalidArgument
/// on an editor mismatch and DataError when the record predates the last
/// update.
bool update_profile(EditorProfile& profile, const DailyRecord& record);

/// Dense slots first, then inserted n-gram counts at kDenseWidth + column,
/// then deleted ones at kDenseWidth + vocab_size + column. Throws
/// InvalidArgument for a profile that has absorbed nothing, and DataError
/// when a column lies outside the vocabulary.
FeatureVector profile_feature_vector(const EditorProfile& profile, std::size_t vocab_size);

inline std::size_t profile_dimension(std::size_t vocab_size) {
  return kDenseWidth + 2 * vocab_size;
}

nlohmann::json to_json(const EditorProfile& profile);

/// editor_id -> profile, created on first sight.
class ProfileStore {
 public:
  /// Returns the updated profile.
  const EditorProfile& update(const DailyRecord& record);
  const EditorProfile* find(const std::string& editor_id) const;
  std::size_t size() const { return profiles_.size(); }
  std::uint64_t static_conflicts() const { return conflicts_; }

  /// One JSON object per line, ordered by editor id.
  void write_jsonl(std::ostream& out) const;

 private:
  std::map<std::string, EditorProfile> profiles_;
  std::uint64_t conflicts_ = 0;
};

}  // namespace revstream
