#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "revstream/label.hpp"

namespace revstream {

class NgramVocabulary;

using Timestamp = std::chrono::sys_seconds;
using Day = std::chrono::sys_days;

/// Sparse n-gram counts keyed by vocabulary column.
using SparseCounts = std::map<std::uint32_t, std::uint32_t>;

struct Identity {
  std::string name;
  std::string id;

  friend bool operator==(const Identity&, const Identity&) = default;
};

/// Precomputed quality-service probabilities attached to a review.
struct OresScores {
  std::array<double, 4> edit_quality{};     // damaging false/true, goodfaith false/true
  std::array<double, 5> item_quality{};     // A..E
  std::array<double, 4> article_quality{};  // OK, attack, spam, vandalism
  std::array<double, 6> wp10{};             // B, C, FA, GA, Start, Stub

  static constexpr std::size_t kSize = 4 + 5 + 4 + 6;

  double& at(std::size_t i);
  double at(std::size_t i) const;

  friend bool operator==(const OresScores&, const OresScores&) = default;
};

struct ReviewEvent {
  Timestamp date{};
  std::string review_id;
  Identity editor;
  Identity creator;
  std::string article;
  bool bot_flag = false;
  bool editor_is_creator = false;
  std::uint64_t revision_size = 0;
  std::uint64_t n_links = 0;
  std::uint64_t n_repeated_links = 0;
  std::string inserted_text;
  std::string deleted_text;
  std::uint64_t n_inserted_chars = 0;
  std::uint64_t n_deleted_chars = 0;
  std::uint64_t n_reverted_words = 0;
  std::uint64_t n_bad_words = 0;
  double polarity_inserted = 0.0;
  double polarity_deleted = 0.0;
  OresScores ores;
  bool revert_flag = false;

  friend bool operator==(const ReviewEvent&, const ReviewEvent&) = default;
};

/// Per-editor, per-day aggregate of reviews.
struct DailyRecord {
  std::string editor_id;
  Day date{};
  bool bot_flag = false;
  bool editor_is_creator = false;
  double avg_revisions_per_article = 0.0;
  double avg_revisions_per_week = 0.0;
  double avg_articles_per_week = 0.0;
  OresScores avg_ores;
  double avg_revision_size = 0.0;
  double avg_links = 0.0;
  double avg_repeated_links = 0.0;
  double avg_reverted_words = 0.0;
  double avg_bad_words = 0.0;
  double avg_inserted_chars = 0.0;
  double avg_deleted_chars = 0.0;
  double avg_polarity_inserted = 0.0;
  double avg_polarity_deleted = 0.0;
  SparseCounts inserted_ngrams;
  SparseCounts deleted_ngrams;
  bool revert_label = false;
  bool synthetic = false;
  /// Reviews folded into this record; zero for generated records.
  std::uint32_t n_reviews = 0;

  Label label() const { return label_from_flag(revert_label); }

  friend bool operator==(const DailyRecord&, const DailyRecord&) = default;
};

// ---------------------------------------------------------------------------
// Dense feature layout
//
// Slots follow the daily feature table: the two static flags, the three
// activity rates, the four quality-probability blocks expanded, then the
// seven count averages and the two polarities.

inline constexpr std::size_t kDenseWidth = 33;
inline constexpr std::size_t kStaticSlots = 2;
inline constexpr std::size_t kSlotOresBegin = 5;
inline constexpr std::size_t kSlotRevisionSize = 24;
inline constexpr std::size_t kSlotRepeatedLinks = 26;
inline constexpr std::size_t kSlotBadWords = 28;

using DenseFeatures = std::array<double, kDenseWidth>;

/// snake_case column names, used in CSV headers and reports.
const std::array<std::string_view, kDenseWidth>& dense_feature_names();

/// Human-readable names, used in natural-language explanations.
const std::array<std::string_view, kDenseWidth>& dense_display_names();

bool is_probability_slot(std::size_t slot);

DenseFeatures dense_features(const DailyRecord& record);

/// Writes slot values back; flag slots become true when >= 0.5.
void set_dense_feature(DailyRecord& record, std::size_t slot, double value);

// ---------------------------------------------------------------------------
// Timestamps

std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_day(Day d);
std::optional<Day> parse_day(std::string_view text);

/// Monday-based week number counted from the epoch; two days share an
/// ISO-8601 week iff they share this number.
std::int64_t iso_week_index(Day d);

// ---------------------------------------------------------------------------
// Review stream ingestion

struct ParseIssue {
  std::size_t line = 0;  // 1-based
  std::string field;     // empty when not attributable to one field
  std::string message;
};

struct ParseResult {
  std::vector<ReviewEvent> events;
  std::vector<ParseIssue> issues;
};

/// Reads JSON-lines review events. Bad lines are skipped and reported;
/// blank lines are ignored.
ParseResult parse_review_stream(std::istream& in);

/// Throws IoError when the file cannot be opened.
ParseResult parse_review_file(const std::filesystem::path& path);

nlohmann::json to_json(const ReviewEvent& event);
std::string serialize_event(const ReviewEvent& event);

bool is_valid_utf8(std::string_view text);

// ---------------------------------------------------------------------------
// Daily aggregation

/// Folds reviews into one record per (editor, UTC day), sorted by
/// (date, editor_id). Texts are expected to be normalised already; they are
/// split on whitespace and vectorised against `vocab`.
std::vector<DailyRecord> aggregate_daily(std::vector<ReviewEvent> events,
                                         const NgramVocabulary& vocab);

nlohmann::json to_json(const DailyRecord& record);
DailyRecord daily_record_from_json(const nlohmann::json& j);

std::string serialize_record(const DailyRecord& record);

void write_records_jsonl(std::ostream& out, const std::vector<DailyRecord>& records);
void write_records_jsonl(const std::filesystem::path& path,
                         const std::vector<DailyRecord>& records);
std::vector<DailyRecord> read_records_jsonl(std::istream& in);
std::vector<DailyRecord> read_records_jsonl(const std::filesystem::path& path);

std::string csv_header();
std::string to_csv_row(const DailyRecord& record);
void write_records_csv(const std::filesystem::path& path,
                       const std::vector<DailyRecord>& records);

/// `key:count` pairs joined by `|`.
std::string format_sparse_counts(const SparseCounts& counts);
SparseCounts parse_sparse_counts(std::string_view text);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace revstream
