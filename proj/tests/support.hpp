#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "revstream/data_model.hpp"
#include "revstream/random.hpp"

namespace revstream::testing {

inline Timestamp ts(int y, unsigned m, unsigned d, int hour = 12) {
  using namespace std::chrono;
  return sys_days{year{y} / month{m} / day{d}} + hours{hour};
}

inline Day ymd(int y, unsigned m, unsigned d) {
  using namespace std::chrono;
  return sys_days{year{y} / month{m} / std::chrono::day{d}};
}

inline void random_distribution(Rng& rng, double* p, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = rng.uniform01() + 0.01;
    sum += p[i];
  }
  for (std::size_t i = 0; i < n; ++i) p[i] /= sum;
}

inline OresScores random_ores(Rng& rng) {
  OresScores o;
  const double damaging = rng.uniform01();
  const double goodfaith = rng.uniform01();
  o.edit_quality = {1.0 - damaging, damaging, 1.0 - goodfaith, goodfaith};
  random_distribution(rng, o.item_quality.data(), 5);
  random_distribution(rng, o.article_quality.data(), 4);
  random_distribution(rng, o.wp10.data(), 6);
  return o;
}

inline std::string random_text(Rng& rng, std::size_t max_words) {
  static const char* words[] = {"hotel", "beach", "wiki", "jpg", "museum", "train",
                                "free", "cheap", "spam", "city", "park", "long"};
  std::string out;
  const auto n = rng.index(max_words + 1);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!out.empty()) out += ' ';
    out += words[rng.index(std::size(words))];
  }
  return out;
}

/// A schema-valid event; texts are already in normalised form.
inline ReviewEvent random_event(Rng& rng, std::size_t n_editors, std::size_t n_days) {
  ReviewEvent e;
  e.date = ts(2023, 1, 2) + std::chrono::seconds(static_cast<std::int64_t>(rng.index(n_days * 86400)));
  e.review_id = "r" + std::to_string(rng.next() % 1000000);
  const auto ed = rng.index(n_editors);
  e.editor = {"Editor" + std::to_string(ed), "e" + std::to_string(ed)};
  e.creator = {"Creator", "c" + std::to_string(rng.index(5))};
  e.article = "Article" + std::to_string(rng.index(8));
  e.bot_flag = rng.index(10) == 0;
  e.editor_is_creator = rng.index(4) == 0;
  e.revision_size = rng.index(5000);
  e.n_links = rng.index(20);
  e.n_repeated_links = rng.index(5);
  e.inserted_text = random_text(rng, 6);
  e.deleted_text = random_text(rng, 3);
  e.n_inserted_chars = e.inserted_text.size();
  e.n_deleted_chars = e.deleted_text.size();
  e.n_reverted_words = rng.index(3);
  e.n_bad_words = rng.index(3);
  e.polarity_inserted = rng.uniform(-1.0, 1.0);
  e.polarity_deleted = rng.uniform(-1.0, 1.0);
  e.ores = random_ores(rng);
  e.revert_flag = rng.index(5) == 0;
  return e;
}

/// A daily record with every dense slot populated.
inline DailyRecord random_record(Rng& rng, Day date, const std::string& editor, bool revert,
                                 std::uint32_t vocab_size = 0) {
  DailyRecord r;
  r.editor_id = editor;
  r.date = date;
  r.bot_flag = rng.index(10) == 0;
  r.editor_is_creator = rng.index(4) == 0;
  r.avg_revisions_per_article = rng.uniform(1.0, 5.0);
  r.avg_revisions_per_week = rng.uniform(1.0, 20.0);
  r.avg_articles_per_week = rng.uniform(0.5, 5.0);
  r.avg_ores = random_ores(rng);
  r.avg_revision_size = rng.uniform(0.0, 4000.0);
  r.avg_links = rng.uniform(0.0, 20.0);
  r.avg_repeated_links = rng.uniform(0.0, 3.0);
  r.avg_reverted_words = rng.uniform(0.0, 3.0);
  r.avg_bad_words = static_cast<double>(rng.index(3));
  r.avg_inserted_chars = rng.uniform(0.0, 500.0);
  r.avg_deleted_chars = rng.uniform(0.0, 200.0);
  r.avg_polarity_inserted = rng.uniform(-1.0, 1.0);
  r.avg_polarity_deleted = rng.uniform(-1.0, 1.0);
  for (std::uint32_t k = 0; k < vocab_size; ++k) {
    if (rng.index(3) == 0) r.inserted_ngrams[k] = 1 + static_cast<std::uint32_t>(rng.index(3));
    if (rng.index(6) == 0) r.deleted_ngrams[k] = 1 + static_cast<std::uint32_t>(rng.index(2));
  }
  r.revert_label = revert;
  r.n_reviews = 1;
  return r;
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("revstream_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace revstream::testing
