#include "revstream/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "revstream/error.hpp"
#include "revstream/text_features.hpp"

namespace revstream {

using nlohmann::json;

double& OresScores::at(std::size_t i) {
  if (i < 4) return edit_quality[i];
  i -= 4;
  if (i < 5) return item_quality[i];
  i -= 5;
  if (i < 4) return article_quality[i];
  i -= 4;
  if (i < 6) return wp10[i];
  throw InvalidArgument("ORES slot out of range");
}

double OresScores::at(std::size_t i) const { return const_cast<OresScores*>(this)->at(i); }

// ---------------------------------------------------------------------------

const std::array<std::string_view, kDenseWidth>& dense_feature_names() {
  static const std::array<std::string_view, kDenseWidth> names = {
      "bot_flag",
      "editor_is_creator",
      "avg_revisions_per_article",
      "avg_revisions_per_week",
      "avg_articles_per_week",
      "avg_ores_damaging_false",
      "avg_ores_damaging_true",
      "avg_ores_goodfaith_false",
      "avg_ores_goodfaith_true",
      "avg_ores_item_a",
      "avg_ores_item_b",
      "avg_ores_item_c",
      "avg_ores_item_d",
      "avg_ores_item_e",
      "avg_ores_article_ok",
      "avg_ores_article_attack",
      "avg_ores_article_spam",
      "avg_ores_article_vandalism",
      "avg_ores_wp10_b",
      "avg_ores_wp10_c",
      "avg_ores_wp10_fa",
      "avg_ores_wp10_ga",
      "avg_ores_wp10_start",
      "avg_ores_wp10_stub",
      "avg_revision_size",
      "avg_links",
      "avg_repeated_links",
      "avg_reverted_words",
      "avg_bad_words",
      "avg_inserted_chars",
      "avg_deleted_chars",
      "avg_polarity_inserted",
      "avg_polarity_deleted",
  };
  return names;
}

const std::array<std::string_view, kDenseWidth>& dense_display_names() {
  static const std::array<std::string_view, kDenseWidth> names = {
      "Bot flag",
      "Editor is the creator of the article",
      "The average number of revisions per article",
      "The average number of revisions per week",
      "The average number of articles revised per week",
      "Average ORES edit quality probability - damagingFalseAvg",
      "Average ORES edit quality probability - damagingTrueAvg",
      "Average ORES edit quality probability - goodfaithFalseAvg",
      "Average ORES edit quality probability - goodfaithTrueAvg",
      "Average ORES item quality probability - AAvg",
      "Average ORES item quality probability - BAvg",
      "Average ORES item quality probability - CAvg",
      "Average ORES item quality probability - DAvg",
      "Average ORES item quality probability - EAvg",
      "Average ORES article quality probability - OKAvg",
      "Average ORES article quality probability - attackAvg",
      "Average ORES article quality probability - spamAvg",
      "Average ORES article quality probability - vandalismAvg",
      "Average ORES article quality probability - WP10BAvg",
      "Average ORES article quality probability - WP10CAvg",
      "Average ORES article quality probability - WP10FAAvg",
      "Average ORES article quality probability - WP10GAAvg",
      "Average ORES article quality probability - WP10StartAvg",
      "Average ORES article quality probability - WP10StubAvg",
      "The average size of the revision",
      "The average number of links",
      "The average number of repeated links",
      "The average number of common reverted words",
      "The average number of bad words",
      "The average number of inserted characters",
      "The average number of deleted characters",
      "The average polarity of inserted text",
      "The average polarity of deleted text",
  };
  return names;
}

bool is_probability_slot(std::size_t slot) {
  return slot >= kSlotOresBegin && slot < kSlotOresBegin + OresScores::kSize;
}

namespace {

double* scalar_slot(DailyRecord& r, std::size_t slot) {
  switch (slot) {
    case 2: return &r.avg_revisions_per_article;
    case 3: return &r.avg_revisions_per_week;
    case 4: return &r.avg_articles_per_week;
    case 24: return &r.avg_revision_size;
    case 25: return &r.avg_links;
    case 26: return &r.avg_repeated_links;
    case 27: return &r.avg_reverted_words;
    case 28: return &r.avg_bad_words;
    case 29: return &r.avg_inserted_chars;
    case 30: return &r.avg_deleted_chars;
    case 31: return &r.avg_polarity_inserted;
    case 32: return &r.avg_polarity_deleted;
    default: break;
  }
  if (is_probability_slot(slot)) return &r.avg_ores.at(slot - kSlotOresBegin);
  return nullptr;
}

}  // namespace

DenseFeatures dense_features(const DailyRecord& record) {
  DenseFeatures out{};
  auto& r = const_cast<DailyRecord&>(record);
  out[0] = record.bot_flag ? 1.0 : 0.0;
  out[1] = record.editor_is_creator ? 1.0 : 0.0;
  for (std::size_t s = kStaticSlots; s < kDenseWidth; ++s) out[s] = *scalar_slot(r, s);
  return out;
}

void set_dense_feature(DailyRecord& record, std::size_t slot, double value) {
  if (slot == 0) {
    record.bot_flag = value >= 0.5;
  } else if (slot == 1) {
    record.editor_is_creator = value >= 0.5;
  } else if (slot < kDenseWidth) {
    *scalar_slot(record, slot) = value;
  } else {
    throw InvalidArgument("dense slot out of range");
  }
}

// ---------------------------------------------------------------------------

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::string two_digits(unsigned v) {
  std::string s = std::to_string(v);
  return v < 10 ? "0" + s : s;
}

}  // namespace

std::string format_day(Day d) {
  const std::chrono::year_month_day ymd{d};
  std::string y = std::to_string(static_cast<int>(ymd.year()));
  while (y.size() < 4) y.insert(y.begin(), '0');
  return y + "-" + two_digits(static_cast<unsigned>(ymd.month())) + "-" +
         two_digits(static_cast<unsigned>(ymd.day()));
}

std::optional<Day> parse_day(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Day{ymd};
}

std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::hh_mm_ss hms{t - day};
  return format_day(day) + "T" + two_digits(static_cast<unsigned>(hms.hours().count())) + ":" +
         two_digits(static_cast<unsigned>(hms.minutes().count())) + ":" +
         two_digits(static_cast<unsigned>(hms.seconds().count())) + "Z";
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS with an optional Z or +00:00 suffix.
  if (text.size() < 19 || (text[10] != 'T' && text[10] != ' ')) return std::nullopt;
  const auto suffix = text.substr(19);
  if (!(suffix.empty() || suffix == "Z" || suffix == "+00:00")) return std::nullopt;
  const auto day = parse_day(text.substr(0, 10));
  if (!day || text[13] != ':' || text[16] != ':') return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!parse_int(text.substr(11, 2), hh) || !parse_int(text.substr(14, 2), mm) ||
      !parse_int(text.substr(17, 2), ss)) {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59 || ss > 60 || hh < 0 || mm < 0 || ss < 0) return std::nullopt;
  return Timestamp{*day} + std::chrono::hours{hh} + std::chrono::minutes{mm} +
         std::chrono::seconds{ss};
}

std::int64_t iso_week_index(Day d) {
  // 1970-01-01 was a Thursday; shift so that weeks start on Monday.
  const std::int64_t days = d.time_since_epoch().count() + 3;
  return days >= 0 ? days / 7 : -((-days + 6) / 7);
}

// ---------------------------------------------------------------------------

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      return false;
    }
    if (i + len > text.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    i += len;
  }
  return true;
}

namespace {

struct FieldError {
  std::string field;
  std::string message;
};

const json& require(const json& obj, const char* field) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) throw FieldError{field, "missing mandatory field"};
  return *it;
}

std::string get_string(const json& obj, const char* field) {
  const auto& v = require(obj, field);
  if (!v.is_string()) throw FieldError{field, "expected a string"};
  return v.get<std::string>();
}

bool get_bool(const json& obj, const char* field) {
  const auto& v = require(obj, field);
  if (!v.is_boolean()) throw FieldError{field, "expected a boolean"};
  return v.get<bool>();
}

std::uint64_t get_count(const json& v, const char* field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) throw FieldError{field, "expected a non-negative integer"};
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 9.007199254740992e15) {
      return static_cast<std::uint64_t>(d);
    }
  }
  throw FieldError{field, "expected a non-negative integer"};
}

std::uint64_t get_count(const json& obj, const char* field, bool mandatory) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) {
    if (mandatory) throw FieldError{field, "missing mandatory field"};
    return 0;
  }
  return get_count(*it, field);
}

double get_real(const json& obj, const char* field, bool mandatory, double lo, double hi) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) {
    if (mandatory) throw FieldError{field, "missing mandatory field"};
    return 0.0;
  }
  if (!it->is_number()) throw FieldError{field, "expected a number"};
  const double v = it->get<double>();
  if (!(v >= lo && v <= hi)) throw FieldError{field, "value out of range"};
  return v;
}

Identity get_identity(const json& obj, const char* field) {
  const auto& v = require(obj, field);
  if (!v.is_object()) throw FieldError{field, "expected an object with name and id"};
  Identity id;
  const auto name = v.find("name");
  const auto ident = v.find("id");
  if (name == v.end() || !name->is_string()) throw FieldError{field, "missing name"};
  if (ident == v.end()) throw FieldError{field, "missing id"};
  id.name = name->get<std::string>();
  if (ident->is_string()) {
    id.id = ident->get<std::string>();
  } else if (ident->is_number_integer()) {
    id.id = std::to_string(ident->get<std::int64_t>());
  } else {
    throw FieldError{field, "id must be a string or integer"};
  }
  return id;
}

template <std::size_t N>
void get_probabilities(const json& obj, const char* field, std::array<double, N>& out) {
  const auto& v = require(obj, field);
  if (!v.is_array() || v.size() != N) {
    throw FieldError{field, "expected an array of " + std::to_string(N) + " probabilities"};
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) throw FieldError{field, "expected numeric probabilities"};
    const double p = v[i].get<double>();
    if (!(p >= 0.0 && p <= 1.0)) throw FieldError{field, "probability outside [0, 1]"};
    out[i] = p;
  }
}

ReviewEvent event_from_json(const json& j) {
  if (!j.is_object()) throw FieldError{"", "record is not a JSON object"};
  ReviewEvent e;
  const auto date_text = get_string(j, "date");
  const auto ts = parse_timestamp(date_text);
  if (!ts) throw FieldError{"date", "not an ISO-8601 UTC timestamp"};
  e.date = *ts;
  e.review_id = get_string(j, "review_id");
  e.editor = get_identity(j, "editor");
  e.creator = get_identity(j, "creator");
  e.article = get_string(j, "article");
  e.bot_flag = get_bool(j, "bot_flag");
  e.editor_is_creator = get_bool(j, "editor_is_creator");
  e.revision_size = get_count(j, "revision_size", true);
  e.n_links = get_count(j, "n_links", true);
  e.n_repeated_links = get_count(j, "n_repeated_links", true);
  e.inserted_text = get_string(j, "inserted_text");
  e.deleted_text = get_string(j, "deleted_text");
  e.n_inserted_chars = get_count(j, "n_inserted_chars", true);
  e.n_deleted_chars = get_count(j, "n_deleted_chars", true);
  // Text-derived fields may be filled in later by the text pipeline.
  e.n_reverted_words = get_count(j, "n_reverted_words", false);
  e.n_bad_words = get_count(j, "n_bad_words", false);
  e.polarity_inserted = get_real(j, "polarity_inserted", false, -1.0, 1.0);
  e.polarity_deleted = get_real(j, "polarity_deleted", false, -1.0, 1.0);
  get_probabilities(j, "ores_edit_quality", e.ores.edit_quality);
  get_probabilities(j, "ores_item_quality", e.ores.item_quality);
  get_probabilities(j, "ores_article_quality", e.ores.article_quality);
  get_probabilities(j, "ores_wp10", e.ores.wp10);
  const auto& eq = e.ores.edit_quality;
  if (std::abs(eq[0] + eq[1] - 1.0) > 1e-6) {
    throw FieldError{"ores_edit_quality", "damaging probabilities must sum to 1"};
  }
  if (std::abs(eq[2] + eq[3] - 1.0) > 1e-6) {
    throw FieldError{"ores_edit_quality", "goodfaith probabilities must sum to 1"};
  }
  e.revert_flag = get_bool(j, "revert_flag");
  return e;
}

}  // namespace

ParseResult parse_review_stream(std::istream& in) {
  if (!in) throw IoError("review stream is not readable");
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!is_valid_utf8(line)) {
      result.issues.push_back({line_no, "", "line is not valid UTF-8"});
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      result.issues.push_back({line_no, "", std::string("malformed JSON: ") + e.what()});
      continue;
    }
    try {
      result.events.push_back(event_from_json(j));
    } catch (const FieldError& e) {
      result.issues.push_back({line_no, e.field, e.message});
    }
  }
  if (in.bad()) throw IoError("error while reading review stream");
  return result;
}

ParseResult parse_review_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open review stream: " + path.string());
  return parse_review_stream(in);
}

json to_json(const ReviewEvent& e) {
  return json{
      {"date", format_timestamp(e.date)},
      {"review_id", e.review_id},
      {"editor", {{"name", e.editor.name}, {"id", e.editor.id}}},
      {"creator", {{"name", e.creator.name}, {"id", e.creator.id}}},
      {"article", e.article},
      {"bot_flag", e.bot_flag},
      {"editor_is_creator", e.editor_is_creator},
      {"revision_size", e.revision_size},
      {"n_links", e.n_links},
      {"n_repeated_links", e.n_repeated_links},
      {"inserted_text", e.inserted_text},
      {"deleted_text", e.deleted_text},
      {"n_inserted_chars", e.n_inserted_chars},
      {"n_deleted_chars", e.n_deleted_chars},
      {"n_reverted_words", e.n_reverted_words},
      {"n_bad_words", e.n_bad_words},
      {"polarity_inserted", e.polarity_inserted},
      {"polarity_deleted", e.polarity_deleted},
      {"ores_edit_quality", e.ores.edit_quality},
      {"ores_item_quality", e.ores.item_quality},
      {"ores_article_quality", e.ores.article_quality},
      {"ores_wp10", e.ores.wp10},
      {"revert_flag", e.revert_flag},
  };
}

std::string serialize_event(const ReviewEvent& event) { return to_json(event).dump(); }

// ---------------------------------------------------------------------------

namespace {

struct EditorHistory {
  std::uint64_t reviews = 0;
  std::set<std::string> articles;
  std::int64_t first_week = 0;
};

bool canonical_less(const ReviewEvent* a, const ReviewEvent* b) {
  return std::tie(a->date, a->review_id, a->article, a->revision_size, a->inserted_text,
                  a->deleted_text) < std::tie(b->date, b->review_id, b->article,
                                              b->revision_size, b->inserted_text,
                                              b->deleted_text);
}

void add_counts(SparseCounts& into, const SparseCounts& from) {
  for (const auto& [k, v] : from) into[k] += v;
}

DailyRecord fold_day(const std::string& editor_id, Day day,
                     std::vector<const ReviewEvent*>& reviews, EditorHistory& history,
                     const NgramVocabulary& vocab) {
  // A fixed summation order makes the averages independent of input order.
  std::sort(reviews.begin(), reviews.end(), canonical_less);

  DailyRecord r;
  r.editor_id = editor_id;
  r.date = day;
  r.n_reviews = static_cast<std::uint32_t>(reviews.size());

  const auto week = iso_week_index(day);
  if (history.reviews == 0) history.first_week = week;
  history.reviews += reviews.size();

  double size = 0, links = 0, repeated = 0, reverted = 0, bad = 0, ins = 0, del = 0;
  double pol_ins = 0, pol_del = 0;
  OresScores ores_sum;
  for (const auto* e : reviews) {
    history.articles.insert(e->article);
    r.bot_flag = r.bot_flag || e->bot_flag;
    r.editor_is_creator = r.editor_is_creator || e->editor_is_creator;
    r.revert_label = r.revert_label || e->revert_flag;
    size += static_cast<double>(e->revision_size);
    links += static_cast<double>(e->n_links);
    repeated += static_cast<double>(e->n_repeated_links);
    reverted += static_cast<double>(e->n_reverted_words);
    bad += static_cast<double>(e->n_bad_words);
    ins += static_cast<double>(e->n_inserted_chars);
    del += static_cast<double>(e->n_deleted_chars);
    pol_ins += e->polarity_inserted;
    pol_del += e->polarity_deleted;
    for (std::size_t i = 0; i < OresScores::kSize; ++i) ores_sum.at(i) += e->ores.at(i);
    add_counts(r.inserted_ngrams, vectorize(split_tokens(e->inserted_text), vocab));
    add_counts(r.deleted_ngrams, vectorize(split_tokens(e->deleted_text), vocab));
  }

  const double n = static_cast<double>(reviews.size());
  r.avg_revision_size = size / n;
  r.avg_links = links / n;
  r.avg_repeated_links = repeated / n;
  r.avg_reverted_words = reverted / n;
  r.avg_bad_words = bad / n;
  r.avg_inserted_chars = ins / n;
  r.avg_deleted_chars = del / n;
  r.avg_polarity_inserted = pol_ins / n;
  r.avg_polarity_deleted = pol_del / n;
  for (std::size_t i = 0; i < OresScores::kSize; ++i) {
    r.avg_ores.at(i) = std::clamp(ores_sum.at(i) / n, 0.0, 1.0);
  }

  const double weeks = static_cast<double>(std::max<std::int64_t>(1, week - history.first_week + 1));
  const double articles = static_cast<double>(std::max<std::size_t>(1, history.articles.size()));
  const double total = static_cast<double>(history.reviews);
  r.avg_revisions_per_article = total / articles;
  r.avg_revisions_per_week = total / weeks;
  r.avg_articles_per_week = static_cast<double>(history.articles.size()) / weeks;
  return r;
}

}  // namespace

std::vector<DailyRecord> aggregate_daily(std::vector<ReviewEvent> events,
                                         const NgramVocabulary& vocab) {
  std::stable_sort(events.begin(), events.end(),
                   [](const ReviewEvent& a, const ReviewEvent& b) { return a.date < b.date; });

  std::vector<DailyRecord> out;
  std::unordered_map<std::string, EditorHistory> histories;
  std::size_t i = 0;
  while (i < events.size()) {
    const Day day = std::chrono::floor<std::chrono::days>(events[i].date);
    std::map<std::string, std::vector<const ReviewEvent*>> by_editor;
    while (i < events.size() && std::chrono::floor<std::chrono::days>(events[i].date) == day) {
      by_editor[events[i].editor.id].push_back(&events[i]);
      ++i;
    }
    for (auto& [editor, reviews] : by_editor) {
      out.push_back(fold_day(editor, day, reviews, histories[editor], vocab));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::string format_sparse_counts(const SparseCounts& counts) {
  std::string out;
  for (const auto& [k, v] : counts) {
    if (!out.empty()) out.push_back('|');
    out += std::to_string(k);
    out.push_back(':');
    out += std::to_string(v);
  }
  return out;
}

SparseCounts parse_sparse_counts(std::string_view text) {
  SparseCounts counts;
  while (!text.empty()) {
    const auto bar = text.find('|');
    const auto item = text.substr(0, bar);
    const auto colon = item.find(':');
    std::uint32_t k = 0, v = 0;
    if (colon == std::string_view::npos ||
        std::from_chars(item.data(), item.data() + colon, k).ec != std::errc{} ||
        std::from_chars(item.data() + colon + 1, item.data() + item.size(), v).ec !=
            std::errc{}) {
      throw DataError("malformed sparse count entry: " + std::string(item));
    }
    counts[k] = v;
    if (bar == std::string_view::npos) break;
    text.remove_prefix(bar + 1);
  }
  return counts;
}

namespace {

json counts_to_json(const SparseCounts& counts) {
  json j = json::object();
  for (const auto& [k, v] : counts) j[std::to_string(k)] = v;
  return j;
}

SparseCounts counts_from_json(const json& j) {
  SparseCounts counts;
  for (const auto& [k, v] : j.items()) {
    std::uint32_t key = 0;
    if (std::from_chars(k.data(), k.data() + k.size(), key).ec != std::errc{}) {
      throw DataError("n-gram key is not a column index: " + k);
    }
    counts[key] = v.get<std::uint32_t>();
  }
  return counts;
}

}  // namespace

json to_json(const DailyRecord& r) {
  return json{
      {"editor_id", r.editor_id},
      {"date", format_day(r.date)},
      {"bot_flag", r.bot_flag},
      {"editor_is_creator", r.editor_is_creator},
      {"avg_revisions_per_article", r.avg_revisions_per_article},
      {"avg_revisions_per_week", r.avg_revisions_per_week},
      {"avg_articles_per_week", r.avg_articles_per_week},
      {"avg_ores_edit_quality", r.avg_ores.edit_quality},
      {"avg_ores_item_quality", r.avg_ores.item_quality},
      {"avg_ores_article_quality", r.avg_ores.article_quality},
      {"avg_ores_wp10", r.avg_ores.wp10},
      {"avg_revision_size", r.avg_revision_size},
      {"avg_links", r.avg_links},
      {"avg_repeated_links", r.avg_repeated_links},
      {"avg_reverted_words", r.avg_reverted_words},
      {"avg_bad_words", r.avg_bad_words},
      {"avg_inserted_chars", r.avg_inserted_chars},
      {"avg_deleted_chars", r.avg_deleted_chars},
      {"avg_polarity_inserted", r.avg_polarity_inserted},
      {"avg_polarity_deleted", r.avg_polarity_deleted},
      {"inserted_ngrams", counts_to_json(r.inserted_ngrams)},
      {"deleted_ngrams", counts_to_json(r.deleted_ngrams)},
      {"revert_label", r.revert_label},
      {"synthetic", r.synthetic},
      {"n_reviews", r.n_reviews},
  };
}

DailyRecord daily_record_from_json(const json& j) {
  try {
    DailyRecord r;
    r.editor_id = j.at("editor_id").get<std::string>();
    const auto day = parse_day(j.at("date").get<std::string>());
    if (!day) throw DataError("bad date in daily record");
    r.date = *day;
    r.bot_flag = j.at("bot_flag").get<bool>();
    r.editor_is_creator = j.at("editor_is_creator").get<bool>();
    r.avg_revisions_per_article = j.at("avg_revisions_per_article").get<double>();
    r.avg_revisions_per_week = j.at("avg_revisions_per_week").get<double>();
    r.avg_articles_per_week = j.at("avg_articles_per_week").get<double>();
    r.avg_ores.edit_quality = j.at("avg_ores_edit_quality").get<std::array<double, 4>>();
    r.avg_ores.item_quality = j.at("avg_ores_item_quality").get<std::array<double, 5>>();
    r.avg_ores.article_quality = j.at("avg_ores_article_quality").get<std::array<double, 4>>();
    r.avg_ores.wp10 = j.at("avg_ores_wp10").get<std::array<double, 6>>();
    r.avg_revision_size = j.at("avg_revision_size").get<double>();
    r.avg_links = j.at("avg_links").get<double>();
    r.avg_repeated_links = j.at("avg_repeated_links").get<double>();
    r.avg_reverted_words = j.at("avg_reverted_words").get<double>();
    r.avg_bad_words = j.at("avg_bad_words").get<double>();
    r.avg_inserted_chars = j.at("avg_inserted_chars").get<double>();
    r.avg_deleted_chars = j.at("avg_deleted_chars").get<double>();
    r.avg_polarity_inserted = j.at("avg_polarity_inserted").get<double>();
    r.avg_polarity_deleted = j.at("avg_polarity_deleted").get<double>();
    r.inserted_ngrams = counts_from_json(j.at("inserted_ngrams"));
    r.deleted_ngrams = counts_from_json(j.at("deleted_ngrams"));
    r.revert_label = j.at("revert_label").get<bool>();
    r.synthetic = j.value("synthetic", false);
    r.n_reviews = j.value("n_reviews", 0U);
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed daily record: ") + e.what());
  }
}

std::string serialize_record(const DailyRecord& record) { return to_json(record).dump(); }

void write_records_jsonl(std::ostream& out, const std::vector<DailyRecord>& records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

void write_records_jsonl(const std::filesystem::path& path,
                         const std::vector<DailyRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_records_jsonl(out, records);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<DailyRecord> read_records_jsonl(std::istream& in) {
  std::vector<DailyRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(daily_record_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<DailyRecord> read_records_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_records_jsonl(in);
}

std::string csv_header() {
  std::string h = "editor_id,date";
  for (const auto name : dense_feature_names()) {
    h.push_back(',');
    h += name;
  }
  h += ",inserted_ngrams,deleted_ngrams,revert_label,synthetic,n_reviews";
  return h;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string to_csv_row(const DailyRecord& r) {
  std::string row = csv_escape(r.editor_id) + "," + format_day(r.date);
  for (double v : dense_features(r)) {
    row.push_back(',');
    row += format_double(v);
  }
  row += "," + format_sparse_counts(r.inserted_ngrams) + "," +
         format_sparse_counts(r.deleted_ngrams) + "," + (r.revert_label ? "1" : "0") + "," +
         (r.synthetic ? "1" : "0") + "," + std::to_string(r.n_reviews);
  return row;
}

void write_records_csv(const std::filesystem::path& path,
                       const std::vector<DailyRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << csv_header() << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
}

}  // namespace revstream
