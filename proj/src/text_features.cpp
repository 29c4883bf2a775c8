#include "revstream/text_features.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "revstream/error.hpp"

namespace revstream {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

struct FoldRange {
  char32_t first;
  char32_t last;
  const char* ascii;
};

// Latin-1 supplement and Latin Extended-A, already lowercased.
constexpr FoldRange kFoldTable[] = {
    {0x00C0, 0x00C5, "a"},  {0x00C6, 0x00C6, "ae"}, {0x00C7, 0x00C7, "c"},
    {0x00C8, 0x00CB, "e"},  {0x00CC, 0x00CF, "i"},  {0x00D0, 0x00D0, "d"},
    {0x00D1, 0x00D1, "n"},  {0x00D2, 0x00D6, "o"},  {0x00D8, 0x00D8, "o"},
    {0x00D9, 0x00DC, "u"},  {0x00DD, 0x00DD, "y"},  {0x00DE, 0x00DE, "th"},
    {0x00DF, 0x00DF, "ss"}, {0x00E0, 0x00E5, "a"},  {0x00E6, 0x00E6, "ae"},
    {0x00E7, 0x00E7, "c"},  {0x00E8, 0x00EB, "e"},  {0x00EC, 0x00EF, "i"},
    {0x00F0, 0x00F0, "d"},  {0x00F1, 0x00F1, "n"},  {0x00F2, 0x00F6, "o"},
    {0x00F8, 0x00F8, "o"},  {0x00F9, 0x00FC, "u"},  {0x00FD, 0x00FD, "y"},
    {0x00FE, 0x00FE, "th"}, {0x00FF, 0x00FF, "y"},  {0x0100, 0x0105, "a"},
    {0x0106, 0x010D, "c"},  {0x010E, 0x0111, "d"},  {0x0112, 0x011B, "e"},
    {0x011C, 0x0123, "g"},  {0x0124, 0x0127, "h"},  {0x0128, 0x0131, "i"},
    {0x0132, 0x0133, "ij"}, {0x0134, 0x0135, "j"},  {0x0136, 0x0138, "k"},
    {0x0139, 0x0142, "l"},  {0x0143, 0x014B, "n"},  {0x014C, 0x0151, "o"},
    {0x0152, 0x0153, "oe"}, {0x0154, 0x0159, "r"},  {0x015A, 0x0161, "s"},
    {0x0162, 0x0167, "t"},  {0x0168, 0x0173, "u"},  {0x0174, 0x0175, "w"},
    {0x0176, 0x0178, "y"},  {0x0179, 0x017E, "z"},  {0x017F, 0x017F, "s"},
};

const char* fold_code_point(char32_t cp) {
  for (const auto& r : kFoldTable) {
    if (cp >= r.first && cp <= r.last) return r.ascii;
  }
  return " ";
}

// Decodes UTF-8, folds accented Latin letters to ASCII and maps every other
// non-ASCII code point (or malformed byte) to a space.
std::string fold_to_ascii(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(static_cast<char>(b0));
      ++i;
      continue;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len != 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(' ');
      ++i;
      continue;
    }
    out += fold_code_point(cp);
    i += len;
  }
  return out;
}

const std::regex& url_pattern() {
  static const std::regex re(R"(([a-z][a-z0-9+.\-]*://|www\.)[^\s]*)");
  return re;
}

}  // namespace

// ---------------------------------------------------------------------------

WordList::WordList(std::span<const std::string> tokens) {
  for (const auto& t : tokens) insert(t);
}

WordList::WordList(std::initializer_list<std::string> tokens) {
  for (const auto& t : tokens) insert(t);
}

void WordList::insert(std::string token) {
  auto t = lowercase(trim(token));
  if (!t.empty()) tokens_.insert(std::move(t));
}

WordList WordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word list: " + path.string());
  WordList list;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    list.insert(std::string(view));
  }
  return list;
}

bool WordList::contains(std::string_view token) const {
  return tokens_.contains(std::string(token));
}

Lexicon::Lexicon(std::initializer_list<std::pair<const std::string, double>> entries) {
  for (const auto& [token, value] : entries) add(token, value);
}

void Lexicon::add(std::string token, double polarity) {
  if (!(polarity >= -1.0 && polarity <= 1.0)) {
    throw InvalidArgument("lexicon polarity outside [-1, 1] for '" + token + "'");
  }
  auto t = lowercase(trim(token));
  if (t.empty() || t.find_first_of(" \t") != std::string::npos) {
    throw InvalidArgument("lexicon token must be non-empty and whitespace-free");
  }
  entries_[std::move(t)] = polarity;
}

std::optional<double> Lexicon::find(std::string_view token) const {
  const auto it = entries_.find(std::string(token));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon: " + path.string());
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected token<TAB>polarity");
    }
    double value = 0.0;
    try {
      value = std::stod(std::string(view.substr(tab + 1)));
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad polarity");
    }
    lex.add(std::string(view.substr(0, tab)), value);
  }
  return lex;
}

// ---------------------------------------------------------------------------

Tokens normalize_text(std::string_view raw, const WordList& stopwords) {
  std::string text = lowercase(fold_to_ascii(raw));
  text = std::regex_replace(text, url_pattern(), " ");
  for (char& c : text) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (!alnum) c = ' ';
  }
  Tokens tokens;
  for (auto& t : split_tokens(text)) {
    if (!stopwords.contains(t)) tokens.push_back(std::move(t));
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Tokens split_tokens(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

double polarity(std::span<const std::string> tokens, const Lexicon& lexicon) {
  double sum = 0.0;
  std::size_t matched = 0;
  for (const auto& t : tokens) {
    if (const auto p = lexicon.find(t)) {
      sum += *p;
      ++matched;
    }
  }
  return matched == 0 ? 0.0 : sum / static_cast<double>(matched);
}

std::size_t count_wordlist(std::span<const std::string> tokens, const WordList& list) {
  return static_cast<std::size_t>(std::count_if(
      tokens.begin(), tokens.end(), [&](const std::string& t) { return list.contains(t); }));
}

std::vector<std::string> word_ngrams(std::span<const std::string> tokens, std::size_t min_n,
                                     std::size_t max_n) {
  std::vector<std::string> out;
  for (std::size_t n = std::max<std::size_t>(min_n, 1); n <= max_n; ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      out.push_back(join_tokens(tokens.subspan(i, n)));
    }
  }
  return out;
}

std::vector<std::string> char_ngrams(std::string_view text, std::size_t min_n, std::size_t max_n) {
  std::vector<std::string> out;
  for (std::size_t n = std::max<std::size_t>(min_n, 1); n <= max_n; ++n) {
    for (std::size_t i = 0; i + n <= text.size(); ++i) out.emplace_back(text.substr(i, n));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::optional<std::uint32_t> NgramVocabulary::word_index(std::string_view ngram) const {
  const auto it = word_lookup_.find(std::string(ngram));
  if (it == word_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> NgramVocabulary::char_index(std::string_view ngram) const {
  const auto it = char_lookup_.find(std::string(ngram));
  if (it == char_lookup_.end()) return std::nullopt;
  return it->second;
}

const std::string& NgramVocabulary::term(std::uint32_t column) const {
  if (column < word_terms_.size()) return word_terms_[column];
  const auto c = column - word_terms_.size();
  if (c >= char_terms_.size()) throw InvalidArgument("vocabulary column out of range");
  return char_terms_[c];
}

void NgramVocabulary::build(std::vector<std::string> words, std::vector<std::string> chars,
                            const NgramConfig& config) {
  std::sort(words.begin(), words.end());
  std::sort(chars.begin(), chars.end());
  config_ = config;
  word_terms_ = std::move(words);
  char_terms_ = std::move(chars);
  word_lookup_.clear();
  char_lookup_.clear();
  for (std::size_t i = 0; i < word_terms_.size(); ++i) {
    word_lookup_.emplace(word_terms_[i], static_cast<std::uint32_t>(i));
  }
  const auto offset = word_terms_.size();
  for (std::size_t i = 0; i < char_terms_.size(); ++i) {
    char_lookup_.emplace(char_terms_[i], static_cast<std::uint32_t>(offset + i));
  }
}

nlohmann::json NgramVocabulary::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["config"] = {{"word_ngram_range", {config_.word_min_n, config_.word_max_n}},
                 {"char_ngram_range", {config_.char_min_n, config_.char_max_n}},
                 {"min_df", config_.min_df},
                 {"max_df", config_.max_df},
                 {"max_features", config_.max_features}};
  auto words = nlohmann::json::object();
  for (std::size_t i = 0; i < word_terms_.size(); ++i) words[word_terms_[i]] = i;
  auto chars = nlohmann::json::object();
  for (std::size_t i = 0; i < char_terms_.size(); ++i) {
    chars[char_terms_[i]] = word_terms_.size() + i;
  }
  j["word_ngrams"] = std::move(words);
  j["char_ngrams"] = std::move(chars);
  return j;
}

NgramVocabulary NgramVocabulary::from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != 1) throw DataError("unsupported vocabulary version");
    NgramConfig cfg;
    const auto& c = j.at("config");
    cfg.word_min_n = c.at("word_ngram_range").at(0).get<std::size_t>();
    cfg.word_max_n = c.at("word_ngram_range").at(1).get<std::size_t>();
    cfg.char_min_n = c.at("char_ngram_range").at(0).get<std::size_t>();
    cfg.char_max_n = c.at("char_ngram_range").at(1).get<std::size_t>();
    cfg.min_df = c.at("min_df").get<double>();
    cfg.max_df = c.at("max_df").get<double>();
    cfg.max_features = c.at("max_features").get<std::size_t>();
    std::vector<std::string> words;
    std::vector<std::string> chars;
    for (const auto& [k, v] : j.at("word_ngrams").items()) words.push_back(k);
    for (const auto& [k, v] : j.at("char_ngrams").items()) chars.push_back(k);
    NgramVocabulary vocab;
    vocab.build(std::move(words), std::move(chars), cfg);
    // Indices are implied by the sort order; reject files that disagree.
    for (const auto& [k, v] : j.at("word_ngrams").items()) {
      if (vocab.word_index(k) != v.get<std::uint32_t>()) throw DataError("vocabulary index mismatch");
    }
    for (const auto& [k, v] : j.at("char_ngrams").items()) {
      if (vocab.char_index(k) != v.get<std::uint32_t>()) throw DataError("vocabulary index mismatch");
    }
    return vocab;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed vocabulary: ") + e.what());
  }
}

void NgramVocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary: " + path.string());
  out << to_json().dump(1) << '\n';
}

NgramVocabulary NgramVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary: " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("malformed vocabulary " + path.string() + ": " + e.what());
  }
}

NgramVocabulary fit_ngram_vocabulary(std::span<const Tokens> documents, const NgramConfig& config) {
  if (documents.empty()) throw InvalidArgument("cannot fit a vocabulary on an empty corpus");
  if (config.word_min_n > config.word_max_n || config.char_min_n > config.char_max_n) {
    throw InvalidArgument("n-gram range must satisfy min <= max");
  }
  if (!(config.min_df >= 0.0 && config.max_df <= 1.0 && config.min_df <= config.max_df)) {
    throw InvalidArgument("document-frequency bounds must satisfy 0 <= min_df <= max_df <= 1");
  }

  struct Stat {
    std::size_t df = 0;
    std::size_t tf = 0;
  };
  std::unordered_map<std::string, Stat> word_stats;
  std::unordered_map<std::string, Stat> char_stats;

  auto accumulate = [](std::unordered_map<std::string, Stat>& stats,
                       std::vector<std::string> grams) {
    std::unordered_set<std::string> seen;
    for (auto& g : grams) {
      auto& s = stats[g];
      ++s.tf;
      if (seen.insert(std::move(g)).second) ++s.df;
    }
  };

  for (const auto& doc : documents) {
    accumulate(word_stats, word_ngrams(doc, config.word_min_n, config.word_max_n));
    if (config.char_max_n > 0) {
      accumulate(char_stats, char_ngrams(join_tokens(doc), config.char_min_n, config.char_max_n));
    }
  }

  const auto n_docs = static_cast<double>(documents.size());
  auto keep = [&](const Stat& s) {
    const double ratio = static_cast<double>(s.df) / n_docs;
    return ratio >= config.min_df && ratio <= config.max_df;
  };

  struct Candidate {
    std::string term;
    std::size_t tf;
    bool word;
  };
  std::vector<Candidate> kept;
  for (auto& [term, s] : word_stats) {
    if (keep(s)) kept.push_back({term, s.tf, true});
  }
  for (auto& [term, s] : char_stats) {
    if (keep(s)) kept.push_back({term, s.tf, false});
  }

  if (config.max_features > 0 && kept.size() > config.max_features) {
    std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
      if (a.tf != b.tf) return a.tf > b.tf;
      if (a.word != b.word) return a.word;
      return a.term < b.term;
    });
    kept.resize(config.max_features);
  }

  std::vector<std::string> words;
  std::vector<std::string> chars;
  for (auto& c : kept) (c.word ? words : chars).push_back(std::move(c.term));

  NgramVocabulary vocab;
  vocab.build(std::move(words), std::move(chars), config);
  return vocab;
}

SparseCounts vectorize(std::span<const std::string> tokens, const NgramVocabulary& vocab) {
  SparseCounts counts;
  if (vocab.empty() || tokens.empty()) return counts;
  const auto& cfg = vocab.config();
  for (const auto& g : word_ngrams(tokens, cfg.word_min_n, cfg.word_max_n)) {
    if (const auto idx = vocab.word_index(g)) ++counts[*idx];
  }
  if (cfg.char_max_n > 0) {
    for (const auto& g : char_ngrams(join_tokens(tokens), cfg.char_min_n, cfg.char_max_n)) {
      if (const auto idx = vocab.char_index(g)) ++counts[*idx];
    }
  }
  return counts;
}

}  // namespace revstream
