#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "revstream/data_model.hpp"

namespace revstream {

using Tokens = std::vector<std::string>;

/// Set of lowercase tokens (stopwords, bad words, commonly reverted words).
class WordList {
 public:
  WordList() = default;
  explicit WordList(std::span<const std::string> tokens);
  WordList(std::initializer_list<std::string> tokens);

  /// One token per line; `#` starts a comment. Tokens are lowercased.
  static WordList load(const std::filesystem::path& path);

  bool contains(std::string_view token) const;
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

 private:
  void insert(std::string token);

  std::unordered_set<std::string> tokens_;
};

/// Token polarity lexicon, values in [-1, 1].
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::initializer_list<std::pair<const std::string, double>> entries);

  /// UTF-8 TSV, `token<TAB>polarity` per line.
  static Lexicon load(const std::filesystem::path& path);

  void add(std::string token, double polarity);
  std::optional<double> find(std::string_view token) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, double> entries_;
};

/// Lowercase, strip URLs, fold accents to ASCII, replace anything outside
/// [a-z0-9] with whitespace, split, drop stopwords.
Tokens normalize_text(std::string_view raw, const WordList& stopwords);

std::string join_tokens(std::span<const std::string> tokens);
Tokens split_tokens(std::string_view text);

/// Mean polarity of the tokens found in the lexicon; 0 when none match.
double polarity(std::span<const std::string> tokens, const Lexicon& lexicon);

std::size_t count_wordlist(std::span<const std::string> tokens, const WordList& list);

struct NgramConfig {
  std::size_t word_min_n = 1;
  std::size_t word_max_n = 4;
  std::size_t char_min_n = 1;
  std::size_t char_max_n = 4;
  double min_df = 0.001;
  double max_df = 0.7;
  std::size_t max_features = 0;  // 0 keeps everything

  friend bool operator==(const NgramConfig&, const NgramConfig&) = default;
};

/// Word n-grams are space-joined tokens; char n-grams are taken over the
/// space-joined token string.
std::vector<std::string> word_ngrams(std::span<const std::string> tokens, std::size_t min_n,
                                     std::size_t max_n);
std::vector<std::string> char_ngrams(std::string_view text, std::size_t min_n,
                                     std::size_t max_n);

/// Column space: word n-grams first, then char n-grams; each block sorted
/// lexicographically.
class NgramVocabulary {
 public:
  NgramVocabulary() = default;

  const NgramConfig& config() const { return config_; }
  std::size_t size() const { return word_terms_.size() + char_terms_.size(); }
  std::size_t word_count() const { return word_terms_.size(); }
  std::size_t char_count() const { return char_terms_.size(); }
  bool empty() const { return size() == 0; }

  std::optional<std::uint32_t> word_index(std::string_view ngram) const;
  std::optional<std::uint32_t> char_index(std::string_view ngram) const;

  /// The n-gram text of a column.
  const std::string& term(std::uint32_t column) const;
  bool is_word_column(std::uint32_t column) const { return column < word_terms_.size(); }

  nlohmann::json to_json() const;
  static NgramVocabulary from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static NgramVocabulary load(const std::filesystem::path& path);

  friend NgramVocabulary fit_ngram_vocabulary(std::span<const Tokens> documents,
                                              const NgramConfig& config);

 private:
  void build(std::vector<std::string> words, std::vector<std::string> chars,
             const NgramConfig& config);

  NgramConfig config_;
  std::vector<std::string> word_terms_;
  std::vector<std::string> char_terms_;
  std::unordered_map<std::string, std::uint32_t> word_lookup_;
  std::unordered_map<std::string, std::uint32_t> char_lookup_;
};

/// Keeps n-grams whose document frequency ratio lies in [min_df, max_df].
/// Throws InvalidArgument on an empty corpus.
NgramVocabulary fit_ngram_vocabulary(std::span<const Tokens> documents,
                                     const NgramConfig& config);

/// Counts of in-vocabulary n-grams; everything else is ignored.
SparseCounts vectorize(std::span<const std::string> tokens, const NgramVocabulary& vocab);

}  // namespace revstream
