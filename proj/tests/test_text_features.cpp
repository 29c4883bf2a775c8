#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "revstream/error.hpp"
#include "revstream/text_features.hpp"
#include "support.hpp"

using namespace revstream;
using namespace revstream::testing;

namespace {

Tokens random_tokens(Rng& rng, std::size_t vocab, std::size_t max_len) {
  Tokens t;
  const auto n = rng.index(max_len + 1);
  for (std::uint64_t i = 0; i < n; ++i) t.push_back("w" + std::to_string(rng.index(vocab)));
  return t;
}

// Independent n-gram enumeration for the oracles below.
std::vector<std::string> naive_grams(const Tokens& doc, std::size_t wmax, std::size_t cmax) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    std::string g;
    for (std::size_t n = 1; n <= wmax && i + n <= doc.size(); ++n) {
      g += (n > 1 ? " " : "") + doc[i + n - 1];
      out.push_back("W:" + g);
    }
  }
  std::string s;
  for (const auto& t : doc) s += (s.empty() ? "" : " ") + t;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t n = 1; n <= cmax && i + n <= s.size(); ++n) out.push_back("C:" + s.substr(i, n));
  }
  return out;
}

}  // namespace

TEST_CASE("normalize_text examples") {
  CHECK(normalize_text("", WordList{}).empty());
  CHECK(normalize_text("Visit https://x.y NOW, café!", WordList{"now"}) == Tokens{"visit", "cafe"});
  CHECK(normalize_text("see www.example.org/page?x=1 and ÉCOLE", WordList{"and"}) ==
        Tokens{"see", "ecole"});
  CHECK(normalize_text("Zürich—Ångström", WordList{}) == Tokens{"zurich", "angstrom"});
}

TEST_CASE("property: normalize_text output alphabet, stopwords, idempotence") {
  Rng rng(21);
  const WordList stop{"the", "a", "of"};
  const std::string alphabet = "abcXYZ019 .,:/-_!?éüñ THE the a of http://q.r www.s.t ";
  for (int i = 0; i < 300; ++i) {
    std::string raw;
    const auto n = rng.index(60);
    for (std::uint64_t k = 0; k < n; ++k) raw += alphabet[rng.index(alphabet.size())];
    const auto toks = normalize_text(raw, stop);
    for (const auto& t : toks) {
      CHECK_FALSE(t.empty());
      CHECK_FALSE(stop.contains(t));
      CHECK(std::all_of(t.begin(), t.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
      }));
    }
    CHECK(normalize_text(join_tokens(toks), stop) == toks);
  }
}

TEST_CASE("polarity examples and bounds") {
  const Lexicon lex{{"good", 0.7}, {"bad", -0.7}, {"great", 0.9}};
  CHECK(polarity(Tokens{}, lex) == 0.0);
  CHECK(polarity(Tokens{"good"}, lex) == 0.7);
  CHECK(polarity(Tokens{"good", "bad", "xyz"}, lex) == 0.0);
  CHECK(polarity(Tokens{"xyz"}, lex) == 0.0);

  Rng rng(22);
  const Tokens pool = {"good", "bad", "great", "meh", "ok"};
  for (int i = 0; i < 200; ++i) {
    Tokens t;
    for (auto n = rng.index(8); n > 0; --n) t.push_back(pool[rng.index(pool.size())]);
    double lo = 1, hi = -1;
    for (const auto& w : t) {
      if (auto p = lex.find(w)) {
        lo = std::min(lo, *p);
        hi = std::max(hi, *p);
      }
    }
    const double p = polarity(t, lex);
    if (lo <= hi) {
      CHECK(p >= lo - 1e-12);
      CHECK(p <= hi + 1e-12);
    } else {
      CHECK(p == 0.0);
    }
  }
  Lexicon bad;
  CHECK_THROWS_AS(bad.add("x", 1.5), InvalidArgument);
}

TEST_CASE("count_wordlist") {
  const WordList list{"spam"};
  CHECK(count_wordlist(Tokens{}, list) == 0);
  CHECK(count_wordlist(Tokens{"spam", "spam", "hi"}, list) == 2);
  Rng rng(23);
  const WordList l2{"w1", "w3"};
  for (int i = 0; i < 100; ++i) {
    const auto t = random_tokens(rng, 5, 20);
    std::size_t naive = 0;
    for (const auto& w : t) naive += (w == "w1" || w == "w3");
    CHECK(count_wordlist(t, l2) == naive);
  }
}

TEST_CASE("word and char lists load from files") {
  const auto dir = temp_dir("wordlists");
  write_file(dir / "bad.txt", "# comment\nSpam\n\n  idiot  \n");
  write_file(dir / "lex.tsv", "good\t0.5\nbad\t-0.25\n");
  write_file(dir / "lex_bad.tsv", "good\tnope\n");
  const auto wl = WordList::load(dir / "bad.txt");
  CHECK(wl.size() == 2);
  CHECK(wl.contains("spam"));
  CHECK(wl.contains("idiot"));
  const auto lex = Lexicon::load(dir / "lex.tsv");
  CHECK(lex.find("bad") == -0.25);
  CHECK_THROWS_AS(Lexicon::load(dir / "lex_bad.tsv"), DataError);
  CHECK_THROWS_AS(WordList::load(dir / "missing.txt"), IoError);
}

TEST_CASE("fit_ngram_vocabulary examples") {
  NgramConfig all;
  all.min_df = 0.0;
  all.max_df = 1.0;
  const std::vector<Tokens> one = {{"ab", "c"}};
  const auto v = fit_ngram_vocabulary(one, all);
  // word: ab, c, "ab c"; chars of "ab c": 4 + 3 + 2 + 1 distinct substrings
  CHECK(v.word_count() == 3);
  CHECK(v.char_count() == 10);

  std::vector<Tokens> ten(10, Tokens{"everywhere"});
  ten[0].push_back("rare");
  NgramConfig cfg;
  cfg.char_max_n = 0;
  cfg.char_min_n = 0;
  const auto v2 = fit_ngram_vocabulary(ten, cfg);
  CHECK_FALSE(v2.word_index("everywhere"));
  CHECK(v2.word_index("rare"));

  CHECK_THROWS_AS(fit_ngram_vocabulary(std::vector<Tokens>{}, cfg), InvalidArgument);
}

TEST_CASE("property: vocabulary equals a brute-force document-frequency count") {
  Rng rng(24);
  std::vector<Tokens> docs;
  for (int i = 0; i < 100; ++i) docs.push_back(random_tokens(rng, 12, 8));
  NgramConfig cfg;
  cfg.min_df = 0.03;
  cfg.max_df = 0.5;
  cfg.word_max_n = 3;
  cfg.char_max_n = 3;
  const auto vocab = fit_ngram_vocabulary(docs, cfg);

  std::map<std::string, int> df;
  for (const auto& d : docs) {
    const auto g = naive_grams(d, 3, 3);
    for (const auto& s : std::set<std::string>(g.begin(), g.end())) ++df[s];
  }
  std::vector<std::string> words, chars;
  for (const auto& [g, n] : df) {
    const double r = n / 100.0;
    if (r < 0.03 || r > 0.5) continue;
    (g[0] == 'W' ? words : chars).push_back(g.substr(2));
  }
  REQUIRE(vocab.word_count() == words.size());
  REQUIRE(vocab.char_count() == chars.size());
  for (std::size_t i = 0; i < words.size(); ++i) CHECK(vocab.term(std::uint32_t(i)) == words[i]);
  for (std::size_t i = 0; i < chars.size(); ++i) {
    CHECK(vocab.term(std::uint32_t(words.size() + i)) == chars[i]);
  }
  CHECK(vocab.is_word_column(0));
  CHECK_FALSE(vocab.is_word_column(std::uint32_t(words.size())));

  // same corpus, same indices
  const auto again = fit_ngram_vocabulary(docs, cfg);
  CHECK(again.to_json() == vocab.to_json());

  // vectorize counts every in-vocabulary occurrence and nothing else
  for (int i = 0; i < 50; ++i) {
    const auto t = random_tokens(rng, 14, 10);
    const auto counts = vectorize(t, vocab);
    std::size_t naive = 0;
    for (const auto& g : naive_grams(t, 3, 3)) {
      const bool word = g[0] == 'W';
      const auto idx = word ? vocab.word_index(g.substr(2)) : vocab.char_index(g.substr(2));
      naive += idx.has_value();
    }
    std::size_t sum = 0;
    for (const auto& [k, c] : counts) {
      CHECK(k < vocab.size());
      CHECK(c >= 1);
      sum += c;
    }
    CHECK(sum == naive);
  }
}

TEST_CASE("vectorize examples") {
  NgramConfig cfg;
  cfg.min_df = 0.0;
  cfg.max_df = 1.0;
  cfg.word_max_n = 1;
  cfg.char_max_n = 0;
  cfg.char_min_n = 0;
  const auto vocab = fit_ngram_vocabulary(std::vector<Tokens>{{"hotel", "wiki"}}, cfg);
  CHECK(vectorize(Tokens{}, vocab).empty());
  CHECK(vectorize(Tokens{"wiki"}, vocab) == SparseCounts{{*vocab.word_index("wiki"), 1}});
  CHECK(vectorize(Tokens{"unknown"}, vocab).empty());
}

TEST_CASE("max_features keeps the most frequent n-grams") {
  NgramConfig cfg;
  cfg.min_df = 0.0;
  cfg.max_df = 1.0;
  cfg.word_max_n = 1;
  cfg.char_max_n = 0;
  cfg.char_min_n = 0;
  cfg.max_features = 2;
  const std::vector<Tokens> docs = {{"a", "a", "b"}, {"a", "c", "c"}, {"d"}};
  const auto v = fit_ngram_vocabulary(docs, cfg);
  CHECK(v.size() == 2);
  CHECK(v.word_index("a"));
  CHECK(v.word_index("c"));
}

TEST_CASE("vocabulary persistence") {
  Rng rng(25);
  std::vector<Tokens> docs;
  for (int i = 0; i < 20; ++i) docs.push_back(random_tokens(rng, 6, 5));
  NgramConfig cfg;
  cfg.min_df = 0.0;
  const auto v = fit_ngram_vocabulary(docs, cfg);
  const auto dir = temp_dir("vocab");
  v.save(dir / "vocab.json");
  const auto back = NgramVocabulary::load(dir / "vocab.json");
  CHECK(back.to_json() == v.to_json());
  CHECK(back.config() == cfg);
  write_file(dir / "broken.json", "{\"version\": 1");
  CHECK_THROWS_AS(NgramVocabulary::load(dir / "broken.json"), DataError);
}
