#include <doctest.h>

#include <sstream>

#include "revstream/error.hpp"
#include "revstream/online/profile.hpp"
#include "support.hpp"

using namespace revstream;
using namespace revstream::testing;

TEST_CASE("profile of one record reproduces the record") {
  Rng rng(61);
  const auto r = random_record(rng, ymd(2023, 3, 1), "alice", false, 5);
  EditorProfile p;
  p.editor_id = "alice";
  CHECK_FALSE(update_profile(p, r));
  const auto v = profile_feature_vector(p, 5);
  CHECK(v.dimension == 33 + 10);
  const auto d = dense_features(r);
  for (std::size_t f = 0; f < kDenseWidth; ++f) CHECK(v.dense[f] == d[f]);
  for (const auto& [col, c] : r.inserted_ngrams) CHECK(v.value(kDenseWidth + col) == double(c));
  for (const auto& [col, c] : r.deleted_ngrams) CHECK(v.value(kDenseWidth + 5 + col) == double(c));
}

TEST_CASE("running means: 2 then 4 gives 3") {
  Rng rng(62);
  auto a = random_record(rng, ymd(2023, 3, 1), "bob", false);
  auto b = random_record(rng, ymd(2023, 3, 2), "bob", true);
  b.bot_flag = a.bot_flag;
  b.editor_is_creator = a.editor_is_creator;
  a.avg_links = 2;
  b.avg_links = 4;
  EditorProfile p;
  p.editor_id = "bob";
  update_profile(p, a);
  update_profile(p, b);
  CHECK(profile_feature_vector(p, 0).dense[25] == doctest::Approx(3.0));
  CHECK(p.n_records == 2);
  CHECK(p.last_updated == ymd(2023, 3, 2));
}

TEST_CASE("property: profile equals batch aggregation over the editor's records") {
  Rng rng(63);
  for (int t = 0; t < 50; ++t) {
    const std::uint32_t vocab = 1 + std::uint32_t(rng.index(8));
    const std::size_t n = 1 + rng.index(30);
    std::vector<DailyRecord> recs;
    Day d = ymd(2023, 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      d += std::chrono::days(rng.index(3));
      auto r = random_record(rng, d, "e", rng.index(2) == 0, vocab);
      recs.push_back(r);
    }
    EditorProfile p;
    p.editor_id = "e";
    SparseCounts prev_ins;
    for (const auto& r : recs) {
      update_profile(p, r);
      // Maps only grow.
      for (const auto& [k, c] : prev_ins) CHECK(p.inserted_ngrams.at(k) >= c);
      prev_ins = p.inserted_ngrams;
    }
    const auto v = profile_feature_vector(p, vocab);
    CHECK(v.dense[0] == double(recs[0].bot_flag));
    CHECK(v.dense[1] == double(recs[0].editor_is_creator));
    for (std::size_t f = kStaticSlots; f < kDenseWidth; ++f) {
      double s = 0;
      for (const auto& r : recs) s += dense_features(r)[f];
      CHECK(close_rel(v.dense[f], s / double(n), 1e-12));
    }
    std::vector<double> ins(vocab, 0), del(vocab, 0);
    for (const auto& r : recs) {
      for (const auto& [k, c] : r.inserted_ngrams) ins[k] += c;
      for (const auto& [k, c] : r.deleted_ngrams) del[k] += c;
    }
    for (std::uint32_t k = 0; k < vocab; ++k) {
      CHECK(v.value(kDenseWidth + k) == ins[k]);
      CHECK(v.value(kDenseWidth + vocab + k) == del[k]);
    }
    // Replaying the same records into a fresh profile gives the same state.
    EditorProfile q;
    q.editor_id = "e";
    for (const auto& r : recs) update_profile(q, r);
    CHECK(q == p);
  }
}

TEST_CASE("profile errors and static conflicts") {
  Rng rng(64);
  EditorProfile p;
  p.editor_id = "x";
  CHECK_THROWS_AS(profile_feature_vector(p, 3), InvalidArgument);
  auto r = random_record(rng, ymd(2023, 5, 5), "x", false);
  r.inserted_ngrams[7] = 1;
  update_profile(p, r);
  CHECK_THROWS_AS(profile_feature_vector(p, 3), DataError);
  CHECK_THROWS_AS(update_profile(p, random_record(rng, ymd(2023, 5, 6), "y", false)), InvalidArgument);
  CHECK_THROWS_AS(update_profile(p, random_record(rng, ymd(2023, 5, 4), "x", false)), DataError);
  auto flip = random_record(rng, ymd(2023, 5, 6), "x", false);
  flip.bot_flag = !r.bot_flag;
  flip.editor_is_creator = r.editor_is_creator;
  CHECK(update_profile(p, flip));
  CHECK(p.bot_flag == r.bot_flag);
  CHECK(p.static_conflicts == 1);
}

TEST_CASE("profile store") {
  Rng rng(65);
  ProfileStore store;
  store.update(random_record(rng, ymd(2023, 1, 1), "b", false));
  store.update(random_record(rng, ymd(2023, 1, 1), "a", false));
  const auto& p = store.update(random_record(rng, ymd(2023, 1, 2), "b", true));
  CHECK(p.n_records == 2);
  CHECK(store.size() == 2);
  CHECK(store.find("zzz") == nullptr);
  std::ostringstream out;
  store.write_jsonl(out);
  const auto text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("\"a\"") < text.find("\"b\""));
}
