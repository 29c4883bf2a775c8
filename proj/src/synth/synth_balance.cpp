#include "revstream/synth/synth_balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "revstream/error.hpp"
#include "revstream/random.hpp"

namespace revstream {

namespace {

double quantile_sorted(const std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

Interval interval_of(const QuartileStats& s, std::size_t r) {
  switch (r) {
    case 0: return {s.min, s.q1};
    case 1: return {s.q1, s.median};
    case 2: return {s.median, s.q3};
    default: return {s.q3, s.max};
  }
}

constexpr const char* kIntervalNames[] = {"min-Q1", "Q1-median", "median-Q3", "Q3-max"};

template <class T>
const T& pick(const std::vector<T>& pool, Rng& rng) {
  return pool[static_cast<std::size_t>(rng.index(pool.size()))];
}

}  // namespace

QuartileStats quartile_stats(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("quartile_stats: empty input");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return {v.front(), quantile_sorted(v, 0.25), quantile_sorted(v, 0.5), quantile_sorted(v, 0.75),
          v.back()};
}

KMeansResult kmeans_1d(std::span<const double> values, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw InvalidArgument("kmeans_1d: k must be positive");
  if (values.size() < k) throw InvalidArgument("kmeans_1d: fewer values than clusters");

  std::vector<double> distinct(values.begin(), values.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  k = std::min(k, distinct.size());

  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.index(distinct.size() - i));
    std::swap(distinct[i], distinct[j]);
  }
  std::vector<double> c(distinct.begin(), distinct.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(c.begin(), c.end());

  const std::size_t n = values.size();
  std::vector<std::size_t> assign(n, 0);
  std::vector<std::size_t> size(k, 0);

  auto nearest = [&](double x) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      if (std::abs(x - c[j]) < std::abs(x - c[best])) best = j;
    }
    return best;
  };
  auto recompute = [&] {
    std::vector<double> sum(k, 0.0);
    std::fill(size.begin(), size.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[assign[i]] += values[i];
      ++size[assign[i]];
    }
    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (size[j] == 0) continue;  // an empty cluster keeps its centroid
      const double m = sum[j] / static_cast<double>(size[j]);
      shift = std::max(shift, std::abs(m - c[j]));
      c[j] = m;
    }
    return shift;
  };

  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t i = 0; i < n; ++i) assign[i] = nearest(values[i]);
    if (recompute() < 1e-9) break;
  }

  // Lloyd can stop where moving a single point still lowers the SSE.
  for (int pass = 0; pass < 1000; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = assign[i];
      if (size[a] <= 1) continue;
      const double x = values[i];
      const double na = static_cast<double>(size[a]);
      const double gain = na / (na - 1.0) * (x - c[a]) * (x - c[a]);
      std::size_t best = a;
      double best_cost = gain;
      for (std::size_t b = 0; b < k; ++b) {
        if (b == a) continue;
        const double nb = static_cast<double>(size[b]);
        const double cost = size[b] == 0 ? 0.0 : nb / (nb + 1.0) * (x - c[b]) * (x - c[b]);
        if (cost < best_cost - 1e-12 * std::max(1.0, gain)) {
          best = b;
          best_cost = cost;
        }
      }
      if (best == a) continue;
      assign[i] = best;
      recompute();
      moved = true;
    }
    if (!moved) break;
  }

  // Drop empty clusters and order by centroid.
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < k; ++j) {
    if (size[j] > 0) order.push_back(j);
  }
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return c[a] < c[b]; });
  std::vector<std::size_t> remap(k, 0);
  KMeansResult out;
  for (std::size_t j = 0; j < order.size(); ++j) {
    remap[order[j]] = j;
    out.centroids.push_back(c[order[j]]);
    out.sizes.push_back(size[order[j]]);
  }
  out.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.assignment[i] = remap[assign[i]];
    const double d = values[i] - out.centroids[out.assignment[i]];
    out.sse += d * d;
  }
  return out;
}

bool is_hashmap_slot(std::size_t slot) {
  return slot == 0 || slot == 1 || slot == kSlotBadWords;
}

SynthResult generate_reverts(std::span<const DailyRecord> originals, const SynthConfig& config) {
  if (config.k == 0) throw InvalidArgument("synthetic generation: k must be positive");
  std::vector<DenseFeatures> dense;
  std::vector<const DailyRecord*> reverts;
  for (const auto& r : originals) {
    if (!r.revert_label) continue;
    reverts.push_back(&r);
    dense.push_back(dense_features(r));
  }
  if (reverts.empty()) throw InvalidArgument("synthetic generation needs revert records");

  SynthResult out;
  if (config.count == 0) return out;

  auto [first_day, last_day] = config.date_range.value_or(std::pair<Day, Day>{});
  if (!config.date_range) {
    const auto [lo, hi] = std::minmax_element(
        originals.begin(), originals.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
    first_day = lo->date;
    last_day = hi->date;
  }
  if (last_day < first_day) throw InvalidArgument("synthetic date range ends before it starts");
  const auto n_days = static_cast<std::uint64_t>((last_day - first_day).count()) + 1;

  const std::size_t n = reverts.size();
  std::array<QuartileStats, kDenseWidth> stats;
  std::array<std::vector<double>, kDenseWidth> columns;
  for (std::size_t f = 0; f < kDenseWidth; ++f) {
    columns[f].reserve(n);
    for (const auto& d : dense) columns[f].push_back(d[f]);
    stats[f] = quartile_stats(columns[f]);
  }

  std::array<std::size_t, 4> per_interval{};
  if (config.count < 4) {
    per_interval[0] = config.count;
    out.notes.push_back("count " + std::to_string(config.count) +
                        " < 4: all samples drawn from the first interval");
  } else {
    for (std::size_t r = 0; r < 4; ++r) {
      per_interval[r] = config.count / 4 + (r < config.count % 4 ? 1 : 0);
    }
  }

  const auto names = dense_feature_names();
  for (std::size_t r = 0; r < 4; ++r) {
    if (per_interval[r] == 0) continue;

    // Sampling ranges for the numeric slots: the inter-quartile span of the
    // largest 1-D cluster among values inside the slot's own interval.
    std::array<Interval, kDenseWidth> ranges{};
    for (std::size_t f = 0; f < kDenseWidth; ++f) {
      if (is_hashmap_slot(f)) continue;
      const Interval iv = interval_of(stats[f], r);
      std::vector<double> subset;
      for (double v : columns[f]) {
        if (iv.contains(v)) subset.push_back(v);
      }
      if (subset.empty()) {
        subset = columns[f];
        out.notes.push_back(std::string(names[f]) + ": no values in interval " +
                            kIntervalNames[r] + ", using all reverts");
      }
      const std::uint64_t kseed = derive_seed(derive_seed(config.seed, "kmeans"), r * kDenseWidth + f);
      const auto km = kmeans_1d(subset, std::min(config.k, subset.size()), kseed);
      std::size_t largest = 0;
      for (std::size_t j = 1; j < km.sizes.size(); ++j) {
        if (km.sizes[j] > km.sizes[largest]) largest = j;
      }
      std::vector<double> members;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        if (km.assignment[i] == largest) members.push_back(subset[i]);
      }
      const auto qs = quartile_stats(members);
      ranges[f] = {qs.q1, qs.q3};
    }

    // Observed-value pools come from the records inside the anchor interval.
    const Interval anchor = interval_of(stats[kSlotRevisionSize], r);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (anchor.contains(dense[i][kSlotRevisionSize])) rows.push_back(i);
    }
    if (rows.empty()) {
      rows.resize(n);
      std::iota(rows.begin(), rows.end(), 0);
      out.notes.push_back(std::string("anchor interval ") + kIntervalNames[r] +
                          " is empty, using all reverts");
    }
    std::set<std::string> editor_set;
    std::array<std::set<double>, kDenseWidth> value_sets;
    std::set<SparseCounts> inserted_set;
    std::set<SparseCounts> deleted_set;
    for (std::size_t i : rows) {
      editor_set.insert(reverts[i]->editor_id);
      for (std::size_t f = 0; f < kDenseWidth; ++f) {
        if (is_hashmap_slot(f)) value_sets[f].insert(dense[i][f]);
      }
      inserted_set.insert(reverts[i]->inserted_ngrams);
      deleted_set.insert(reverts[i]->deleted_ngrams);
    }
    const std::vector<std::string> editors(editor_set.begin(), editor_set.end());
    std::array<std::vector<double>, kDenseWidth> value_pools;
    for (std::size_t f = 0; f < kDenseWidth; ++f) {
      value_pools[f].assign(value_sets[f].begin(), value_sets[f].end());
    }
    const std::vector<SparseCounts> inserted_pool(inserted_set.begin(), inserted_set.end());
    const std::vector<SparseCounts> deleted_pool(deleted_set.begin(), deleted_set.end());

    Rng rng(derive_seed(derive_seed(config.seed, "sample"), r));
    for (std::size_t s = 0; s < per_interval[r]; ++s) {
      DailyRecord rec;
      rec.editor_id = pick(editors, rng);
      rec.date = first_day + std::chrono::days(static_cast<std::int64_t>(rng.index(n_days)));
      for (std::size_t f = 0; f < kDenseWidth; ++f) {
        const double v = is_hashmap_slot(f) ? pick(value_pools[f], rng)
                                            : rng.uniform(ranges[f].lo, ranges[f].hi);
        set_dense_feature(rec, f, v);
      }
      rec.inserted_ngrams = pick(inserted_pool, rng);
      rec.deleted_ngrams = pick(deleted_pool, rng);
      rec.revert_label = true;
      rec.synthetic = true;
      rec.n_reviews = 0;
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<DailyRecord> merge_balance(std::vector<DailyRecord> original,
                                       std::vector<DailyRecord> synthetic) {
  original.insert(original.end(), std::make_move_iterator(synthetic.begin()),
                  std::make_move_iterator(synthetic.end()));
  std::stable_sort(original.begin(), original.end(), [](const auto& a, const auto& b) {
    if (a.date != b.date) return a.date < b.date;
    if (a.editor_id != b.editor_id) return a.editor_id < b.editor_id;
    return a.synthetic < b.synthetic;
  });
  return original;
}

double relative_change_pct(double original, double synthetic) {
  const double denom = original == 0.0 ? 1.0 : std::abs(original);
  return std::abs(synthetic - original) / denom * 100.0;
}

std::vector<FidelityRow> fidelity_report(std::span<const DailyRecord> original_reverts,
                                         std::span<const DailyRecord> synthetic) {
  std::vector<FidelityRow> rows;
  if (original_reverts.empty() || synthetic.empty()) return rows;
  const auto names = dense_feature_names();
  for (std::size_t f = 0; f < kDenseWidth; ++f) {
    std::vector<double> o;
    std::vector<double> s;
    for (const auto& r : original_reverts) o.push_back(dense_features(r)[f]);
    for (const auto& r : synthetic) s.push_back(dense_features(r)[f]);
    const auto qo = quartile_stats(o);
    const auto qs = quartile_stats(s);
    const std::array<std::pair<double, double>, 3> pairs{
        {{qo.q1, qs.q1}, {qo.median, qs.median}, {qo.q3, qs.q3}}};
    for (std::size_t q = 0; q < 3; ++q) {
      rows.push_back({std::string(names[f]), "Q" + std::to_string(q + 1), pairs[q].first,
                      pairs[q].second, relative_change_pct(pairs[q].first, pairs[q].second)});
    }
  }
  return rows;
}

std::string fidelity_csv(const std::vector<FidelityRow>& rows) {
  std::string out = "feature,quartile,original,synthetic,relative_change_pct\n";
  for (const auto& r : rows) {
    out += r.feature + ',' + r.quartile + ',' + format_double(r.original) + ',' +
           format_double(r.synthetic) + ',' + format_double(r.relative_change_pct) + '\n';
  }
  return out;
}

}  // namespace revstream
