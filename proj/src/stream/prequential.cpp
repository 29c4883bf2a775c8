#include "revstream/stream/prequential.hpp"

#include <charconv>
#include <chrono>

namespace revstream {

EvalWindow EvalWindow::parse(const std::string& text) {
  if (text == "all") return {"all", 100};
  if (text.rfind("last", 0) == 0) {
    unsigned pct = 0;
    const char* b = text.data() + 4;
    const char* e = text.data() + text.size();
    const auto [p, ec] = std::from_chars(b, e, pct);
    if (ec == std::errc() && p == e && b != e && pct >= 1 && pct <= 100) return {text, pct};
  }
  throw InvalidArgument("unknown evaluation window '" + text + "' (expected all or lastNN)");
}

UnsortedStreamError::UnsortedStreamError(std::size_t index)
    : DataError("stream is not sorted by date at record " + std::to_string(index)),
      index_(index) {}

std::optional<std::size_t> first_unsorted(std::span<const DailyRecord> stream) {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].date < stream[i - 1].date) return i;
  }
  return std::nullopt;
}

PrequentialResult prequential_run(std::span<const DailyRecord> stream, StreamModel& model,
                                  ProfileStore& profiles, std::size_t vocab_size,
                                  const PrequentialConfig& config) {
  if (const auto bad = first_unsorted(stream)) throw UnsortedStreamError(*bad);
  const auto t0 = std::chrono::steady_clock::now();

  PrequentialResult out;
  const std::size_t n = stream.size();
  out.n_records = n;
  for (const auto& w : config.windows) out.windows.push_back({w, {}, std::nullopt, 0});
  if (config.keep_trace) out.trace.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = stream[i];
    const auto x = profile_feature_vector(profiles.update(rec), vocab_size);
    const auto predicted = model.predict(x);
    if (config.keep_trace) out.trace.push_back(predicted);
    if (i >= config.warmup) {
      for (auto& w : out.windows) {
        if (i < w.window.start(n)) continue;
        if (predicted) {
          w.confusion.add(rec.label(), *predicted);
        } else {
          ++w.abstentions;
        }
      }
    }
    model.learn(x, rec.label());
  }

  for (auto& w : out.windows) {
    if (w.confusion.total() > 0) w.metrics = compute_metrics(w.confusion);
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace revstream
