#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revstream/data_model.hpp"
#include "revstream/error.hpp"
#include "revstream/metrics.hpp"
#include "revstream/online/profile.hpp"
#include "revstream/stream/model.hpp"

namespace revstream {

/// The trailing share of the stream that is scored.
struct EvalWindow {
  std::string name;
  unsigned percent = 100;

  /// First scored index for a stream of n records.
  std::size_t start(std::size_t n) const { return n - n * percent / 100; }

  /// "all", or "lastNN" with NN in 1..100.
  static EvalWindow parse(const std::string& text);
};

class UnsortedStreamError : public DataError {
 public:
  explicit UnsortedStreamError(std::size_t index);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

struct PrequentialConfig {
  std::size_t warmup = 1;
  std::vector<EvalWindow> windows{{"all", 100}};
  /// Keep every prediction (abstentions included) in the result.
  bool keep_trace = false;
};

struct WindowReport {
  EvalWindow window;
  ConfusionMatrix confusion;
  /// Empty when nothing was scored inside the window.
  std::optional<MetricsReport> metrics;
  std::size_t abstentions = 0;
};

struct PrequentialResult {
  std::size_t n_records = 0;
  std::vector<WindowReport> windows;
  std::vector<std::optional<Label>> trace;
  double seconds = 0.0;
};

/// Test-then-train over a date-sorted stream: each record updates its
/// editor's profile, the profile vector is predicted, scored, then learned.
/// Throws UnsortedStreamError at the first record dated before its
/// predecessor.
PrequentialResult prequential_run(std::span<const DailyRecord> stream, StreamModel& model,
                                  ProfileStore& profiles, std::size_t vocab_size,
                                  const PrequentialConfig& config = {});

/// Index of the first out-of-order record, if any.
std::optional<std::size_t> first_unsorted(std::span<const DailyRecord> stream);

}  // namespace revstream
