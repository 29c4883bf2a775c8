#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "revstream/text_features.hpp"

namespace revstream::cli {

/// Process exit statuses.
enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kUsage = 2,    // bad command line or config file
  kIo = 3,       // unreadable input or unwritable output
  kData = 4,     // malformed or unusable input data
  kArgument = 5, // parameter values rejected by a stage
};

struct Common {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
  bool quiet = false;
};

struct PreprocessOptions {
  Common common;
  std::filesystem::path events;
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> bad_words;
  std::optional<std::filesystem::path> reverted_words;
  std::optional<std::filesystem::path> lexicon;
  /// Reuse a fitted vocabulary instead of fitting one.
  std::optional<std::filesystem::path> vocab;
  NgramConfig ngrams;
};

struct AnalyzeOptions {
  Common common;
  std::filesystem::path records;
  /// Keep at most this many non-revert rows (0 keeps all).
  std::size_t subsample_nonrevert = 0;
  std::optional<double> threshold;
  std::size_t n_estimators = 500;
  std::size_t cv_folds = 0;
  std::string classifier = "rf";
  bool timing = false;
};

struct BalanceOptions {
  Common common;
  std::filesystem::path records;
  /// Defaults to the number of non-revert minus revert records.
  std::optional<std::size_t> count;
  std::size_t k = 2;
  std::optional<std::string> date_from;
  std::optional<std::string> date_to;
};

struct StreamOptions {
  Common common;
  std::filesystem::path records;
  std::filesystem::path vocab;
  std::string model = "arf";
  std::vector<std::string> eval_windows{"all"};
  std::size_t warmup = 1;
  std::size_t n_trees = 10;
  double poisson_lambda = 6.0;
  double grace_period = 200.0;
  double split_confidence = 1e-7;
  double tie_threshold = 0.05;
  std::optional<std::filesystem::path> checkpoint;
  bool write_profiles = false;
  bool timing = false;
};

struct ExplainOptions {
  Common common;
  std::filesystem::path checkpoint;
  std::filesystem::path records;
  std::filesystem::path vocab;
  std::vector<std::size_t> samples;
};

// Each command writes its artifacts under common.out_dir and reports to
// `log`; errors propagate as revstream exceptions.
void cmd_preprocess(const PreprocessOptions& options, std::ostream& log);
void cmd_analyze(const AnalyzeOptions& options, std::ostream& log);
void cmd_balance(const BalanceOptions& options, std::ostream& log);
void cmd_stream(const StreamOptions& options, std::ostream& log);
void cmd_explain(const ExplainOptions& options, std::ostream& log);

/// Full command-line entry point; returns the exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace revstream::cli
