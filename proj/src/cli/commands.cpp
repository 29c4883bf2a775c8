#include "revstream/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "revstream/data_model.hpp"
#include "revstream/error.hpp"
#include "revstream/explain/explain.hpp"
#include "revstream/metrics.hpp"
#include "revstream/offline/cross_validation.hpp"
#include "revstream/offline/forest.hpp"
#include "revstream/offline/spearman.hpp"
#include "revstream/online/profile.hpp"
#include "revstream/random.hpp"
#include "revstream/stream/hoeffding_tree.hpp"
#include "revstream/stream/naive_bayes.hpp"
#include "revstream/stream/online_forest.hpp"
#include "revstream/stream/prequential.hpp"
#include "revstream/synth/synth_balance.hpp"

namespace revstream::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Logger {
 public:
  Logger(std::ostream& out, bool quiet) : out_(out), quiet_(quiet) {}
  void info(const std::string& msg) const {
    if (!quiet_) out_ << msg << '\n';
  }
  void warn(const std::string& msg) const { out_ << "warning: " << msg << '\n'; }

 private:
  std::ostream& out_;
  bool quiet_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void require_file(const fs::path& path, const char* what) {
  if (!fs::exists(path)) throw IoError(std::string(what) + " not found: " + path.string());
}

Dataset dense_dataset(const std::vector<DailyRecord>& records) {
  Dataset d;
  d.features = FeatureMatrix(0, kDenseWidth);
  for (const auto& r : records) {
    const auto row = dense_features(r);
    d.features.append_row(row);
    d.labels.push_back(r.label());
  }
  return d;
}

json metrics_json(const MetricsReport& m, bool timing) {
  json j = to_json(m);
  if (!timing) j.erase("seconds");
  return j;
}

std::string counts_line(const std::vector<DailyRecord>& records) {
  const auto reverts = std::count_if(records.begin(), records.end(),
                                     [](const auto& r) { return r.revert_label; });
  return std::to_string(records.size()) + " records, " + std::to_string(reverts) + " revert";
}

}  // namespace

void cmd_preprocess(const PreprocessOptions& o, std::ostream& log_stream) {
  const Logger log(log_stream, o.common.quiet);
  require_file(o.events, "events file");
  ensure_dir(o.common.out_dir);

  const WordList stopwords = o.stopwords ? WordList::load(*o.stopwords) : WordList{};
  const auto bad_words = o.bad_words ? std::optional(WordList::load(*o.bad_words)) : std::nullopt;
  const auto reverted =
      o.reverted_words ? std::optional(WordList::load(*o.reverted_words)) : std::nullopt;
  const auto lexicon = o.lexicon ? std::optional(Lexicon::load(*o.lexicon)) : std::nullopt;

  auto parsed = parse_review_file(o.events);
  if (!parsed.issues.empty()) {
    std::map<std::string, std::size_t> by_field;
    for (const auto& issue : parsed.issues) ++by_field[issue.field.empty() ? "(line)" : issue.field];
    std::string summary;
    for (const auto& [field, n] : by_field) {
      summary += (summary.empty() ? "" : ", ") + field + ": " + std::to_string(n);
    }
    log.warn(std::to_string(parsed.issues.size()) + " malformed lines skipped (" + summary + ")");
    for (const auto& issue : parsed.issues) {
      log.info("  line " + std::to_string(issue.line) +
               (issue.field.empty() ? "" : " [" + issue.field + "]") + ": " + issue.message);
    }
  }
  if (parsed.events.empty()) log.warn("no events in " + o.events.string());

  std::vector<Tokens> documents;
  for (auto& e : parsed.events) {
    const Tokens ins = normalize_text(e.inserted_text, stopwords);
    const Tokens del = normalize_text(e.deleted_text, stopwords);
    if (bad_words) e.n_bad_words = count_wordlist(ins, *bad_words);
    if (reverted) e.n_reverted_words = count_wordlist(ins, *reverted);
    if (lexicon) {
      e.polarity_inserted = polarity(ins, *lexicon);
      e.polarity_deleted = polarity(del, *lexicon);
    }
    e.inserted_text = join_tokens(ins);
    e.deleted_text = join_tokens(del);
    documents.push_back(ins);
    documents.push_back(del);
  }

  NgramVocabulary vocab;
  if (o.vocab) {
    vocab = NgramVocabulary::load(*o.vocab);
  } else if (!documents.empty()) {
    vocab = fit_ngram_vocabulary(documents, o.ngrams);
  }
  const std::size_t n_events = parsed.events.size();
  const auto records = aggregate_daily(std::move(parsed.events), vocab);

  write_records_jsonl(o.common.out_dir / "daily.jsonl", records);
  write_records_csv(o.common.out_dir / "daily.csv", records);
  if (!o.vocab) vocab.save(o.common.out_dir / "vocab.json");
  log.info("preprocess: " + std::to_string(n_events) + " events, " +
           std::to_string(parsed.issues.size()) + " rejected, " + counts_line(records) + ", " +
           std::to_string(vocab.size()) + " n-grams");
}

void cmd_analyze(const AnalyzeOptions& o, std::ostream& log_stream) {
  const Logger log(log_stream, o.common.quiet);
  require_file(o.records, "records file");
  ensure_dir(o.common.out_dir);
  auto records = read_records_jsonl(o.records);
  if (records.empty()) throw DataError("no records in " + o.records.string());

  if (o.subsample_nonrevert > 0) {
    std::vector<std::size_t> nonrevert;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!records[i].revert_label) nonrevert.push_back(i);
    }
    if (nonrevert.size() > o.subsample_nonrevert) {
      Rng rng(derive_seed(o.common.seed, "subsample"));
      for (std::size_t i = 0; i < o.subsample_nonrevert; ++i) {
        std::swap(nonrevert[i], nonrevert[i + rng.index(nonrevert.size() - i)]);
      }
      std::vector<bool> drop(records.size(), false);
      for (std::size_t i = o.subsample_nonrevert; i < nonrevert.size(); ++i) drop[nonrevert[i]] = true;
      std::vector<DailyRecord> kept;
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (!drop[i]) kept.push_back(std::move(records[i]));
      }
      records = std::move(kept);
    }
  }
  const Dataset data = dense_dataset(records);
  const auto names = dense_feature_names();

  std::vector<double> labels(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) labels[i] = data.labels[i] == Label::kRevert ? 1.0 : 0.0;
  std::string csv = "feature,coefficient,n\n";
  std::vector<std::string> constant;
  for (std::size_t f = 0; f < kDenseWidth; ++f) {
    std::vector<double> col(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) col[i] = data.features(i, f);
    std::string coef = "nan";
    try {
      coef = format_double(spearman(col, labels).coefficient);
    } catch (const InvalidArgument&) {
      constant.emplace_back(names[f]);
    }
    csv += std::string(names[f]) + ',' + coef + ',' + std::to_string(data.size()) + '\n';
  }
  write_text(o.common.out_dir / "spearman.csv", csv);
  if (!constant.empty()) {
    std::string list;
    for (const auto& c : constant) list += (list.empty() ? "" : ", ") + c;
    log.warn("no correlation for constant columns: " + list);
  }

  ForestParams fp;
  fp.n_estimators = o.n_estimators;
  fp.seed = derive_seed(o.common.seed, "forest");
  const auto forest = train_forest(data, fp);
  const auto importance = feature_importance(forest);
  if (importance.all_zero) log.warn("no tree has a split; every importance is zero");
  const auto mask = select_features(importance.values, o.threshold);
  double threshold = 0.0;
  if (o.threshold) {
    threshold = *o.threshold;
  } else {
    for (double v : importance.values) threshold += v;
    threshold /= static_cast<double>(importance.values.size());
  }
  json features = json::array();
  std::size_t kept = 0;
  for (std::size_t f = 0; f < kDenseWidth; ++f) {
    features.push_back({{"name", names[f]}, {"importance", importance.values[f]}, {"selected", bool(mask[f])}});
    kept += mask[f] ? 1 : 0;
  }
  const json selection = {{"threshold", threshold},
                          {"all_zero", importance.all_zero},
                          {"n_rows", data.size()},
                          {"n_estimators", o.n_estimators},
                          {"features", features}};
  write_text(o.common.out_dir / "selection.json", selection.dump(2) + "\n");

  if (o.cv_folds > 0) {
    auto model = make_batch_classifier(o.classifier, derive_seed(o.common.seed, "forest"));
    const auto cv = cross_validate(*model, data, o.cv_folds);
    json folds = json::array();
    for (const auto& f : cv.folds) folds.push_back(metrics_json(f, o.timing));
    const json report = {{"classifier", o.classifier},
                         {"folds", o.cv_folds},
                         {"order", "chronological"},
                         {"pooled", metrics_json(cv.pooled, false)},
                         {"per_fold", folds}};
    write_text(o.common.out_dir / "cv_metrics.json", report.dump(2) + "\n");
    log.info("cross-validation (" + o.classifier + ", " + std::to_string(o.cv_folds) +
             " folds): accuracy " + format_double(cv.pooled.accuracy));
  }
  log.info("analyze: " + counts_line(records) + ", " + std::to_string(kept) + " of " +
           std::to_string(kDenseWidth) + " features selected");
}

void cmd_balance(const BalanceOptions& o, std::ostream& log_stream) {
  const Logger log(log_stream, o.common.quiet);
  require_file(o.records, "records file");
  ensure_dir(o.common.out_dir);
  auto records = read_records_jsonl(o.records);

  std::vector<DailyRecord> reverts;
  for (const auto& r : records) {
    if (r.revert_label) reverts.push_back(r);
  }
  if (reverts.empty()) throw DataError("no revert records to model in " + o.records.string());
  const std::size_t n_nonrevert = records.size() - reverts.size();
  const std::size_t count =
      o.count.value_or(n_nonrevert > reverts.size() ? n_nonrevert - reverts.size() : 0);

  SynthConfig cfg;
  cfg.count = count;
  cfg.k = o.k;
  cfg.seed = derive_seed(o.common.seed, "synth");
  if (o.date_from || o.date_to) {
    const auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                              [](const auto& a, const auto& b) { return a.date < b.date; });
    auto parse = [](const std::optional<std::string>& text, Day fallback) {
      if (!text) return fallback;
      const auto d = parse_day(*text);
      if (!d) throw InvalidArgument("bad date '" + *text + "' (expected YYYY-MM-DD)");
      return *d;
    };
    cfg.date_range = {parse(o.date_from, lo->date), parse(o.date_to, hi->date)};
  }
  auto synth = generate_reverts(records, cfg);
  for (const auto& note : synth.notes) log.warn(note);

  const auto fidelity = fidelity_report(reverts, synth.records);
  write_text(o.common.out_dir / "fidelity.csv", fidelity_csv(fidelity));
  const std::size_t n_synth = synth.records.size();
  const auto merged = merge_balance(std::move(records), std::move(synth.records));
  write_records_jsonl(o.common.out_dir / "balanced.jsonl", merged);
  log.info("balance: " + std::to_string(n_synth) + " synthetic reverts, " + counts_line(merged));
}

namespace {

std::unique_ptr<StreamModel> make_stream_model(const StreamOptions& o) {
  HoeffdingConfig ht;
  ht.grace_period = o.grace_period;
  ht.split_confidence = o.split_confidence;
  ht.tie_threshold = o.tie_threshold;
  if (o.model == "nb") return std::make_unique<IncrementalNaiveBayes>();
  if (o.model == "ht") return std::make_unique<HoeffdingTree>(ht);
  if (o.model == "arf") {
    OnlineForestConfig fc;
    fc.n_trees = o.n_trees;
    fc.poisson_lambda = o.poisson_lambda;
    fc.seed = derive_seed(o.common.seed, "forest");
    fc.tree = ht;
    return std::make_unique<OnlineForest>(fc);
  }
  throw InvalidArgument("unknown model '" + o.model + "' (expected nb, ht or arf)");
}

}  // namespace

void cmd_stream(const StreamOptions& o, std::ostream& log_stream) {
  const Logger log(log_stream, o.common.quiet);
  require_file(o.records, "records file");
  require_file(o.vocab, "vocabulary file");
  ensure_dir(o.common.out_dir);

  PrequentialConfig pc;
  pc.warmup = o.warmup;
  pc.windows.clear();
  for (const auto& w : o.eval_windows) pc.windows.push_back(EvalWindow::parse(w));
  auto model = make_stream_model(o);
  const auto vocab = NgramVocabulary::load(o.vocab);
  const auto records = read_records_jsonl(o.records);

  ProfileStore profiles;
  const auto result = prequential_run(records, *model, profiles, vocab.size(), pc);
  if (profiles.static_conflicts() > 0) {
    log.warn(std::to_string(profiles.static_conflicts()) +
             " records disagreed with their editor's bot/creator flags; first values kept");
  }

  json windows = json::array();
  std::string csv = metrics_csv_header() + "\n";
  for (const auto& w : result.windows) {
    json jw = {{"window", w.window.name},
               {"start", w.window.start(result.n_records)},
               {"n_scored", w.confusion.total()},
               {"abstentions", w.abstentions},
               {"empty", !w.metrics.has_value()}};
    if (w.metrics) {
      jw["metrics"] = metrics_json(*w.metrics, false);
      csv += to_csv_row(w.window.name, *w.metrics) + "\n";
      log.info("stream " + o.model + " [" + w.window.name + "]: accuracy " +
               format_double(w.metrics->accuracy) + ", macro F " + format_double(w.metrics->macro_f) +
               " over " + std::to_string(w.confusion.total()) + " records");
    } else {
      log.warn("window " + w.window.name + " scored no records");
    }
    windows.push_back(std::move(jw));
  }
  json report = {{"model", o.model},
                 {"n_records", result.n_records},
                 {"warmup", o.warmup},
                 {"windows", std::move(windows)}};
  if (o.timing) report["seconds"] = result.seconds;
  write_text(o.common.out_dir / "metrics.json", report.dump(2) + "\n");
  write_text(o.common.out_dir / "metrics.csv", csv);
  if (o.checkpoint) write_text(*o.checkpoint, model->checkpoint().dump() + "\n");
  if (o.write_profiles) {
    std::ostringstream ss;
    profiles.write_jsonl(ss);
    write_text(o.common.out_dir / "profiles.jsonl", ss.str());
  }
}

void cmd_explain(const ExplainOptions& o, std::ostream& log_stream) {
  const Logger log(log_stream, o.common.quiet);
  require_file(o.checkpoint, "checkpoint");
  require_file(o.records, "records file");
  require_file(o.vocab, "vocabulary file");
  if (o.samples.empty()) throw InvalidArgument("no sample selected");
  ensure_dir(o.common.out_dir);

  const auto model = load_checkpoint(read_json(o.checkpoint));
  std::vector<DecisionTree> trees;
  if (const auto* ht = dynamic_cast<const HoeffdingTree*>(model.get())) {
    trees.push_back(ht->snapshot());
  } else if (const auto* rf = dynamic_cast<const OnlineForest*>(model.get())) {
    for (const auto& m : rf->members()) trees.push_back(m.snapshot());
  } else {
    throw InvalidArgument("model kind '" + model->kind() + "' has no decision paths to explain");
  }

  const auto vocab = NgramVocabulary::load(o.vocab);
  const auto records = read_records_jsonl(o.records);
  for (auto s : o.samples) {
    if (s >= records.size()) {
      throw InvalidArgument("unknown sample " + std::to_string(s) + " (stream has " +
                            std::to_string(records.size()) + " records)");
    }
  }
  if (const auto bad = first_unsorted(records)) throw UnsortedStreamError(*bad);
  const auto schema = FeatureSchema::for_profiles(vocab);

  // Replay the profiles so each sample is seen as the model saw it.
  const std::size_t last = *std::max_element(o.samples.begin(), o.samples.end());
  std::map<std::size_t, FeatureVector> vectors;
  ProfileStore profiles;
  for (std::size_t i = 0; i <= last; ++i) {
    const auto& p = profiles.update(records[i]);
    if (std::find(o.samples.begin(), o.samples.end(), i) != o.samples.end()) {
      vectors.emplace(i, profile_feature_vector(p, vocab.size()));
    }
  }

  std::string text;
  for (auto s : o.samples) {
    const auto& x = vectors.at(s);
    const auto e = shortest_ensemble_path(trees, x, schema, std::to_string(s));
    if (!text.empty()) text += "\n";
    text += render_nl(e);
    write_text(o.common.out_dir / ("sample_" + std::to_string(s) + ".dot"),
               export_dot(trees[e.tree_id], schema, &e));
  }
  write_text(o.common.out_dir / "explanations.txt", text);
  log.info("explain: " + std::to_string(o.samples.size()) + " samples written to " +
           o.common.out_dir.string());
}

namespace {

void add_common(CLI::App& sub, Common& c) {
  sub.add_option("--seed", c.seed, "Global random seed");
  sub.add_option("--out-dir", c.out_dir, "Directory for output files");
  sub.add_flag("--quiet", c.quiet, "Only print warnings");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Revert detection for wiki reviews: preprocessing, balancing, stream "
               "classification and explanations"};
  app.name("revstream");
  app.set_config("--config", "", "INI or TOML file with option values; flags override it");
  app.require_subcommand(1);

  PreprocessOptions pre;
  auto* p = app.add_subcommand("preprocess", "Aggregate review events into daily records");
  add_common(*p, pre.common);
  p->add_option("--events", pre.events, "Review events (JSON lines)")->required();
  p->add_option("--stopwords", pre.stopwords, "Stopword list");
  p->add_option("--bad-words", pre.bad_words, "Bad-word list; recounts n_bad_words");
  p->add_option("--reverted-words", pre.reverted_words,
                "Commonly reverted words; recounts n_reverted_words");
  p->add_option("--lexicon", pre.lexicon, "Polarity lexicon (TSV); recomputes polarities");
  p->add_option("--vocab", pre.vocab, "Reuse this vocabulary instead of fitting one");
  p->add_option("--min-df", pre.ngrams.min_df, "Minimum document frequency ratio");
  p->add_option("--max-df", pre.ngrams.max_df, "Maximum document frequency ratio");
  p->add_option("--max-features", pre.ngrams.max_features, "Vocabulary size cap (0: none)");
  p->add_option("--word-min-n", pre.ngrams.word_min_n, "Shortest word n-gram");
  p->add_option("--word-max-n", pre.ngrams.word_max_n, "Longest word n-gram");
  p->add_option("--char-min-n", pre.ngrams.char_min_n, "Shortest character n-gram");
  p->add_option("--char-max-n", pre.ngrams.char_max_n, "Longest character n-gram");

  AnalyzeOptions an;
  auto* a = app.add_subcommand("analyze", "Rank correlations and forest feature selection");
  add_common(*a, an.common);
  a->add_option("--records", an.records, "Daily records (JSON lines)")->required();
  a->add_option("--subsample-nonrevert", an.subsample_nonrevert,
                "Keep this many non-revert rows, drawn at random (0: all)");
  a->add_option("--threshold", an.threshold, "Importance threshold (default: mean)");
  a->add_option("--n-estimators", an.n_estimators, "Trees in the selection forest");
  a->add_option("--cv-folds", an.cv_folds, "Run k-fold cross-validation (0: skip)");
  a->add_option("--classifier", an.classifier, "dt, rf, rc or nb")
      ->check(CLI::IsMember({"dt", "rf", "rc", "nb"}));
  a->add_flag("--timing", an.timing, "Include wall-clock times in reports");

  BalanceOptions ba;
  auto* b = app.add_subcommand("balance", "Generate synthetic reverts and merge them in");
  add_common(*b, ba.common);
  b->add_option("--records", ba.records, "Daily records (JSON lines)")->required();
  b->add_option("--count", ba.count, "Synthetic records (default: the class deficit)");
  b->add_option("--k", ba.k, "Clusters for the 1-D k-means filter");
  b->add_option("--date-from", ba.date_from, "First synthetic date (YYYY-MM-DD)");
  b->add_option("--date-to", ba.date_to, "Last synthetic date (YYYY-MM-DD)");

  StreamOptions st;
  auto* s = app.add_subcommand("stream", "Prequential evaluation of an online classifier");
  add_common(*s, st.common);
  s->add_option("--records", st.records, "Date-sorted daily records")->required();
  s->add_option("--vocab", st.vocab, "Vocabulary used for the records")->required();
  s->add_option("--model", st.model, "nb, ht or arf")->check(CLI::IsMember({"nb", "ht", "arf"}));
  s->add_option("--eval-window", st.eval_windows, "all or lastNN (e.g. last90, last10); repeatable");
  s->add_option("--warmup", st.warmup, "Records predicted but not scored at the start");
  s->add_option("--n-trees", st.n_trees, "Online forest size");
  s->add_option("--lambda", st.poisson_lambda, "Online bagging Poisson rate");
  s->add_option("--grace-period", st.grace_period, "Hoeffding tree grace period");
  s->add_option("--split-confidence", st.split_confidence, "Hoeffding tree delta");
  s->add_option("--tie-threshold", st.tie_threshold, "Hoeffding tree tie threshold");
  s->add_option("--checkpoint", st.checkpoint, "Write the trained model here");
  s->add_flag("--profiles", st.write_profiles, "Also write profiles.jsonl");
  s->add_flag("--timing", st.timing, "Include wall-clock time in metrics.json");

  ExplainOptions ex;
  auto* e = app.add_subcommand("explain", "Explain predictions of a checkpointed tree model");
  add_common(*e, ex.common);
  e->add_option("--checkpoint", ex.checkpoint, "Model checkpoint from `stream`")->required();
  e->add_option("--records", ex.records, "The stream the model was trained on")->required();
  e->add_option("--vocab", ex.vocab, "Vocabulary used for the records")->required();
  e->add_option("--sample", ex.samples, "Record index to explain; repeatable")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& ex_) {
    err << "error: " << ex_.what() << "\n";
    return kUsage;
  }

  try {
    if (*p) cmd_preprocess(pre, out);
    if (*a) cmd_analyze(an, out);
    if (*b) cmd_balance(ba, out);
    if (*s) cmd_stream(st, out);
    if (*e) cmd_explain(ex, out);
  } catch (const IoError& ex_) {
    err << "error: " << ex_.what() << "\n";
    return kIo;
  } catch (const DataError& ex_) {
    err << "error: " << ex_.what() << "\n";
    return kData;
  } catch (const InvalidArgument& ex_) {
    err << "error: " << ex_.what() << "\n";
    return kArgument;
  } catch (const std::exception& ex_) {
    err << "error: " << ex_.what() << "\n";
    return kUnexpected;
  }
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("revstream");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace revstream::cli
