#pragma once

// Prequential active-learning loop: each arriving document is predicted,
// scored against its ground truth, offered to the sampling strategy and, when
// queried and answered, absorbed into the model with the oracle's label.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarstream/config.hpp"
#include "polarstream/corpus.hpp"
#include "polarstream/kappa.hpp"
#include "polarstream/manifest.hpp"
#include "polarstream/mnb.hpp"
#include "polarstream/oracle.hpp"
#include "polarstream/sampling.hpp"

namespace polar {

struct PrequentialRecord {
  std::uint64_t doc_id = 0;
  PolarityLabel predicted = PolarityLabel::Positive;
  /// Ground truth, used for evaluation only.
  PolarityLabel truth = PolarityLabel::Positive;
  bool sampled = false;
  double kappa = 0.0;
  std::size_t vocab_size_after = 0;

  friend bool operator==(const PrequentialRecord&, const PrequentialRecord&) = default;
};

inline constexpr const char* kRecordsHeader = "doc_id,predicted,truth,sampled,kappa,vocab_size";

inline std::string format_record(const PrequentialRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%llu,%s,%s,%d,%.17g,%zu", static_cast<unsigned long long>(r.doc_id),
                std::string(to_token(r.predicted)).c_str(), std::string(to_token(r.truth)).c_str(), r.sampled ? 1 : 0,
                r.kappa, r.vocab_size_after);
  return buf;
}

/// Appends records to records.csv as they are produced.
class RecordWriter {
 public:
  explicit RecordWriter(const std::string& path, bool flush_each = false) : out_(path), flush_each_(flush_each) {
    if (!out_) throw Error("cannot write records file '" + path + "'");
    out_ << kRecordsHeader << '\n';
  }
  void operator()(const PrequentialRecord& r) {
    out_ << format_record(r) << '\n';
    if (flush_each_) out_.flush();
  }
  void close() {
    out_.flush();
    out_.close();
  }

 private:
  std::ofstream out_;
  bool flush_each_;
};

struct RunOptions {
  std::size_t window = 100;
  WindowMode window_mode = WindowMode::Sliding;
  const std::atomic<bool>* stop = nullptr;
};

struct RunResult {
  VocabularyStats model;
  BudgetLedger ledger;
  std::uint64_t abandoned = 0;
  double mean_kappa = 0.0;
  /// Mean recorded kappa over consecutive blocks of `window` records.
  std::vector<double> kappa_per_window;
  bool interrupted = false;
};

using DocumentSource = std::function<std::optional<Document>()>;
using RecordSink = std::function<void(const PrequentialRecord&)>;
using StatusObserver = std::function<void(const RunStatus&)>;

inline DocumentSource source_of(std::span<const Document> docs) {
  return [docs, i = std::size_t{0}]() mutable -> std::optional<Document> {
    if (i >= docs.size()) return std::nullopt;
    return docs[i++];
  };
}

/// Runs the loop over `stream` starting from a model trained on `seed`.
/// `Oracle` provides `std::optional<TrueLabel> request_label(const Document&, const PendingQuery&)`;
/// nullopt marks an abandoned query.
template <class Oracle>
RunResult run_stream(std::span<const Document> seed, const DocumentSource& stream, const Strategy& strategy,
                     const Oracle& oracle, const RunOptions& options, const RecordSink& sink = {},
                     const StatusObserver& observer = {}) {
  RunResult result;
  result.model = init_from_seed(seed);
  result.ledger.seed_size = seed.size();

  ConfusionWindow window(options.window, options.window_mode);
  SamplingRng rng(strategy.rng_seed().value_or(0));
  double kappa_sum = 0.0;
  double block_sum = 0.0;
  std::size_t block_count = 0;

  auto status = [&](bool finished) {
    RunStatus s;
    s.started = true;
    s.finished = finished;
    s.position = result.ledger.stream_position;
    s.queries = result.ledger.queries_made;
    s.abandoned = result.abandoned;
    s.seed_size = result.ledger.seed_size;
    s.spend_percent = result.ledger.percentage();
    s.kappa = window.empty() ? 0.0 : kappa(window);
    s.vocab_size = result.model.vocab_size;
    return s;
  };
  if (observer) observer(status(false));

  while (true) {
    if (options.stop && options.stop->load()) {
      result.interrupted = true;
      break;
    }
    auto next = stream();
    if (!next) break;
    const Document& d = *next;
    if (!d.true_label) throw Error("document " + std::to_string(d.id) + " has no ground truth for evaluation");

    const Prediction prediction = predict(result.model, d);
    window.push(prediction.label, *d.true_label);
    PrequentialRecord record;
    record.doc_id = d.id;
    record.predicted = prediction.label;
    record.truth = *d.true_label;
    record.kappa = kappa(window);

    const SamplingDecision decision = decide(strategy, result.model, d, prediction, rng);
    if (decision.query) {
      PendingQuery query;
      query.doc_id = d.id;
      query.words = d.words;
      query.predicted = prediction.label;
      query.score = decision.score;
      query.prior_positive = class_prior(result.model, PolarityLabel::Positive);
      query.prior_negative = class_prior(result.model, PolarityLabel::Negative);
      query.vocab_size = result.model.vocab_size;
      query.kappa = record.kappa;
      std::optional<TrueLabel> label;
      try {
        label = oracle.request_label(d, query);
      } catch (const Error& e) {
        throw Error("oracle failed on document " + std::to_string(d.id) + ": " + e.what());
      }
      if (label) {
        update(result.model, d, *label);
        ++result.ledger.queries_made;
        record.sampled = true;
      } else {
        ++result.abandoned;
      }
    }
    ++result.ledger.stream_position;
    record.vocab_size_after = result.model.vocab_size;

    kappa_sum += record.kappa;
    block_sum += record.kappa;
    if (++block_count == options.window) {
      result.kappa_per_window.push_back(block_sum / static_cast<double>(block_count));
      block_sum = 0.0;
      block_count = 0;
    }
    if (sink) sink(record);
    if (observer) observer(status(false));
  }
  if (block_count > 0) result.kappa_per_window.push_back(block_sum / static_cast<double>(block_count));
  if (result.ledger.stream_position > 0) {
    result.mean_kappa = kappa_sum / static_cast<double>(result.ledger.stream_position);
  }
  if (observer) observer(status(true));
  return result;
}

inline nlohmann::json strategy_json(const Strategy& s) {
  nlohmann::json j{{"strategy", std::string(to_string(s.kind()))}};
  if (s.log_alpha()) {
    j["alpha"] = *s.alpha();
    j["log_alpha"] = *s.log_alpha();
  }
  if (s.budget()) j["budget"] = *s.budget();
  if (s.rng_seed()) j["rng_seed"] = *s.rng_seed();
  return j;
}

inline nlohmann::json summary_json(const ExperimentConfig& cfg, const RunResult& r) {
  nlohmann::json j = strategy_json(cfg.strategy);
  j["v"] = 1;
  j["stream"] = cfg.stream_path;
  j["variant"] = std::string(to_string(cfg.variant));
  j["seed_size"] = r.ledger.seed_size;
  j["window"] = cfg.window;
  j["window_mode"] = std::string(to_string(cfg.window_mode));
  j["documents"] = r.ledger.stream_position;
  j["queries"] = r.ledger.queries_made;
  j["abandoned"] = r.abandoned;
  j["spend_percent"] = r.ledger.percentage();
  j["spend_percent_rounded"] = spend_report(r.ledger);
  j["mean_kappa"] = r.mean_kappa;
  j["kappa_per_window"] = r.kappa_per_window;
  j["final_vocab_size"] = r.model.vocab_size;
  j["interrupted"] = r.interrupted;
  return j;
}

/// Seed documents plus a source for the rest of the configured stream. The
/// original variant is read lazily; other variants must be materialized.
struct PreparedRun {
  DocumentSequence seed;
  DocumentSource stream;
  std::shared_ptr<void> keep_alive;
};

inline PreparedRun prepare_run(const ExperimentConfig& cfg) {
  PreparedRun run;
  if (cfg.variant == StreamVariant::Original) {
    auto reader = std::make_shared<StreamReader>(cfg.stream_path, cfg.format);
    while (run.seed.size() < cfg.seed_size) {
      auto d = reader->next();
      if (!d) {
        throw Error("stream exhausted after " + std::to_string(run.seed.size()) + " documents; seed_size is " +
                    std::to_string(cfg.seed_size));
      }
      run.seed.push_back(std::move(*d));
    }
    run.stream = [reader] { return reader->next(); };
    run.keep_alive = reader;
    return run;
  }
  const auto corpus = load_corpus(cfg.stream_path, cfg.format);
  if (corpus.size() <= cfg.seed_size) {
    throw Error("stream exhausted after " + std::to_string(corpus.size()) + " documents; seed_size is " +
                std::to_string(cfg.seed_size));
  }
  auto prepared = std::make_shared<DocumentSequence>(prepare_stream(corpus, cfg.variant, cfg.seed_size).documents);
  run.seed.assign(prepared->begin(), prepared->begin() + static_cast<std::ptrdiff_t>(cfg.seed_size));
  run.stream = source_of(std::span<const Document>(*prepared).subspan(cfg.seed_size));
  run.keep_alive = prepared;
  return run;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

/// Full run from a config: writes records.csv, summary.json and model.json
/// into cfg.output_dir.
template <class Oracle>
RunResult run_experiment(const ExperimentConfig& cfg, const Oracle& oracle, const StatusObserver& observer = {},
                         const std::atomic<bool>* stop = nullptr, bool flush_each = false) {
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  PreparedRun run = prepare_run(cfg);
  RecordWriter writer((dir / "records.csv").string(), flush_each);
  RunOptions options{cfg.window, cfg.window_mode, stop};
  RunResult result = run_stream(run.seed, run.stream, cfg.strategy, oracle, options,
                                [&](const PrequentialRecord& r) { writer(r); }, observer);
  writer.close();
  write_json(dir / "summary.json", summary_json(cfg, result));
  write_json(dir / "model.json", save_snapshot(result.model));
  return result;
}

inline RunResult run_experiment(const ExperimentConfig& cfg) { return run_experiment(cfg, GroundTruthOracle{}); }

}  // namespace polar
