#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "polarstream/polarstream.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

void configure_logging() {
  spdlog::set_pattern("[%H:%M:%S.%e] [%l] %v");
  if (const char* level = std::getenv("POLARSTREAM_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

std::string default_manifest(const std::string& output) { return output + ".manifest.json"; }

int cmd_prepare(const std::string& input, const std::string& variant_name, std::size_t seed_size,
                const std::string& output, std::string manifest_path, const std::string& format) {
  const auto variant = polar::parse_variant(variant_name);
  polar::IngestionStats stats;
  const auto corpus = polar::load_corpus(
      input, format == "text" ? polar::CorpusFormat::Text : polar::CorpusFormat::Tokens, &stats);
  if (stats.dropped_empty > 0) spdlog::info("dropped {} empty document(s)", stats.dropped_empty);
  const auto prepared = polar::prepare_stream(corpus, *variant, seed_size);
  if (prepared.manifest.seed_fallback) spdlog::warn("fewer than seed_size documents are fully covered by the seed vocabulary");
  polar::write_stream(output, prepared.documents);
  if (manifest_path.empty()) manifest_path = default_manifest(output);
  polar::write_manifest(manifest_path, prepared.manifest);
  spdlog::info("wrote {} documents ({} distinct words) to {}", prepared.manifest.stream_length,
               prepared.manifest.vocabulary_size, output);
  return 0;
}

int cmd_synth(const std::string& script_path, const std::string& output, std::string manifest_path) {
  std::ifstream in(script_path);
  if (!in) throw polar::Error("cannot read drift script '" + script_path + "'");
  polar::DriftScript script;
  try {
    script = nlohmann::json::parse(in).get<polar::DriftScript>();
  } catch (const nlohmann::json::exception& e) {
    throw polar::Error("malformed drift script: " + std::string(e.what()));
  }
  const auto stream = polar::synthesize_drift_stream(script);
  polar::write_stream(output, stream.documents);
  polar::StreamManifest m;
  m.stream_length = stream.documents.size();
  m.vocabulary_size = polar::distinct_words(stream.documents);
  m.segments = polar::segment_schedule(stream);
  m.script = script;
  if (manifest_path.empty()) manifest_path = default_manifest(output);
  polar::write_manifest(manifest_path, m);
  spdlog::info("wrote {} synthetic documents to {}", m.stream_length, output);
  return 0;
}

void log_result(const polar::RunResult& r, const polar::ExperimentConfig& cfg) {
  spdlog::info("{} documents, {} queries, {} abandoned, labels {:.2f}%, mean kappa {:.4f}, vocabulary {}{}",
               r.ledger.stream_position, r.ledger.queries_made, r.abandoned, r.ledger.percentage(), r.mean_kappa,
               r.model.vocab_size, r.interrupted ? " (interrupted)" : "");
  spdlog::info("outputs in {}", cfg.output_dir);
}

int cmd_run(const std::string& config_path) {
  const auto cfg = polar::load_config(config_path);
  const auto result = polar::run_experiment(cfg);
  log_result(result, cfg);
  return 0;
}

int cmd_serve(const std::string& config_path, const std::string& host, int port) {
  const auto cfg = polar::load_config(config_path);
  polar::LabelExchange exchange;
  polar::LabelService service(exchange, cfg.static_dir);
  const int bound = service.start(host, port);
  spdlog::info("label service listening on http://{}:{}/", host, bound);

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done.load()) {
      if (g_interrupted.load()) {
        exchange.close();
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });

  polar::RunResult result;
  try {
    result = polar::run_interactive(cfg, exchange, &g_interrupted);
  } catch (...) {
    done.store(true);
    watcher.join();
    throw;
  }
  done.store(true);
  watcher.join();
  service.stop();
  log_result(result, cfg);
  return 0;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& output, const std::string& stream,
               std::size_t seed_size, std::size_t batch) {
  if (runs.empty() && stream.empty()) throw polar::Error("nothing to report: give --runs and/or --stream");
  std::filesystem::create_directories(output);
  if (!runs.empty()) {
    polar::RunSet set;
    for (const auto& spec : runs) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) {
        set.push_back({std::filesystem::path(spec).filename().string(), spec});
      } else {
        set.push_back({spec.substr(0, eq), spec.substr(eq + 1)});
      }
    }
    const auto result = polar::write_report(set, output);
    for (const auto& [label, dev] : result.kappa_deviation) {
      if (dev > 1e-12) spdlog::warn("run '{}': recomputed kappa deviates from records by {}", label, dev);
    }
    spdlog::info("report for {} run(s) written to {}", set.size(), output);
  }
  if (!stream.empty()) {
    const auto docs = polar::load_corpus(stream);
    const auto rows = polar::stream_diagnostics(docs, seed_size, batch);
    polar::write_diagnostics((std::filesystem::path(output) / "diagnostics.csv").string(), rows);
    spdlog::info("stream diagnostics ({} batches) written to {}", rows.size(), output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Active polarity learning over document streams"};
  app.require_subcommand(1);

  auto* prepare = app.add_subcommand("prepare", "Build a stream variant and its manifest");
  std::string input, variant, output, manifest, format = "tokens";
  std::size_t seed_size = 0;
  prepare->add_option("--input", input, "Labeled stream file")->required()->check(CLI::ExistingFile);
  prepare->add_option("--variant", variant, "original | reordered | fixed-vocab")
      ->required()
      ->check(CLI::IsMember({"original", "reordered", "fixed-vocab"}));
  prepare->add_option("--seed-size", seed_size, "Number of seed documents")->required();
  prepare->add_option("--output", output, "Output stream file")->required();
  prepare->add_option("--manifest", manifest, "Manifest path (default <output>.manifest.json)");
  prepare->add_option("--format", format, "tokens | text")->check(CLI::IsMember({"tokens", "text"}));

  auto* synth = app.add_subcommand("synth", "Generate a synthetic drift stream");
  std::string script;
  synth->add_option("--script", script, "Drift script (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--output", output, "Output stream file")->required();
  synth->add_option("--manifest", manifest, "Manifest path (default <output>.manifest.json)");

  auto* run = app.add_subcommand("run", "Run an experiment against ground-truth labels");
  std::string config;
  run->add_option("--config", config, "Experiment config")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "Run an experiment answered by a human through the label service");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--config", config, "Experiment config")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "HTTP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");

  auto* report = app.add_subcommand("report", "Spend table, kappa series and alpha sweeps from run outputs");
  std::vector<std::string> runs;
  std::string stream;
  std::size_t batch = 100;
  report->add_option("--runs", runs, "label=path entries; path is records.csv or its run directory");
  report->add_option("--output", output, "Output directory")->required();
  report->add_option("--stream", stream, "Stream file for per-batch diagnostics");
  report->add_option("--seed-size", seed_size, "Seed size for diagnostics");
  report->add_option("--batch", batch, "Batch size for diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*prepare) return cmd_prepare(input, variant, seed_size, output, manifest, format);
    if (*synth) return cmd_synth(script, output, manifest);
    if (*run) return cmd_run(config);
    if (*serve) return cmd_serve(config, host, port);
    if (*report) return cmd_report(runs, output, stream, seed_size, batch);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
