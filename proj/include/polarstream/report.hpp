#pragma once

// Post-processing of run outputs into comparison artifacts. Everything here is
// a function of records.csv (plus the summary.json sitting next to it); no
// model state is needed.
//
// Output files written by write_report():
//   spend_table.csv   label,strategy,seed_size,documents,queries,spend_percent
//   kappa_<label>.csv doc_id,kappa,recorded_kappa
//   alpha_sweep.csv   label,alpha,log_alpha,spend_percent,mean_kappa   (only for alpha sweeps)
//   report.md         human-readable summary of the above
//
// Stream diagnostics (write_diagnostics):
//   diagnostics.csv   batch,start,documents,known_ratio,new_ratio,first_seen_ratio,positive_share,negative_share

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "polarstream/corpus.hpp"
#include "polarstream/harness.hpp"
#include "polarstream/kappa.hpp"

namespace polar {

inline std::vector<PrequentialRecord> read_records(std::istream& in, const std::string& name = "records") {
  std::vector<PrequentialRecord> out;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(name + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) throw ParseError(line_no, name + ": unexpected header '" + line + "'");
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw ParseError(line_no, name + ": expected 6 fields");
    PrequentialRecord r;
    const auto id = detail::parse_unsigned<std::uint64_t>(f[0]);
    const auto pred = parse_label(f[1]);
    const auto truth = parse_label(f[2]);
    const auto k = detail::parse_real(f[4]);
    const auto vocab = detail::parse_unsigned<std::size_t>(f[5]);
    if (!id || !pred || !truth || (f[3] != "0" && f[3] != "1") || !k || !vocab) {
      throw ParseError(line_no, name + ": malformed record");
    }
    r.doc_id = *id;
    r.predicted = *pred;
    r.truth = *truth;
    r.sampled = f[3] == "1";
    r.kappa = *k;
    r.vocab_size_after = *vocab;
    out.push_back(r);
  }
  return out;
}

inline std::vector<PrequentialRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read records file '" + path + "'");
  return read_records(in, path);
}

struct KappaPoint {
  std::uint64_t position = 0;
  double kappa = 0.0;
};

/// Recomputes windowed kappa from the (predicted, truth) columns using prefix
/// sums over the record array rather than an incremental window.
inline std::vector<KappaPoint> kappa_series(const std::vector<PrequentialRecord>& records, std::size_t window,
                                            WindowMode mode) {
  if (window == 0) throw Error("kappa window must be positive");
  const std::size_t n = records.size();
  // prefix[i][p][t] = number of records among the first i with predicted p and truth t.
  std::vector<std::array<std::uint64_t, 4>> prefix(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i];
    ++prefix[i + 1][2 * index(records[i].predicted) + index(records[i].truth)];
  }
  std::vector<KappaPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = mode == WindowMode::Sliding ? (i + 1 > window ? i + 1 - window : 0) : (i / window) * window;
    std::array<double, 4> c{};
    for (std::size_t k = 0; k < 4; ++k) c[k] = static_cast<double>(prefix[i + 1][k] - prefix[begin][k]);
    const double total = c[0] + c[1] + c[2] + c[3];
    const double p0 = (c[0] + c[3]) / total;
    const double pred_pos = (c[0] + c[1]) / total;
    const double truth_pos = (c[0] + c[2]) / total;
    const double pc = pred_pos * truth_pos + (1.0 - pred_pos) * (1.0 - truth_pos);
    // Degenerate exactly when every prediction and every truth is one and the same class.
    const bool degenerate = (c[0] == total) || (c[3] == total);
    out.push_back({records[i].doc_id, degenerate ? 0.0 : (p0 - pc) / (1.0 - pc)});
  }
  return out;
}

struct RunEntry {
  std::string label;
  std::string records_path;
};

using RunSet = std::vector<RunEntry>;

/// One run's records plus whatever its summary.json states about the setup.
struct LoadedRun {
  RunEntry entry;
  std::vector<PrequentialRecord> records;
  nlohmann::json summary;  // empty object when no summary.json is present
  std::size_t seed_size = 0;
  std::size_t window = 100;
  WindowMode window_mode = WindowMode::Sliding;

  std::uint64_t queries() const {
    return static_cast<std::uint64_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.sampled; }));
  }
  BudgetLedger ledger() const { return {queries(), records.size(), seed_size}; }
  std::string strategy() const { return summary.value("strategy", std::string("unknown")); }
  std::optional<double> log_alpha() const {
    if (summary.contains("log_alpha")) return summary["log_alpha"].get<double>();
    return std::nullopt;
  }
  double mean_kappa() const {
    if (records.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : records) s += r.kappa;
    return s / static_cast<double>(records.size());
  }
};

/// Accepts either a records.csv path or a run directory containing one.
inline LoadedRun load_run(const RunEntry& entry) {
  namespace fs = std::filesystem;
  fs::path p(entry.records_path);
  if (fs::is_directory(p)) p /= "records.csv";
  if (!fs::exists(p)) throw Error("missing records file '" + p.string() + "'");
  LoadedRun run;
  run.entry = {entry.label, p.string()};
  run.records = read_records(p.string());
  run.summary = nlohmann::json::object();
  const auto summary_path = p.parent_path() / "summary.json";
  if (fs::exists(summary_path)) {
    std::ifstream in(summary_path);
    try {
      run.summary = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed '" + summary_path.string() + "': " + e.what());
    }
    run.seed_size = run.summary.value("seed_size", std::size_t{0});
    run.window = run.summary.value("window", std::size_t{100});
    if (auto m = parse_window_mode(run.summary.value("window_mode", std::string("sliding")))) run.window_mode = *m;
  }
  return run;
}

struct SpendRow {
  std::string label;
  std::string strategy;
  std::size_t seed_size = 0;
  std::uint64_t documents = 0;
  std::uint64_t queries = 0;
  long spend_percent = 0;
};

/// One row per run, rows sorted by label; all runs must cover the same stream length.
inline std::vector<SpendRow> spend_table(const std::vector<LoadedRun>& runs) {
  std::vector<SpendRow> rows;
  for (const auto& r : runs) {
    if (r.records.size() != runs.front().records.size()) {
      throw Error("run '" + r.entry.label + "' covers " + std::to_string(r.records.size()) + " documents but run '" +
                  runs.front().entry.label + "' covers " + std::to_string(runs.front().records.size()));
    }
    rows.push_back({r.entry.label, r.strategy(), r.seed_size, r.records.size(), r.queries(), spend_report(r.ledger())});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  return rows;
}

struct SweepRow {
  std::string label;
  double log_alpha = 0.0;
  double spend_percent = 0.0;
  double mean_kappa = 0.0;
};

/// Present when there are at least two runs, all uncertainty runs over the same
/// stream setup, differing in alpha. Rows ascend in alpha.
inline std::optional<std::vector<SweepRow>> alpha_sweep(const std::vector<LoadedRun>& runs) {
  if (runs.size() < 2) return std::nullopt;
  auto setup = [](const LoadedRun& r) {
    return std::make_tuple(r.summary.value("stream", std::string()), r.summary.value("variant", std::string()),
                           r.seed_size, r.records.size());
  };
  std::vector<SweepRow> rows;
  for (const auto& r : runs) {
    if (r.strategy() != "uncertainty" || !r.log_alpha() || setup(r) != setup(runs.front())) return std::nullopt;
    rows.push_back({r.entry.label, *r.log_alpha(), r.ledger().percentage(), r.mean_kappa()});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.log_alpha < b.log_alpha; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].log_alpha == rows[i - 1].log_alpha) return std::nullopt;
  }
  return rows;
}

struct DiagnosticsRow {
  std::size_t batch = 0;
  std::size_t start = 0;
  std::size_t documents = 0;
  double known_ratio = 0.0;
  double new_ratio = 0.0;
  double first_seen_ratio = 0.0;
  double positive_share = 0.0;
  double negative_share = 0.0;
};

/// Per batch: share of word occurrences inside the seed vocabulary, outside it,
/// and outside it while never seen in any earlier document; plus class shares.
inline std::vector<DiagnosticsRow> stream_diagnostics(const DocumentSequence& stream, std::size_t seed_size,
                                                      std::size_t batch) {
  if (batch == 0) throw Error("batch size must be positive");
  if (batch > stream.size()) {
    throw Error("batch size " + std::to_string(batch) + " exceeds stream length " + std::to_string(stream.size()));
  }
  const Vocabulary seed_vocab = seed_vocabulary(stream, seed_size);
  std::unordered_set<std::string> seen;
  std::vector<DiagnosticsRow> rows;
  for (std::size_t start = 0; start < stream.size(); start += batch) {
    DiagnosticsRow row;
    row.batch = rows.size();
    row.start = start;
    const std::size_t end = std::min(stream.size(), start + batch);
    row.documents = end - start;
    std::size_t total = 0, known = 0, first = 0, positive = 0, labeled = 0;
    for (std::size_t i = start; i < end; ++i) {
      const auto& d = stream[i];
      for (const auto& w : d.words) {
        ++total;
        if (seed_vocab.contains(w)) ++known;
        else if (!seen.contains(w)) ++first;
      }
      seen.insert(d.words.begin(), d.words.end());
      if (d.true_label) {
        ++labeled;
        if (*d.true_label == PolarityLabel::Positive) ++positive;
      }
    }
    if (total > 0) {
      row.known_ratio = double(known) / double(total);
      row.new_ratio = 1.0 - row.known_ratio;
      row.first_seen_ratio = double(first) / double(total);
    }
    if (labeled > 0) {
      row.positive_share = double(positive) / double(labeled);
      row.negative_share = 1.0 - row.positive_share;
    }
    rows.push_back(row);
  }
  return rows;
}

inline void write_diagnostics(const std::string& path, const std::vector<DiagnosticsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "batch,start,documents,known_ratio,new_ratio,first_seen_ratio,positive_share,negative_share\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.batch, r.start, r.documents, r.known_ratio,
                  r.new_ratio, r.first_seen_ratio, r.positive_share, r.negative_share);
    out << buf;
  }
}

struct ReportResult {
  std::vector<SpendRow> spend;
  std::optional<std::vector<SweepRow>> sweep;
  /// Largest |recomputed - recorded| kappa per run label.
  std::map<std::string, double> kappa_deviation;
};

namespace detail {

inline std::string safe_label(const std::string& label) {
  std::string s;
  for (char c : label) s.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return s;
}

}  // namespace detail

inline ReportResult write_report(const RunSet& runset, const std::string& output_dir) {
  namespace fs = std::filesystem;
  if (runset.empty()) throw Error("no runs given");
  std::vector<std::string> missing;
  for (const auto& e : runset) {
    fs::path p(e.records_path);
    if (fs::is_directory(p)) p /= "records.csv";
    if (!fs::exists(p)) missing.push_back(p.string());
  }
  if (!missing.empty()) {
    std::string msg = "missing records files:";
    for (const auto& m : missing) msg += " " + m;
    throw Error(msg);
  }
  std::vector<LoadedRun> runs;
  for (const auto& e : runset) runs.push_back(load_run(e));

  fs::create_directories(output_dir);
  const fs::path dir(output_dir);
  ReportResult result;
  result.spend = spend_table(runs);
  result.sweep = alpha_sweep(runs);

  char buf[256];
  {
    std::ofstream out(dir / "spend_table.csv");
    out << "label,strategy,seed_size,documents,queries,spend_percent\n";
    for (const auto& r : result.spend) {
      out << r.label << ',' << r.strategy << ',' << r.seed_size << ',' << r.documents << ',' << r.queries << ','
          << r.spend_percent << '\n';
    }
    if (!out) throw Error("cannot write spend_table.csv");
  }
  for (const auto& run : runs) {
    const auto series = kappa_series(run.records, run.window, run.window_mode);
    std::ofstream out(dir / ("kappa_" + detail::safe_label(run.entry.label) + ".csv"));
    out << "doc_id,kappa,recorded_kappa\n";
    double deviation = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      deviation = std::max(deviation, std::abs(series[i].kappa - run.records[i].kappa));
      std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g\n", static_cast<unsigned long long>(series[i].position),
                    series[i].kappa, run.records[i].kappa);
      out << buf;
    }
    if (!out) throw Error("cannot write kappa series for '" + run.entry.label + "'");
    result.kappa_deviation[run.entry.label] = deviation;
  }
  if (result.sweep) {
    std::ofstream out(dir / "alpha_sweep.csv");
    out << "label,alpha,log_alpha,spend_percent,mean_kappa\n";
    for (const auto& r : *result.sweep) {
      std::snprintf(buf, sizeof buf, ",%.6g,%.6f,%.4f,%.6f\n", std::exp(r.log_alpha), r.log_alpha, r.spend_percent,
                    r.mean_kappa);
      out << r.label << buf;
    }
  }

  std::ofstream md(dir / "report.md");
  md << "# Run report\n\n## Requested labels\n\n"
     << "Percent of the stream length, seed documents included.\n\n"
     << "| run | strategy | seed | documents | queries | labels % |\n|---|---|---|---|---|---|\n";
  for (const auto& r : result.spend) {
    md << "| " << r.label << " | " << r.strategy << " | " << r.seed_size << " | " << r.documents << " | " << r.queries
       << " | " << r.spend_percent << " |\n";
  }
  md << "\n## Kappa\n\n| run | window | mode | mean kappa | max recompute deviation |\n|---|---|---|---|---|\n";
  for (const auto& run : runs) {
    std::snprintf(buf, sizeof buf, "%.4f | %.3g", run.mean_kappa(), result.kappa_deviation[run.entry.label]);
    md << "| " << run.entry.label << " | " << run.window << " | " << to_string(run.window_mode) << " | " << buf
       << " |\n";
  }
  if (result.sweep) {
    md << "\n## Uncertainty threshold sweep\n\n| run | ln alpha | labels % | mean kappa |\n|---|---|---|---|\n";
    bool monotone = true;
    for (std::size_t i = 0; i < result.sweep->size(); ++i) {
      const auto& r = (*result.sweep)[i];
      if (i > 0 && r.spend_percent < (*result.sweep)[i - 1].spend_percent) monotone = false;
      std::snprintf(buf, sizeof buf, "%.4g | %.2f | %.4f", r.log_alpha, r.spend_percent, r.mean_kappa);
      md << "| " << r.label << " | " << buf << " |\n";
    }
    md << "\nLabel spend is " << (monotone ? "" : "not ") << "monotone non-decreasing in alpha.\n";
  }
  if (!md) throw Error("cannot write report.md");
  return result;
}

}  // namespace polar
