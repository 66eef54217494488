#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace polar;
using namespace polar::testing;

namespace {

DocumentSequence small_drift_stream(std::uint64_t seed = 11) {
  DriftScript s;
  s.seed = seed;
  s.segments = {DriftSegment{600, 0.7, 0.3, 0.0, FlipSelection::Random, 0.02},
                DriftSegment{600, 0.3, 0.7, 0.2, FlipSelection::MostFrequent, 0.05}};
  return synthesize_drift_stream(s).documents;
}

struct Collected {
  RunResult result;
  std::vector<PrequentialRecord> records;
};

Collected run(const DocumentSequence& docs, std::size_t seed_size, const Strategy& strategy,
              RunOptions options = RunOptions{50}) {
  Collected c;
  const std::span<const Document> all(docs);
  c.result = run_stream(all.first(seed_size), source_of(all.subspan(seed_size)), strategy, GroundTruthOracle{}, options,
                        [&](const PrequentialRecord& r) { c.records.push_back(r); });
  return c;
}

ExperimentConfig config_for(const TempDir& dir, const std::string& stream, const std::string& body,
                            const std::string& out) {
  const auto path = dir.write(out + ".conf", "stream = " + stream + "\nseed_size = 40\noutput_dir = " + dir.file(out) +
                                                 "\nwindow = 50\n" + body);
  return load_config(path);
}

}  // namespace

TEST(Harness, NeverLeavesTheSeedModelUntouched) {
  const auto docs = small_drift_stream();
  const auto c = run(docs, 40, Strategy::never());
  EXPECT_EQ(save_snapshot(c.result.model).dump(),
            save_snapshot(init_from_seed(std::span<const Document>(docs).first(40))).dump());
  EXPECT_EQ(c.result.ledger.queries_made, 0u);
  EXPECT_EQ(c.records.size(), docs.size() - 40);
}

TEST(Harness, AlwaysEqualsBatchTrainingOnTheWholeStream) {
  const auto docs = small_drift_stream();
  const auto c = run(docs, 40, Strategy::always());
  EXPECT_EQ(c.result.model, init_from_seed(docs));
  EXPECT_EQ(c.result.ledger.percentage(), 100.0);
}

TEST(Harness, SampledRecordsMatchTheLedger) {
  const auto docs = small_drift_stream();
  for (const auto& strategy : {Strategy::information_gain(), Strategy::uncertainty_log(-25), Strategy::random(0.4, 3)}) {
    const auto c = run(docs, 40, strategy);
    const auto sampled = std::count_if(c.records.begin(), c.records.end(), [](const auto& r) { return r.sampled; });
    EXPECT_EQ(std::uint64_t(sampled), c.result.ledger.queries_made);
    EXPECT_EQ(c.result.ledger.stream_position, c.records.size());
  }
}

TEST(Harness, PredictionsOnlyUseEarlierLabels) {
  // Replays the record log against a shadow model that is fed only the
  // documents marked sampled, after their own prediction.
  const auto docs = small_drift_stream(4);
  for (const auto& strategy : {Strategy::information_gain(), Strategy::uncertainty_log(-20), Strategy::random(0.3, 8)}) {
    const auto c = run(docs, 40, strategy);
    auto shadow = init_from_seed(std::span<const Document>(docs).first(40));
    ConfusionWindow window(50);
    for (std::size_t i = 0; i < c.records.size(); ++i) {
      const auto& d = docs[40 + i];
      const auto& r = c.records[i];
      ASSERT_EQ(r.doc_id, d.id);
      ASSERT_EQ(r.predicted, predict(shadow, d).label) << "document " << d.id;
      ASSERT_EQ(r.truth, *d.true_label);
      window.push(r.predicted, r.truth);
      ASSERT_EQ(r.kappa, kappa(window));
      if (r.sampled) update(shadow, d, truth(*d.true_label));
      ASSERT_EQ(r.vocab_size_after, shadow.vocab_size);
    }
    EXPECT_EQ(shadow, c.result.model);
  }
}

TEST(Harness, IdenticalInputsGiveIdenticalRecords) {
  const auto docs = small_drift_stream();
  for (const auto& strategy : {Strategy::information_gain(), Strategy::random(0.3, 21)}) {
    EXPECT_EQ(run(docs, 40, strategy).records, run(docs, 40, strategy).records);
  }
}

TEST(Harness, KappaPerWindowIsTheBlockMean) {
  const auto docs = small_drift_stream();
  const auto c = run(docs, 40, Strategy::information_gain());
  ASSERT_EQ(c.result.kappa_per_window.size(), (c.records.size() + 49) / 50);
  double first = 0.0;
  for (std::size_t i = 0; i < 50; ++i) first += c.records[i].kappa;
  EXPECT_DOUBLE_EQ(c.result.kappa_per_window[0], first / 50);
}

TEST(Harness, StopFlagInterrupts) {
  const auto docs = small_drift_stream();
  std::atomic<bool> stop{true};
  const auto c = run(docs, 40, Strategy::always(), RunOptions{50, WindowMode::Sliding, &stop});
  EXPECT_TRUE(c.result.interrupted);
  EXPECT_TRUE(c.records.empty());
}

TEST(Harness, UnlabeledStreamDocumentIsAnError) {
  DocumentSequence docs{doc(0, {"a"}, kPos), doc(1, {"b"}, kNeg), doc(2, {"c"})};
  EXPECT_THROW(run(docs, 2, Strategy::never()), Error);
}

TEST(Experiment, WritesRecordsSummaryAndModel) {
  TempDir dir;
  const auto docs = small_drift_stream();
  write_stream(dir.file("s.txt"), docs);
  const auto cfg = config_for(dir, dir.file("s.txt"), "strategy = never\n", "never");
  const auto result = run_experiment(cfg);
  const auto records = read_records(dir.file("never/records.csv"));
  EXPECT_EQ(records.size(), docs.size() - 40);
  const auto summary = nlohmann::json::parse(read_file(dir.file("never/summary.json")));
  EXPECT_EQ(summary.at("strategy"), "never");
  EXPECT_EQ(summary.at("queries"), 0);
  EXPECT_DOUBLE_EQ(summary.at("spend_percent").get<double>(), 100.0 * 40 / docs.size());
  EXPECT_EQ(summary.at("final_vocab_size"), result.model.vocab_size);
  EXPECT_EQ(load_snapshot(nlohmann::json::parse(read_file(dir.file("never/model.json")))), result.model);
}

TEST(Experiment, SameConfigSameRecordsFile) {
  TempDir dir;
  write_stream(dir.file("s.txt"), small_drift_stream());
  const auto a = config_for(dir, dir.file("s.txt"), "strategy = random\nbudget = 0.25\nrng_seed = 3\n", "a");
  auto b = a;
  b.output_dir = dir.file("b");
  run_experiment(a);
  run_experiment(b);
  EXPECT_EQ(read_file(dir.file("a/records.csv")), read_file(dir.file("b/records.csv")));
}

TEST(Experiment, VariantsAreBuiltFromTheConfig) {
  TempDir dir;
  write_stream(dir.file("s.txt"), small_drift_stream());
  const auto fixed = config_for(dir, dir.file("s.txt"), "strategy = always\nvariant = fixed-vocab\n", "f");
  const auto r = run_experiment(fixed);
  const auto seed_vocab = seed_vocabulary(load_corpus(dir.file("s.txt")), 40).size();
  EXPECT_EQ(r.model.vocab_size, seed_vocab);
}

TEST(Experiment, ShortStreamIsReported) {
  TempDir dir;
  dir.write("s.txt", "pos\ta\nneg\tb\npos\tc\n");
  const auto cfg = config_for(dir, dir.file("s.txt"), "strategy = never\n", "o");
  EXPECT_THROW(run_experiment(cfg), Error);
}
