#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "support.hpp"

using namespace polar;
using namespace polar::testing;

namespace {

DriftScript two_segment(std::uint64_t seed, double novelty = 0.0) {
  DriftScript s;
  s.seed = seed;
  s.segments = {DriftSegment{3000, 0.8, 0.2, 0.0, FlipSelection::Random, novelty},
                DriftSegment{3000, 0.2, 0.8, 0.1, FlipSelection::Random, novelty}};
  return s;
}

std::string serialized(const DocumentSequence& docs) {
  std::ostringstream out;
  write_stream(out, docs);
  return out.str();
}

}  // namespace

TEST(Drift, SameScriptSameStream) {
  const auto a = synthesize_drift_stream(two_segment(3, 0.05));
  const auto b = synthesize_drift_stream(two_segment(3, 0.05));
  EXPECT_EQ(serialized(a.documents), serialized(b.documents));
  EXPECT_NE(serialized(a.documents), serialized(synthesize_drift_stream(two_segment(4, 0.05)).documents));
}

TEST(Drift, EmpiricalPriorsFollowTheSchedule) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = synthesize_drift_stream(two_segment(seed));
    ASSERT_EQ(s.segments.size(), 2u);
    for (const auto& g : s.segments) {
      std::size_t pos = 0;
      for (std::size_t i = g.start; i < g.start + g.length; ++i) pos += s.documents[i].true_label == kPos;
      EXPECT_EQ(pos, g.positive_documents);
      EXPECT_NEAR(double(pos) / double(g.length), g.positive_prior, 0.05);
    }
    EXPECT_EQ(s.segments[1].flipped_words, 30u);  // 10% of 300 polar words
  }
}

TEST(Drift, ZeroNoveltyDrawsOnlyFromTheInitialVocabulary) {
  const auto script = two_segment(7);
  const auto s = synthesize_drift_stream(script);
  std::unordered_set<std::string> base;
  for (std::size_t i = 0; i < script.vocab_size; ++i) base.insert(detail::synthetic_word('w', i));
  for (const auto& d : s.documents) {
    for (const auto& w : d.words) ASSERT_TRUE(base.contains(w)) << w;
  }
  EXPECT_EQ(s.novel_words, 0u);
}

TEST(Drift, NoveltyInjectsFreshWords) {
  const auto s = synthesize_drift_stream(two_segment(7, 0.1));
  EXPECT_GT(s.novel_words, 0u);
  std::size_t novel = 0, total = 0;
  for (const auto& d : s.documents) {
    for (const auto& w : d.words) {
      ++total;
      novel += w[0] == 'n';
    }
  }
  EXPECT_NEAR(double(novel) / double(total), 0.1, 0.01);
}

TEST(Drift, IdsAreDenseAndWordsSurviveTheTokenizer) {
  const auto s = synthesize_drift_stream(two_segment(5, 0.05));
  for (std::size_t i = 0; i < s.documents.size(); ++i) {
    EXPECT_EQ(s.documents[i].id, i);
    EXPECT_EQ(tokenize(s.documents[i].words.front()), std::vector<std::string>{s.documents[i].words.front()});
  }
}

TEST(Drift, InvalidScriptsAreRejected) {
  auto bad_prior = two_segment(1);
  bad_prior.segments[0].negative_prior = 0.3;
  EXPECT_THROW(synthesize_drift_stream(bad_prior), Error);
  auto empty_segment = two_segment(1);
  empty_segment.segments[1].length = 0;
  EXPECT_THROW(synthesize_drift_stream(empty_segment), Error);
  DriftScript none;
  EXPECT_THROW(synthesize_drift_stream(none), Error);
}

TEST(Drift, ScriptJsonRoundTrip) {
  auto script = reference_drift_script();
  const nlohmann::json j = script;
  const auto back = j.get<DriftScript>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_EQ(j.at("segments")[1].at("flip_selection"), "most_frequent");
  EXPECT_THROW(nlohmann::json::parse(R"({"segments":[{"length":5,"flip_selection":"some"}]})").get<DriftScript>(),
               Error);
}

TEST(Drift, MostFrequentFlipIsDeterministicInTheWordsItFlips) {
  // Flipping by frequency does not consume randomness, so the first segment of
  // two scripts that differ only in flip selection is identical.
  auto a = two_segment(9);
  auto b = a;
  b.segments[1].flip_selection = FlipSelection::MostFrequent;
  const auto sa = synthesize_drift_stream(a), sb = synthesize_drift_stream(b);
  for (std::size_t i = 0; i < 3000; ++i) ASSERT_EQ(sa.documents[i].words, sb.documents[i].words);
}

TEST(Drift, SampleScriptIsTheReferenceScript) {
  std::ifstream in(std::string(POLARSTREAM_SOURCE_DIR) + "/sample/drift.json");
  ASSERT_TRUE(in);
  EXPECT_EQ(nlohmann::json(nlohmann::json::parse(in).get<DriftScript>()), nlohmann::json(reference_drift_script()));
}
