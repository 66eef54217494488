#include <gtest/gtest.h>

#include <future>
#include <thread>

#include "support.hpp"

using namespace polar;
using namespace polar::testing;
using namespace std::chrono_literals;

TEST(Ledger, SpendPercentages) {
  EXPECT_EQ(spend_report({350, 900, 100}), 45);
  EXPECT_EQ(spend_report({0, 900, 100}), 10);
  EXPECT_EQ(spend_report({900, 900, 100}), 100);
  EXPECT_DOUBLE_EQ(BudgetLedger({350, 900, 100}).percentage(), 45.0);
  EXPECT_EQ(BudgetLedger{}.percentage(), 0.0);
}

TEST(GroundTruth, ReturnsTheStreamLabel) {
  GroundTruthOracle oracle;
  const auto label = oracle.request_label(doc(0, {"x"}, kNeg), {});
  ASSERT_TRUE(label.has_value());
  EXPECT_EQ(label->value(), kNeg);
  EXPECT_THROW(oracle.request_label(doc(1, {"x"}), {}), Error);
}

TEST(Exchange, AnswerReleasesTheAsker) {
  LabelExchange ex;
  PendingQuery q;
  q.doc_id = 7;
  auto asked = std::async(std::launch::async, [&] { return ex.ask(q, 5s); });
  while (!ex.pending()) std::this_thread::sleep_for(1ms);
  EXPECT_EQ(ex.pending()->doc_id, 7u);
  EXPECT_EQ(ex.answer(8, kPos), AnswerStatus::Conflict);
  EXPECT_EQ(ex.answer(7, kNeg), AnswerStatus::Accepted);
  EXPECT_EQ(ex.answer(7, kNeg), AnswerStatus::Conflict);
  EXPECT_EQ(asked.get(), kNeg);
  EXPECT_FALSE(ex.pending().has_value());
}

TEST(Exchange, TimeoutAbandonsTheQuery) {
  LabelExchange ex;
  PendingQuery q;
  q.doc_id = 3;
  EXPECT_FALSE(ex.ask(q, 20ms).has_value());
  EXPECT_FALSE(ex.pending().has_value());
  EXPECT_EQ(ex.answer(3, kPos), AnswerStatus::Conflict);
}

TEST(Exchange, CloseReleasesAndRefuses) {
  LabelExchange ex;
  auto asked = std::async(std::launch::async, [&] { return ex.ask(PendingQuery{}, 60s); });
  while (!ex.pending()) std::this_thread::sleep_for(1ms);
  ex.close();
  EXPECT_FALSE(asked.get().has_value());
  EXPECT_TRUE(ex.closed());
  EXPECT_FALSE(ex.ask(PendingQuery{}, 60s).has_value());
}

TEST(Interactive, AbandonedQueriesLeaveTheModelAndLedgerAlone) {
  LabelExchange ex;
  InteractiveOracle oracle(ex, 1ms);
  DocumentSequence docs{doc(0, {"a"}, kPos), doc(1, {"b"}, kNeg), doc(2, {"c"}, kPos), doc(3, {"a", "d"}, kNeg)};
  const std::span<const Document> all(docs);
  const auto r = run_stream(all.first(2), source_of(all.subspan(2)), Strategy::always(), oracle, RunOptions{});
  EXPECT_EQ(r.ledger.queries_made, 0u);
  EXPECT_EQ(r.abandoned, 2u);
  EXPECT_EQ(r.model, init_from_seed(all.first(2)));
  EXPECT_EQ(r.ledger.percentage(), 50.0);
}
