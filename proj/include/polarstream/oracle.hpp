#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "polarstream/mnb.hpp"

namespace polar {

/// Label spend. The reported share counts the seed as already-labeled documents.
struct BudgetLedger {
  std::uint64_t queries_made = 0;
  std::uint64_t stream_position = 0;
  std::uint64_t seed_size = 0;

  double percentage() const noexcept {
    const auto denom = stream_position + seed_size;
    if (denom == 0) return 0.0;
    return 100.0 * static_cast<double>(queries_made + seed_size) / static_cast<double>(denom);
  }
};

/// Integer percentage for tables.
inline long spend_report(const BudgetLedger& ledger) { return std::lround(ledger.percentage()); }

/// What the annotator sees for one query. Never carries the ground truth.
struct PendingQuery {
  std::uint64_t doc_id = 0;
  std::vector<std::string> words;
  PolarityLabel predicted = PolarityLabel::Positive;
  double score = 0.0;
  double prior_positive = 0.0;
  double prior_negative = 0.0;
  std::size_t vocab_size = 0;
  double kappa = 0.0;
};

/// Answers from the stream's own labels (simulation).
class GroundTruthOracle {
 public:
  std::optional<TrueLabel> request_label(const Document& d, const PendingQuery&) const {
    if (!d.true_label) throw Error("document " + std::to_string(d.id) + " has no ground-truth label");
    return detail::LabelIssuer::issue(*d.true_label);
  }
};

struct RunStatus {
  bool started = false;
  bool finished = false;
  std::uint64_t position = 0;
  std::uint64_t queries = 0;
  std::uint64_t abandoned = 0;
  std::uint64_t seed_size = 0;
  double spend_percent = 0.0;
  double kappa = 0.0;
  std::size_t vocab_size = 0;
};

enum class AnswerStatus { Accepted, Conflict };

/// Single-slot handoff between the experiment loop and whoever answers queries
/// (the HTTP label service). At most one query is pending at any time.
class LabelExchange {
 public:
  /// Publishes `query` and blocks until it is answered, `timeout` passes, or
  /// the exchange is closed. Returns nullopt for the latter two.
  std::optional<PolarityLabel> ask(PendingQuery query, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    if (closed_) return std::nullopt;
    pending_ = std::move(query);
    answer_.reset();
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    cv_.wait_until(lock, deadline, [&] { return answer_.has_value() || closed_; });
    pending_.reset();
    auto result = answer_;
    answer_.reset();
    return result;
  }

  std::optional<PendingQuery> pending() const {
    std::lock_guard lock(mutex_);
    return pending_;
  }

  /// Accepts a label only for the currently pending document, exactly once.
  AnswerStatus answer(std::uint64_t doc_id, PolarityLabel label) {
    {
      std::lock_guard lock(mutex_);
      if (!pending_ || pending_->doc_id != doc_id || answer_) return AnswerStatus::Conflict;
      answer_ = label;
      pending_.reset();
    }
    cv_.notify_all();
    return AnswerStatus::Accepted;
  }

  void publish(const RunStatus& s) {
    std::lock_guard lock(mutex_);
    status_ = s;
  }

  RunStatus status() const {
    std::lock_guard lock(mutex_);
    return status_;
  }

  /// Releases a blocked ask() and refuses further queries.
  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::optional<PendingQuery> pending_;
  std::optional<PolarityLabel> answer_;
  RunStatus status_;
  bool closed_ = false;
};

/// Answers come from a human through a LabelExchange. Unanswered queries are
/// abandoned after the timeout and the document is skipped.
class InteractiveOracle {
 public:
  explicit InteractiveOracle(LabelExchange& exchange,
                             std::chrono::milliseconds timeout = std::chrono::seconds(120))
      : exchange_(&exchange), timeout_(timeout) {}

  std::optional<TrueLabel> request_label(const Document&, const PendingQuery& query) const {
    const auto label = exchange_->ask(query, timeout_);
    if (!label) return std::nullopt;
    return detail::LabelIssuer::issue(*label);
  }

  LabelExchange& exchange() const noexcept { return *exchange_; }

 private:
  LabelExchange* exchange_;
  std::chrono::milliseconds timeout_;
};

}  // namespace polar
