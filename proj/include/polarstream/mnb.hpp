#pragma once

// Incrementally updatable multinomial naive Bayes over word-class counts.
//
// The whole model is a table of per-class word occurrence counts plus
// per-class document counts. Probabilities are never cached: priors and
// Laplace-smoothed word likelihoods are derived from the counts at prediction
// time, so a vocabulary that grows between predictions is picked up directly.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "polarstream/document.hpp"

namespace polar {

class TrueLabel;

namespace detail {
// Only oracles and the expert-labeled seed may mint a TrueLabel.
struct LabelIssuer {
  static TrueLabel issue(PolarityLabel c);
};
}  // namespace detail

/// A label that came from an oracle or from the expert-labeled seed. Model
/// updates accept nothing else, so a predicted label can never reach the counts.
class TrueLabel {
 public:
  PolarityLabel value() const noexcept { return value_; }
  friend bool operator==(const TrueLabel&, const TrueLabel&) = default;

 private:
  explicit TrueLabel(PolarityLabel c) : value_(c) {}
  friend struct detail::LabelIssuer;
  PolarityLabel value_;
};

inline TrueLabel detail::LabelIssuer::issue(PolarityLabel c) { return TrueLabel(c); }

struct VocabularyStats {
  std::unordered_map<std::string, ClassCounts> word_class_counts;
  ClassCounts class_doc_counts;
  /// Cached per-class sum of word_class_counts.
  ClassCounts total_word_count;
  std::size_t vocab_size = 0;
  /// Number of labeled documents absorbed so far (seed plus oracle answers).
  std::uint64_t seed_doc_count = 0;

  bool contains(const std::string& w) const { return word_class_counts.contains(w); }

  ClassCounts counts(const std::string& w) const {
    const auto it = word_class_counts.find(w);
    return it == word_class_counts.end() ? ClassCounts{} : it->second;
  }

  friend bool operator==(const VocabularyStats&, const VocabularyStats&) = default;
};

struct Prediction {
  PolarityLabel label = PolarityLabel::Positive;
  /// Natural log of prior times the product of in-vocabulary word likelihoods.
  std::array<double, 2> log_joint{0.0, 0.0};
  std::size_t in_vocab_word_count = 0;

  double log_joint_of(PolarityLabel c) const noexcept { return log_joint[index(c)]; }
  double max_log_joint() const noexcept { return std::max(log_joint[0], log_joint[1]); }
};

/// Adds one labeled document: every word occurrence increments its class count,
/// unseen words extend the vocabulary.
inline void update(VocabularyStats& stats, const Document& d, TrueLabel label) {
  const PolarityLabel c = label.value();
  for (const auto& w : d.words) {
    auto [it, inserted] = stats.word_class_counts.try_emplace(w);
    if (inserted) ++stats.vocab_size;
    ++it->second[c];
    ++stats.total_word_count[c];
  }
  ++stats.class_doc_counts[c];
  ++stats.seed_doc_count;
}

/// Trains on the expert-labeled seed. Requires every seed document labeled and
/// both classes present.
inline VocabularyStats init_from_seed(std::span<const Document> seed) {
  ClassCounts present;
  for (const auto& d : seed) {
    if (!d.true_label) throw Error("seed document " + std::to_string(d.id) + " carries no label");
    ++present[*d.true_label];
  }
  if (present[PolarityLabel::Positive] == 0 || present[PolarityLabel::Negative] == 0) {
    throw Error("seed must contain documents of both classes");
  }
  VocabularyStats stats;
  for (const auto& d : seed) update(stats, d, detail::LabelIssuer::issue(*d.true_label));
  return stats;
}

inline double class_prior(const VocabularyStats& stats, PolarityLabel c) {
  if (stats.seed_doc_count == 0) throw Error("class prior of an empty model");
  return static_cast<double>(stats.class_doc_counts[c]) / static_cast<double>(stats.seed_doc_count);
}

/// Laplace-smoothed (N_wc + 1) / (sum_j N_jc + |V|); unknown words have N_wc = 0.
inline double word_likelihood(const VocabularyStats& stats, const std::string& w, PolarityLabel c) {
  if (stats.vocab_size == 0) throw Error("word likelihood over an empty vocabulary");
  const double numerator = static_cast<double>(stats.counts(w)[c]) + 1.0;
  const double denominator =
      static_cast<double>(stats.total_word_count[c]) + static_cast<double>(stats.vocab_size);
  return numerator / denominator;
}

/// Argmax of prior times word likelihoods in log space. Words outside the
/// vocabulary are skipped; exact ties go to Positive.
inline Prediction predict(const VocabularyStats& stats, const Document& d) {
  if (stats.seed_doc_count == 0) throw Error("predict on an uninitialized model");

  // Collapse to (word, multiplicity) in sorted order so the floating-point sum
  // does not depend on word order.
  std::vector<const std::string*> sorted;
  sorted.reserve(d.words.size());
  for (const auto& w : d.words) sorted.push_back(&w);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return *a < *b; });

  Prediction p;
  std::array<double, 2> log_denominator{};
  for (auto c : kLabels) {
    p.log_joint[index(c)] = std::log(class_prior(stats, c));
    log_denominator[index(c)] = std::log(static_cast<double>(stats.total_word_count[c]) +
                                         static_cast<double>(stats.vocab_size));
  }
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && *sorted[j] == *sorted[i]) ++j;
    const auto it = stats.word_class_counts.find(*sorted[i]);
    if (it != stats.word_class_counts.end()) {
      const auto multiplicity = static_cast<double>(j - i);
      p.in_vocab_word_count += j - i;
      for (auto c : kLabels) {
        const double log_lik = std::log(static_cast<double>(it->second[c]) + 1.0) - log_denominator[index(c)];
        p.log_joint[index(c)] += multiplicity * log_lik;
      }
    }
    i = j;
  }
  p.label = p.log_joint_of(PolarityLabel::Negative) > p.log_joint_of(PolarityLabel::Positive)
                ? PolarityLabel::Negative
                : PolarityLabel::Positive;
  return p;
}

/// Lists every violated VocabularyStats invariant; empty when healthy.
inline std::vector<std::string> audit(const VocabularyStats& stats) {
  std::vector<std::string> issues;
  ClassCounts sums;
  std::size_t nonzero = 0;
  for (const auto& [w, counts] : stats.word_class_counts) {
    if (counts.total() == 0) {
      issues.push_back("word '" + w + "' is stored with zero counts");
    } else {
      ++nonzero;
    }
    for (auto c : kLabels) sums[c] += counts[c];
  }
  if (nonzero != stats.vocab_size) {
    issues.push_back("vocab_size is " + std::to_string(stats.vocab_size) + " but " + std::to_string(nonzero) +
                     " words have nonzero counts");
  }
  for (auto c : kLabels) {
    if (sums[c] != stats.total_word_count[c]) {
      issues.push_back("total_word_count[" + std::string(to_token(c)) + "] is " +
                       std::to_string(stats.total_word_count[c]) + " but word counts sum to " +
                       std::to_string(sums[c]));
    }
  }
  if (stats.class_doc_counts.total() != stats.seed_doc_count) {
    issues.push_back("seed_doc_count is " + std::to_string(stats.seed_doc_count) + " but class document counts sum to " +
                     std::to_string(stats.class_doc_counts.total()));
  }
  return issues;
}

// Snapshot format, version 1:
//   {"v":1, "class_doc_counts":{"pos":n,"neg":n}, "totals":{"pos":n,"neg":n},
//    "vocab_size":n, "vocab":[[word, count_pos, count_neg], ...]}   (vocab sorted by word)

inline constexpr int kSnapshotVersion = 1;

inline nlohmann::json save_snapshot(const VocabularyStats& stats) {
  std::vector<const std::pair<const std::string, ClassCounts>*> entries;
  entries.reserve(stats.word_class_counts.size());
  for (const auto& e : stats.word_class_counts) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(), [](const auto* a, const auto* b) { return a->first < b->first; });

  auto vocab = nlohmann::json::array();
  for (const auto* e : entries) {
    vocab.push_back({e->first, e->second[PolarityLabel::Positive], e->second[PolarityLabel::Negative]});
  }
  auto per_class = [](const ClassCounts& c) {
    return nlohmann::json{{"pos", c[PolarityLabel::Positive]}, {"neg", c[PolarityLabel::Negative]}};
  };
  return {{"v", kSnapshotVersion},
          {"class_doc_counts", per_class(stats.class_doc_counts)},
          {"totals", per_class(stats.total_word_count)},
          {"vocab_size", stats.vocab_size},
          {"vocab", std::move(vocab)}};
}

inline VocabularyStats load_snapshot(const nlohmann::json& j) {
  try {
    if (j.at("v").get<int>() != kSnapshotVersion) {
      throw Error("unsupported snapshot version " + j.at("v").dump());
    }
    auto per_class = [](const nlohmann::json& o) {
      ClassCounts c;
      c[PolarityLabel::Positive] = o.at("pos").get<std::uint64_t>();
      c[PolarityLabel::Negative] = o.at("neg").get<std::uint64_t>();
      return c;
    };
    VocabularyStats stats;
    stats.class_doc_counts = per_class(j.at("class_doc_counts"));
    stats.total_word_count = per_class(j.at("totals"));
    stats.vocab_size = j.at("vocab_size").get<std::size_t>();
    stats.seed_doc_count = stats.class_doc_counts.total();
    for (const auto& e : j.at("vocab")) {
      ClassCounts c;
      c[PolarityLabel::Positive] = e.at(1).get<std::uint64_t>();
      c[PolarityLabel::Negative] = e.at(2).get<std::uint64_t>();
      if (!stats.word_class_counts.emplace(e.at(0).get<std::string>(), c).second) {
        throw Error("duplicate vocabulary entry '" + e.at(0).get<std::string>() + "'");
      }
    }
    if (auto issues = audit(stats); !issues.empty()) throw Error("inconsistent snapshot: " + issues.front());
    return stats;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed snapshot: ") + e.what());
  }
}

}  // namespace polar
