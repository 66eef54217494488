#pragma once

// Synthetic opinion streams with scripted drift: class-prior shifts, word
// polarity flips and injection of previously unseen words.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarstream/document.hpp"

namespace polar {

/// Which polar words a segment flips.
enum class FlipSelection {
  Random,        // uniformly among the polar words
  MostFrequent,  // the highest-frequency polar words first
};

struct DriftSegment {
  std::size_t length = 0;
  double positive_prior = 0.5;
  double negative_prior = 0.5;
  /// Share of the currently polar words whose polarity is inverted when the segment starts.
  double flip_fraction = 0.0;
  FlipSelection flip_selection = FlipSelection::Random;
  /// Probability that a generated token is a word outside the initial vocabulary.
  double novelty_rate = 0.0;
};

struct DriftScript {
  std::size_t vocab_size = 500;
  double zipf_exponent = 1.0;
  /// Share of the initial vocabulary that carries a class affinity.
  double polar_fraction = 0.6;
  /// Relative weight of a polar word inside its own class (weight 1 elsewhere).
  double affinity = 4.0;
  std::size_t min_words = 3;
  std::size_t max_words = 15;
  /// Among novel tokens, the share that mint a brand-new word instead of reusing one.
  double fresh_novel_share = 0.3;
  std::vector<DriftSegment> segments;
  std::uint64_t seed = 1;
};

struct SegmentTruth {
  std::size_t start = 0;
  std::size_t length = 0;
  double positive_prior = 0.0;
  double negative_prior = 0.0;
  std::size_t flipped_words = 0;
  double novelty_rate = 0.0;
  std::size_t positive_documents = 0;
};

struct DriftStream {
  DocumentSequence documents;
  std::vector<SegmentTruth> segments;
  std::size_t initial_vocab_size = 0;
  std::size_t novel_words = 0;
};

inline void validate(const DriftScript& s) {
  auto fail = [](const std::string& m) { throw Error("invalid drift script: " + m); };
  if (s.vocab_size < 2) fail("vocab_size must be at least 2");
  if (s.segments.empty()) fail("at least one segment is required");
  if (s.min_words == 0 || s.min_words > s.max_words) fail("need 1 <= min_words <= max_words");
  if (!(s.affinity > 0.0)) fail("affinity must be positive");
  if (s.polar_fraction < 0.0 || s.polar_fraction > 1.0) fail("polar_fraction must lie in [0,1]");
  if (s.fresh_novel_share < 0.0 || s.fresh_novel_share > 1.0) fail("fresh_novel_share must lie in [0,1]");
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const auto& g = s.segments[i];
    const std::string at = "segment " + std::to_string(i) + ": ";
    if (g.length == 0) fail(at + "length must be positive");
    if (g.positive_prior < 0.0 || g.negative_prior < 0.0 ||
        std::abs(g.positive_prior + g.negative_prior - 1.0) > 1e-9) {
      fail(at + "class priors must be non-negative and sum to 1");
    }
    if (g.flip_fraction < 0.0 || g.flip_fraction > 1.0) fail(at + "flip_fraction must lie in [0,1]");
    if (g.novelty_rate < 0.0 || g.novelty_rate > 1.0) fail(at + "novelty_rate must lie in [0,1]");
  }
}

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

// Letters only, so generated words survive the text tokenizer unchanged.
inline std::string synthetic_word(char prefix, std::size_t i) {
  std::string s(1, prefix);
  do {
    s.push_back(static_cast<char>('a' + i % 26));
    i /= 26;
  } while (i > 0);
  return s;
}

class CumulativeSampler {
 public:
  explicit CumulativeSampler(const std::vector<double>& weights) : cumulative_(weights.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) cumulative_[i] = acc += weights[i];
  }
  std::size_t operator()(std::mt19937_64& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace detail

inline DriftStream synthesize_drift_stream(const DriftScript& script) {
  validate(script);
  std::mt19937_64 rng(script.seed);

  // Polarity per base word: +1 positive, -1 negative, 0 neutral.
  std::vector<int> polarity(script.vocab_size, 0);
  {
    std::vector<std::size_t> order(script.vocab_size);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[detail::uniform_index(rng, i)]);
    const auto polar = static_cast<std::size_t>(std::llround(script.polar_fraction * double(script.vocab_size)));
    for (std::size_t k = 0; k < polar; ++k) polarity[order[k]] = (k % 2 == 0) ? 1 : -1;
  }
  std::vector<double> zipf(script.vocab_size);
  for (std::size_t i = 0; i < zipf.size(); ++i) zipf[i] = 1.0 / std::pow(double(i + 1), script.zipf_exponent);

  std::vector<std::string> novel_pos, novel_neg;
  std::size_t novel_created = 0;
  const double match_share = script.affinity / (script.affinity + 1.0);

  DriftStream out;
  out.initial_vocab_size = script.vocab_size;
  std::uint64_t next_id = 0;

  for (const auto& seg : script.segments) {
    SegmentTruth truth;
    truth.start = out.documents.size();
    truth.length = seg.length;
    truth.positive_prior = seg.positive_prior;
    truth.negative_prior = seg.negative_prior;
    truth.novelty_rate = seg.novelty_rate;

    if (seg.flip_fraction > 0.0) {
      std::vector<std::size_t> polar_words;
      for (std::size_t i = 0; i < polarity.size(); ++i) {
        if (polarity[i] != 0) polar_words.push_back(i);
      }
      const auto n_flip = static_cast<std::size_t>(std::llround(seg.flip_fraction * double(polar_words.size())));
      for (std::size_t k = 0; k < n_flip; ++k) {
        // polar_words is in ascending index order, i.e. descending base frequency.
        if (seg.flip_selection == FlipSelection::Random) {
          const std::size_t j = k + detail::uniform_index(rng, polar_words.size() - k);
          std::swap(polar_words[k], polar_words[j]);
        }
        polarity[polar_words[k]] = -polarity[polar_words[k]];
      }
      truth.flipped_words = n_flip;
    }

    std::vector<double> w_pos(script.vocab_size), w_neg(script.vocab_size);
    for (std::size_t i = 0; i < script.vocab_size; ++i) {
      w_pos[i] = zipf[i] * (polarity[i] > 0 ? script.affinity : 1.0);
      w_neg[i] = zipf[i] * (polarity[i] < 0 ? script.affinity : 1.0);
    }
    const detail::CumulativeSampler sample_pos(w_pos), sample_neg(w_neg);

    for (std::size_t n = 0; n < seg.length; ++n) {
      const bool positive = detail::uniform01(rng) < seg.positive_prior;
      const auto label = positive ? PolarityLabel::Positive : PolarityLabel::Negative;
      if (positive) ++truth.positive_documents;
      const std::size_t len = script.min_words + detail::uniform_index(rng, script.max_words - script.min_words + 1);

      Document d;
      d.id = next_id++;
      d.true_label = label;
      d.words.reserve(len);
      for (std::size_t t = 0; t < len; ++t) {
        if (seg.novelty_rate > 0.0 && detail::uniform01(rng) < seg.novelty_rate) {
          // Novel words lean toward the class of the document that introduces them.
          const bool matches = detail::uniform01(rng) < match_share;
          const bool word_positive = matches == positive;
          auto& pool = word_positive ? novel_pos : novel_neg;
          if (pool.empty() || detail::uniform01(rng) < script.fresh_novel_share) {
            pool.push_back(detail::synthetic_word('n', novel_created++));
            d.words.push_back(pool.back());
          } else {
            d.words.push_back(pool[detail::uniform_index(rng, pool.size())]);
          }
          continue;
        }
        const std::size_t w = positive ? sample_pos(rng) : sample_neg(rng);
        d.words.push_back(detail::synthetic_word('w', w));
      }
      out.documents.push_back(std::move(d));
    }
    out.segments.push_back(truth);
  }
  out.novel_words = novel_created;
  return out;
}

inline void from_json(const nlohmann::json& j, DriftSegment& s) {
  s.length = j.at("length").get<std::size_t>();
  if (j.contains("prior")) {
    const auto& p = j.at("prior");
    if (!p.is_array() || p.size() != 2) throw Error("segment prior must be a [positive, negative] pair");
    s.positive_prior = p[0].get<double>();
    s.negative_prior = p[1].get<double>();
  }
  s.flip_fraction = j.value("flip_fraction", 0.0);
  const auto selection = j.value("flip_selection", std::string("random"));
  if (selection == "random") s.flip_selection = FlipSelection::Random;
  else if (selection == "most_frequent") s.flip_selection = FlipSelection::MostFrequent;
  else throw Error("flip_selection must be random or most_frequent, got '" + selection + "'");
  s.novelty_rate = j.value("novelty_rate", 0.0);
}

inline void to_json(nlohmann::json& j, const DriftSegment& s) {
  j = {{"length", s.length},
       {"prior", {s.positive_prior, s.negative_prior}},
       {"flip_fraction", s.flip_fraction},
       {"flip_selection", s.flip_selection == FlipSelection::Random ? "random" : "most_frequent"},
       {"novelty_rate", s.novelty_rate}};
}

inline void from_json(const nlohmann::json& j, DriftScript& s) {
  const DriftScript defaults;
  s.vocab_size = j.value("vocab_size", defaults.vocab_size);
  s.zipf_exponent = j.value("zipf_exponent", defaults.zipf_exponent);
  s.polar_fraction = j.value("polar_fraction", defaults.polar_fraction);
  s.affinity = j.value("affinity", defaults.affinity);
  s.min_words = j.value("min_words", defaults.min_words);
  s.max_words = j.value("max_words", defaults.max_words);
  s.fresh_novel_share = j.value("fresh_novel_share", defaults.fresh_novel_share);
  s.seed = j.value("seed", defaults.seed);
  s.segments = j.at("segments").get<std::vector<DriftSegment>>();
}

inline void to_json(nlohmann::json& j, const DriftScript& s) {
  j = {{"vocab_size", s.vocab_size},         {"zipf_exponent", s.zipf_exponent},
       {"polar_fraction", s.polar_fraction}, {"affinity", s.affinity},
       {"min_words", s.min_words},           {"max_words", s.max_words},
       {"fresh_novel_share", s.fresh_novel_share}, {"seed", s.seed},
       {"segments", s.segments}};
}

inline nlohmann::json segment_schedule(const DriftStream& s) {
  auto arr = nlohmann::json::array();
  for (const auto& g : s.segments) {
    arr.push_back({{"start", g.start},
                   {"length", g.length},
                   {"prior", {g.positive_prior, g.negative_prior}},
                   {"flipped_words", g.flipped_words},
                   {"novelty_rate", g.novelty_rate},
                   {"positive_documents", g.positive_documents}});
  }
  return arr;
}

}  // namespace polar
