#pragma once

// Shared test helpers: an independent naive Bayes recomputation, random
// document generators and scratch directories.

#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "polarstream/polarstream.hpp"

namespace polar::testing {

/// Mints oracle labels for tests through the ground-truth oracle.
inline TrueLabel truth(PolarityLabel c) {
  Document d;
  d.true_label = c;
  return *GroundTruthOracle{}.request_label(d, {});
}

inline Document doc(std::uint64_t id, std::vector<std::string> words,
                    std::optional<PolarityLabel> label = std::nullopt) {
  return Document{id, std::move(words), label};
}

inline Document doc_from(std::uint64_t id, const std::string& text, std::optional<PolarityLabel> label) {
  return Document{id, tokenize(text), label};
}

constexpr auto kPos = PolarityLabel::Positive;
constexpr auto kNeg = PolarityLabel::Negative;

/// Recomputes the classifier from a flat log of (document, label) updates with
/// no incremental state at all: every count is a fresh scan of the log.
class BruteForceNaiveBayes {
 public:
  void add(const Document& d, PolarityLabel c) { log_.emplace_back(d.words, c); }

  std::size_t docs(PolarityLabel c) const {
    std::size_t n = 0;
    for (const auto& [w, l] : log_) n += (l == c);
    return n;
  }

  std::size_t occurrences(const std::string& word, PolarityLabel c) const {
    std::size_t n = 0;
    for (const auto& [words, l] : log_) {
      if (l != c) continue;
      for (const auto& w : words) n += (w == word);
    }
    return n;
  }

  std::size_t total_occurrences(PolarityLabel c) const {
    std::size_t n = 0;
    for (const auto& [words, l] : log_) {
      if (l == c) n += words.size();
    }
    return n;
  }

  bool known(const std::string& word) const {
    for (const auto& [words, l] : log_) {
      for (const auto& w : words) {
        if (w == word) return true;
      }
    }
    return false;
  }

  std::size_t vocabulary() const {
    std::vector<std::string> all;
    for (const auto& [words, l] : log_) all.insert(all.end(), words.begin(), words.end());
    std::sort(all.begin(), all.end());
    return static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
  }

  /// Direct evaluation of ln P(c) + sum over in-vocabulary occurrences of ln P(w|c).
  std::array<double, 2> log_joint(const Document& d) const {
    const double n = static_cast<double>(log_.size());
    const double v = static_cast<double>(vocabulary());
    std::array<double, 2> out{};
    for (auto c : kLabels) {
      double s = std::log(static_cast<double>(docs(c)) / n);
      for (const auto& w : d.words) {
        if (!known(w)) continue;
        s += std::log((static_cast<double>(occurrences(w, c)) + 1.0) / (static_cast<double>(total_occurrences(c)) + v));
      }
      out[index(c)] = s;
    }
    return out;
  }

 private:
  std::vector<std::pair<std::vector<std::string>, PolarityLabel>> log_;
};

/// Random labeled document over a small alphabet "a".."?" of `vocab` words.
inline Document random_document(std::mt19937_64& rng, std::uint64_t id, std::size_t vocab, std::size_t max_len,
                                std::optional<PolarityLabel> label = std::nullopt) {
  std::uniform_int_distribution<std::size_t> len(1, max_len), word(0, vocab - 1);
  std::bernoulli_distribution coin(0.5);
  Document d;
  d.id = id;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) d.words.push_back("w" + std::to_string(word(rng)));
  d.true_label = label ? *label : (coin(rng) ? kPos : kNeg);
  return d;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("polarstream_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream out(path_ / name);
    out << content;
    return file(name);
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// The drift stream used by the integration and acceptance suites: 20,000
/// documents, class prior flip at the midpoint, the most frequent 10% of polar
/// words flipped. Kept in sync with sample/drift.json.
inline DriftScript reference_drift_script(std::uint64_t seed = 2015) {
  DriftScript s;
  s.seed = seed;
  s.affinity = 5.0;
  s.segments = {
      DriftSegment{10000, 0.8, 0.2, 0.0, FlipSelection::Random, 0.0},
      DriftSegment{10000, 0.2, 0.8, 0.1, FlipSelection::MostFrequent, 0.0},
  };
  return s;
}

}  // namespace polar::testing
