#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "polarstream/document.hpp"
#include "polarstream/tokenizer.hpp"

namespace polar {

/// How the text after the label column is turned into words.
enum class CorpusFormat {
  Tokens,  // whitespace separated, taken verbatim
  Text,    // raw text, run through tokenize()
};

enum class StreamVariant { Original, Reordered, FixedVocab };

inline std::string_view to_string(StreamVariant v) noexcept {
  switch (v) {
    case StreamVariant::Original: return "original";
    case StreamVariant::Reordered: return "reordered";
    case StreamVariant::FixedVocab: return "fixed-vocab";
  }
  return "original";
}

inline std::optional<StreamVariant> parse_variant(std::string_view s) noexcept {
  if (s == "original") return StreamVariant::Original;
  if (s == "reordered") return StreamVariant::Reordered;
  if (s == "fixed-vocab" || s == "fixed_vocab") return StreamVariant::FixedVocab;
  return std::nullopt;
}

struct IngestionStats {
  std::size_t lines_read = 0;
  std::size_t documents = 0;
  std::size_t dropped_empty = 0;
};

using Vocabulary = std::unordered_set<std::string>;

namespace detail {

inline std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

/// Pull-based reader over a stream file (`<label>\t<tokens>` per line).
/// Documents are produced one at a time so unbounded files never sit in memory.
class StreamReader {
 public:
  explicit StreamReader(const std::string& path, CorpusFormat format = CorpusFormat::Tokens,
                        TokenizerConfig tokenizer = {})
      : in_(path), path_(path), format_(format), tokenizer_(tokenizer) {
    if (!in_) throw Error("cannot read stream file '" + path + "'");
  }

  /// Next non-empty document, or nullopt at end of file. Throws ParseError on a
  /// malformed line.
  std::optional<Document> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++stats_.lines_read;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw ParseError(stats_.lines_read, "expected '<label>\\t<tokens>' in " + path_);
      }
      const std::string_view head = std::string_view(line).substr(0, tab);
      const auto label = parse_label(head);
      if (!label) {
        throw ParseError(stats_.lines_read,
                         "invalid label '" + std::string(head) + "' (expected pos or neg) in " + path_);
      }
      const std::string_view body = std::string_view(line).substr(tab + 1);
      auto words = format_ == CorpusFormat::Tokens ? detail::split_whitespace(body)
                                                   : tokenize(body, tokenizer_);
      if (words.empty()) {
        ++stats_.dropped_empty;
        continue;
      }
      Document d{next_id_++, std::move(words), *label};
      ++stats_.documents;
      return d;
    }
    return std::nullopt;
  }

  const IngestionStats& stats() const noexcept { return stats_; }

 private:
  std::ifstream in_;
  std::string path_;
  CorpusFormat format_;
  TokenizerConfig tokenizer_;
  IngestionStats stats_;
  std::uint64_t next_id_ = 0;
};

inline DocumentSequence load_corpus(const std::string& path, CorpusFormat format = CorpusFormat::Tokens,
                                    IngestionStats* stats = nullptr, TokenizerConfig tokenizer = {}) {
  StreamReader reader(path, format, tokenizer);
  DocumentSequence docs;
  while (auto d = reader.next()) docs.push_back(std::move(*d));
  if (stats) *stats = reader.stats();
  if (docs.size() < 2) {
    throw Error("stream file '" + path + "' holds " + std::to_string(docs.size()) +
                " document(s); at least 2 are required");
  }
  return docs;
}

/// Writes documents in the stream file format. Unlabeled documents are rejected.
inline void write_stream(std::ostream& out, const DocumentSequence& docs) {
  for (const auto& d : docs) {
    if (!d.true_label) throw Error("document " + std::to_string(d.id) + " has no label to write");
    out << to_token(*d.true_label) << '\t';
    for (std::size_t i = 0; i < d.words.size(); ++i) {
      if (i) out << ' ';
      out << d.words[i];
    }
    out << '\n';
  }
}

inline void write_stream(const std::string& path, const DocumentSequence& docs) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_stream(out, docs);
  if (!out) throw Error("write to '" + path + "' failed");
}

/// Reassigns ids 0..n-1 in sequence order, as reloading a written stream would.
inline DocumentSequence renumber(DocumentSequence docs) {
  for (std::size_t i = 0; i < docs.size(); ++i) docs[i].id = i;
  return docs;
}

/// Checks the seed split: 2 <= seed_size < length and both classes in the seed.
inline void validate_seed(const DocumentSequence& docs, std::size_t seed_size) {
  if (seed_size < 2) throw Error("seed_size must be at least 2");
  if (seed_size >= docs.size()) {
    throw Error("seed_size " + std::to_string(seed_size) + " must be smaller than the stream length " +
                std::to_string(docs.size()));
  }
  bool seen[2] = {false, false};
  for (std::size_t i = 0; i < seed_size; ++i) {
    if (!docs[i].true_label) throw Error("seed document " + std::to_string(docs[i].id) + " is unlabeled");
    seen[index(*docs[i].true_label)] = true;
  }
  if (!seen[0] || !seen[1]) throw Error("seed must contain at least one document of each class");
}

inline Vocabulary seed_vocabulary(const DocumentSequence& docs, std::size_t seed_size) {
  Vocabulary v;
  for (std::size_t i = 0; i < std::min(seed_size, docs.size()); ++i) {
    v.insert(docs[i].words.begin(), docs[i].words.end());
  }
  return v;
}

inline std::size_t distinct_words(const DocumentSequence& docs) {
  Vocabulary v;
  for (const auto& d : docs) v.insert(d.words.begin(), d.words.end());
  return v.size();
}

/// Count of word occurrences of `d` that belong to `vocab`.
inline std::size_t known_occurrences(const Document& d, const Vocabulary& vocab) {
  return static_cast<std::size_t>(
      std::count_if(d.words.begin(), d.words.end(), [&](const auto& w) { return vocab.contains(w); }));
}

struct ReorderResult {
  DocumentSequence documents;
  /// In-seed-vocabulary share of word occurrences, aligned with `documents`.
  std::vector<double> known_fractions;
  /// Set when fewer than seed_size documents were fully covered by the seed vocabulary.
  bool seed_fallback = false;
};

/// Orders the stream so that the share of seed-vocabulary words decays over time:
/// documents are sorted by descending in-vocabulary fraction, ties by ascending id.
inline ReorderResult reorder_for_vocab_novelty(const DocumentSequence& corpus, std::size_t seed_size) {
  validate_seed(corpus, seed_size);
  const Vocabulary vocab = seed_vocabulary(corpus, seed_size);

  struct Key {
    std::size_t known;
    std::size_t total;
    std::size_t pos;
  };
  std::vector<Key> keys;
  keys.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    keys.push_back({known_occurrences(corpus[i], vocab), corpus[i].words.size(), i});
  }
  // Exact rational comparison: known_a/total_a > known_b/total_b.
  std::stable_sort(keys.begin(), keys.end(), [&](const Key& a, const Key& b) {
    const auto lhs = static_cast<unsigned __int128>(a.known) * b.total;
    const auto rhs = static_cast<unsigned __int128>(b.known) * a.total;
    if (lhs != rhs) return lhs > rhs;
    return corpus[a.pos].id < corpus[b.pos].id;
  });

  ReorderResult result;
  result.documents.reserve(corpus.size());
  result.known_fractions.reserve(corpus.size());
  for (const auto& k : keys) {
    result.documents.push_back(corpus[k.pos]);
    result.known_fractions.push_back(static_cast<double>(k.known) / static_cast<double>(k.total));
  }
  for (std::size_t i = 0; i < seed_size; ++i) {
    if (keys[i].known != keys[i].total) {
      result.seed_fallback = true;
      break;
    }
  }
  return result;
}

struct FilterResult {
  DocumentSequence documents;
  std::size_t vocabulary_size = 0;
};

/// Keeps the seed plus every later document whose words all lie in the seed
/// vocabulary, in original order.
inline FilterResult filter_fixed_vocabulary(const DocumentSequence& corpus, std::size_t seed_size) {
  validate_seed(corpus, seed_size);
  const Vocabulary vocab = seed_vocabulary(corpus, seed_size);
  FilterResult result;
  result.vocabulary_size = vocab.size();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i < seed_size || known_occurrences(corpus[i], vocab) == corpus[i].words.size()) {
      result.documents.push_back(corpus[i]);
    }
  }
  return result;
}

}  // namespace polar
