#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarstream/corpus.hpp"
#include "polarstream/drift.hpp"

namespace polar {

/// JSON sidecar describing a prepared or generated stream file.
struct StreamManifest {
  std::size_t stream_length = 0;
  std::size_t vocabulary_size = 0;
  StreamVariant variant = StreamVariant::Original;
  std::size_t seed_size = 0;
  std::size_t seed_vocabulary_size = 0;
  bool seed_fallback = false;
  std::optional<std::vector<double>> novelty_fractions;
  std::optional<nlohmann::json> segments;
  std::optional<nlohmann::json> script;
};

inline nlohmann::json to_json(const StreamManifest& m) {
  nlohmann::json j{{"v", 1},
                   {"stream_length", m.stream_length},
                   {"vocabulary_size", m.vocabulary_size},
                   {"variant", std::string(to_string(m.variant))},
                   {"seed_size", m.seed_size},
                   {"seed_vocabulary_size", m.seed_vocabulary_size}};
  if (m.variant == StreamVariant::Reordered) j["seed_fallback"] = m.seed_fallback;
  if (m.novelty_fractions) j["novelty_fractions"] = *m.novelty_fractions;
  if (m.segments) j["segments"] = *m.segments;
  if (m.script) j["script"] = *m.script;
  return j;
}

inline void write_manifest(const std::string& path, const StreamManifest& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest '" + path + "'");
  out << to_json(m).dump(2) << '\n';
}

struct PreparedStream {
  DocumentSequence documents;
  StreamManifest manifest;
};

/// Builds the requested stream variant and renumbers ids densely in output order.
inline PreparedStream prepare_stream(const DocumentSequence& corpus, StreamVariant variant, std::size_t seed_size) {
  validate_seed(corpus, seed_size);
  PreparedStream out;
  out.manifest.variant = variant;
  out.manifest.seed_size = seed_size;
  switch (variant) {
    case StreamVariant::Original:
      out.documents = corpus;
      break;
    case StreamVariant::Reordered: {
      auto r = reorder_for_vocab_novelty(corpus, seed_size);
      out.documents = std::move(r.documents);
      std::vector<double> novelty;
      novelty.reserve(r.known_fractions.size());
      for (double f : r.known_fractions) novelty.push_back(1.0 - f);
      out.manifest.novelty_fractions = std::move(novelty);
      out.manifest.seed_fallback = r.seed_fallback;
      break;
    }
    case StreamVariant::FixedVocab:
      out.documents = filter_fixed_vocabulary(corpus, seed_size).documents;
      break;
  }
  out.documents = renumber(std::move(out.documents));
  out.manifest.stream_length = out.documents.size();
  out.manifest.vocabulary_size = distinct_words(out.documents);
  out.manifest.seed_vocabulary_size = seed_vocabulary(out.documents, seed_size).size();
  return out;
}

}  // namespace polar
