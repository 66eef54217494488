#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace polar {

struct TokenizerConfig {
  bool casefold = true;
  std::size_t min_length = 1;
};

namespace detail {

// ASCII letters plus any non-ASCII byte, so UTF-8 encoded letters stay inside a token.
constexpr bool is_word_byte(unsigned char ch) noexcept {
  return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch >= 0x80;
}

}  // namespace detail

/// Splits raw text into letter runs. Digits, punctuation and whitespace are
/// boundaries; tokens shorter than `cfg.min_length` bytes are dropped.
inline std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg = {}) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && current.size() >= cfg.min_length) tokens.push_back(current);
    current.clear();
  };
  for (char raw : text) {
    const auto ch = static_cast<unsigned char>(raw);
    if (!detail::is_word_byte(ch)) {
      flush();
      continue;
    }
    if (cfg.casefold && ch >= 'A' && ch <= 'Z') {
      current.push_back(static_cast<char>(ch - 'A' + 'a'));
    } else {
      current.push_back(raw);
    }
  }
  flush();
  return tokens;
}

}  // namespace polar
