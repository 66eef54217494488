#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A malformed input line. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class PolarityLabel : std::uint8_t { Positive = 0, Negative = 1 };

inline constexpr std::array<PolarityLabel, 2> kLabels{PolarityLabel::Positive,
                                                      PolarityLabel::Negative};

constexpr std::size_t index(PolarityLabel c) noexcept { return static_cast<std::size_t>(c); }

constexpr PolarityLabel opposite(PolarityLabel c) noexcept {
  return c == PolarityLabel::Positive ? PolarityLabel::Negative : PolarityLabel::Positive;
}

/// Wire token used in stream files, CSV records and the HTTP API.
constexpr std::string_view to_token(PolarityLabel c) noexcept {
  return c == PolarityLabel::Positive ? "pos" : "neg";
}

inline std::optional<PolarityLabel> parse_label(std::string_view token) noexcept {
  if (token == "pos") return PolarityLabel::Positive;
  if (token == "neg") return PolarityLabel::Negative;
  return std::nullopt;
}

/// Pair of per-class counters indexed by label.
struct ClassCounts {
  std::array<std::uint64_t, 2> value{0, 0};

  std::uint64_t& operator[](PolarityLabel c) noexcept { return value[index(c)]; }
  std::uint64_t operator[](PolarityLabel c) const noexcept { return value[index(c)]; }
  std::uint64_t total() const noexcept { return value[0] + value[1]; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// One stream element: an ordinal, its bag of words (order and duplicates kept)
/// and the ground-truth polarity when known.
struct Document {
  std::uint64_t id = 0;
  std::vector<std::string> words;
  std::optional<PolarityLabel> true_label;

  friend bool operator==(const Document&, const Document&) = default;
};

using DocumentSequence = std::vector<Document>;

}  // namespace polar
