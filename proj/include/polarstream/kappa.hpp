#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <utility>

#include "polarstream/document.hpp"

namespace polar {

enum class WindowMode { Sliding, Tumbling };

inline std::string_view to_string(WindowMode m) noexcept {
  return m == WindowMode::Sliding ? "sliding" : "tumbling";
}

inline std::optional<WindowMode> parse_window_mode(std::string_view s) noexcept {
  if (s == "sliding") return WindowMode::Sliding;
  if (s == "tumbling") return WindowMode::Tumbling;
  return std::nullopt;
}

/// Most recent (predicted, truth) pairs, at most `capacity` of them. In
/// tumbling mode the window empties once full instead of sliding.
class ConfusionWindow {
 public:
  explicit ConfusionWindow(std::size_t capacity, WindowMode mode = WindowMode::Sliding)
      : capacity_(capacity == 0 ? 1 : capacity), mode_(mode) {}

  void push(PolarityLabel predicted, PolarityLabel truth) {
    if (pairs_.size() == capacity_) {
      if (mode_ == WindowMode::Tumbling) {
        pairs_.clear();
        counts_ = {};
      } else {
        const auto [p, t] = pairs_.front();
        --counts_[index(p)][index(t)];
        pairs_.pop_front();
      }
    }
    pairs_.emplace_back(predicted, truth);
    ++counts_[index(predicted)][index(truth)];
  }

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  std::size_t capacity() const noexcept { return capacity_; }
  WindowMode mode() const noexcept { return mode_; }

  /// counts()[predicted][truth]
  const std::array<std::array<std::uint64_t, 2>, 2>& counts() const noexcept { return counts_; }
  const std::deque<std::pair<PolarityLabel, PolarityLabel>>& pairs() const noexcept { return pairs_; }

 private:
  std::size_t capacity_;
  WindowMode mode_;
  std::deque<std::pair<PolarityLabel, PolarityLabel>> pairs_;
  std::array<std::array<std::uint64_t, 2>, 2> counts_{};
};

/// Cohen's kappa (p0 - pc) / (1 - pc) against a chance classifier with the same
/// predicted class shares. A window where pc = 1 (one class predicted and
/// observed throughout) scores 0.
inline double kappa(const std::array<std::array<std::uint64_t, 2>, 2>& counts) {
  const std::uint64_t n = counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  if (n == 0) throw Error("kappa of an empty window");
  const std::uint64_t agree = counts[0][0] + counts[1][1];
  const std::uint64_t pred_pos = counts[0][0] + counts[0][1];
  const std::uint64_t truth_pos = counts[0][0] + counts[1][0];
  const std::uint64_t chance = pred_pos * truth_pos + (n - pred_pos) * (n - truth_pos);
  const std::uint64_t all = n * n;
  if (chance == all) return 0.0;
  // Both sides scaled by n^2 to stay in integers until the final division.
  const double numerator = static_cast<double>(n * agree) - static_cast<double>(chance);
  return numerator / static_cast<double>(all - chance);
}

inline double kappa(const ConfusionWindow& window) { return kappa(window.counts()); }

}  // namespace polar
