#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "polarstream/mnb.hpp"

namespace polar {

/// Binary entropy (bits) of the split a:b; 0*log 0 = 0 and H(0,0) = 0.
inline double entropy(std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t n = a + b;
  if (a == 0 || b == 0) return 0.0;
  const double pa = static_cast<double>(a) / static_cast<double>(n);
  const double pb = static_cast<double>(b) / static_cast<double>(n);
  return -(pa * std::log2(pa) + pb * std::log2(pb));
}

/// Entropy drop summed over the distinct in-vocabulary words of `d` when one
/// more occurrence is credited to `predicted`. Positive means the predicted
/// label makes the words' class distributions purer.
inline double information_gain(const VocabularyStats& stats, const Document& d, PolarityLabel predicted) {
  std::vector<const std::string*> distinct;
  distinct.reserve(d.words.size());
  for (const auto& w : d.words) distinct.push_back(&w);
  std::sort(distinct.begin(), distinct.end(), [](const auto* a, const auto* b) { return *a < *b; });
  distinct.erase(std::unique(distinct.begin(), distinct.end(), [](const auto* a, const auto* b) { return *a == *b; }),
                 distinct.end());

  double gain = 0.0;
  for (const auto* w : distinct) {
    const auto it = stats.word_class_counts.find(*w);
    if (it == stats.word_class_counts.end()) continue;
    const auto pos = it->second[PolarityLabel::Positive];
    const auto neg = it->second[PolarityLabel::Negative];
    const double after = predicted == PolarityLabel::Positive ? entropy(pos + 1, neg) : entropy(pos, neg + 1);
    gain += entropy(pos, neg) - after;
  }
  return gain;
}

enum class StrategyKind { InformationGain, Uncertainty, Random, Always, Never };

inline std::string_view to_string(StrategyKind k) noexcept {
  switch (k) {
    case StrategyKind::InformationGain: return "ig";
    case StrategyKind::Uncertainty: return "uncertainty";
    case StrategyKind::Random: return "random";
    case StrategyKind::Always: return "always";
    case StrategyKind::Never: return "never";
  }
  return "never";
}

inline std::optional<StrategyKind> parse_strategy_kind(std::string_view s) noexcept {
  if (s == "ig") return StrategyKind::InformationGain;
  if (s == "uncertainty") return StrategyKind::Uncertainty;
  if (s == "random") return StrategyKind::Random;
  if (s == "always") return StrategyKind::Always;
  if (s == "never") return StrategyKind::Never;
  return std::nullopt;
}

/// Which documents get an oracle query. Build through the named factories;
/// each one carries exactly the parameters its kind needs.
class Strategy {
 public:
  static Strategy information_gain() { return Strategy(StrategyKind::InformationGain); }
  static Strategy always() { return Strategy(StrategyKind::Always); }
  static Strategy never() { return Strategy(StrategyKind::Never); }

  /// Threshold given as ln(alpha); alpha itself must lie in (0,1).
  static Strategy uncertainty_log(double log_alpha) {
    if (!(log_alpha < 0.0) || std::isnan(log_alpha)) throw Error("uncertainty alpha must lie in (0,1)");
    Strategy s(StrategyKind::Uncertainty);
    s.log_alpha_ = log_alpha;
    return s;
  }
  static Strategy uncertainty(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("uncertainty alpha must lie in (0,1)");
    return uncertainty_log(std::log(alpha));
  }
  static Strategy random(double budget, std::uint64_t rng_seed) {
    if (!(budget >= 0.0 && budget <= 1.0)) throw Error("random budget must lie in [0,1]");
    Strategy s(StrategyKind::Random);
    s.budget_ = budget;
    s.rng_seed_ = rng_seed;
    return s;
  }

  StrategyKind kind() const noexcept { return kind_; }
  std::optional<double> log_alpha() const noexcept { return log_alpha_; }
  std::optional<double> alpha() const noexcept {
    return log_alpha_ ? std::optional<double>(std::exp(*log_alpha_)) : std::nullopt;
  }
  std::optional<double> budget() const noexcept { return budget_; }
  std::optional<std::uint64_t> rng_seed() const noexcept { return rng_seed_; }

 private:
  explicit Strategy(StrategyKind k) : kind_(k) {}
  StrategyKind kind_;
  std::optional<double> log_alpha_;
  std::optional<double> budget_;
  std::optional<std::uint64_t> rng_seed_;
};

/// Generator reserved for the random-budget strategy.
class SamplingRng {
 public:
  explicit SamplingRng(std::uint64_t seed = 0) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct SamplingDecision {
  bool query = false;
  /// IG value, max log-joint, the uniform draw, or 0 for always/never.
  double score = 0.0;
};

inline SamplingDecision decide(const Strategy& strategy, const VocabularyStats& stats, const Document& d,
                               const Prediction& prediction, SamplingRng& rng) {
  switch (strategy.kind()) {
    case StrategyKind::InformationGain: {
      const double ig = information_gain(stats, d, prediction.label);
      return {ig > 0.0, ig};
    }
    case StrategyKind::Uncertainty: {
      const double m = prediction.max_log_joint();
      return {m <= *strategy.log_alpha(), m};
    }
    case StrategyKind::Random: {
      const double u = rng.uniform();
      return {u < *strategy.budget(), u};
    }
    case StrategyKind::Always: return {true, 0.0};
    case StrategyKind::Never: return {false, 0.0};
  }
  return {};
}

}  // namespace polar
