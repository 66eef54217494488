#pragma once

// Experiment configuration: flat `key = value` text, `#`/`;` comments.
//
//   stream        = data/stream.txt     (required)
//   format        = tokens | text
//   variant       = original | reordered | fixed-vocab
//   seed_size     = 200                 (required)
//   strategy      = ig | uncertainty | random | always | never   (required)
//   alpha         = 1e-9 | exp(-20)     (uncertainty only)
//   budget        = 0.3                 (random only)
//   rng_seed      = 7                   (random only)
//   window        = 100
//   window_mode   = sliding | tumbling
//   output_dir    = out/run1
//   oracle_timeout_ms = 120000          (serve only)
//   static_dir    = console             (serve only)

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "polarstream/corpus.hpp"
#include "polarstream/kappa.hpp"
#include "polarstream/sampling.hpp"

namespace polar {

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct ExperimentConfig {
  std::string stream_path;
  CorpusFormat format = CorpusFormat::Tokens;
  StreamVariant variant = StreamVariant::Original;
  std::size_t seed_size = 0;
  Strategy strategy = Strategy::never();
  std::size_t window = 100;
  WindowMode window_mode = WindowMode::Sliding;
  std::string output_dir = "out";
  std::uint64_t oracle_timeout_ms = 120000;
  std::string static_dir = "console";
};

namespace detail {

inline std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

inline std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

template <class T>
std::optional<T> parse_unsigned(std::string_view s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// ln(alpha) from "1e-9" or "exp(-20)"; the exp form keeps the exponent exact.
inline std::optional<double> parse_log_alpha(std::string_view s) {
  if (s.starts_with("exp(") && s.ends_with(")")) {
    return parse_real(s.substr(4, s.size() - 5));
  }
  const auto v = parse_real(s);
  if (!v || !(*v > 0.0)) return std::nullopt;
  return std::log(*v);
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  static const std::set<std::string> known{"stream",   "format",      "variant",    "seed_size",
                                           "strategy", "alpha",       "budget",     "rng_seed",
                                           "window",   "window_mode", "output_dir", "oracle_timeout_ms",
                                           "static_dir"};
  for (const auto& [key, node] : tree) {
    if (!node.empty()) throw ConfigError(key, "sections are not supported");
    if (!known.contains(key)) throw ConfigError(key, "unknown key");
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(key)) return detail::unquote(*v);
    return std::nullopt;
  };
  auto require = [&](const std::string& key) {
    auto v = get(key);
    if (!v || v->empty()) throw ConfigError(key, "required");
    return *v;
  };

  ExperimentConfig cfg;
  cfg.stream_path = require("stream");
  if (auto v = get("format")) {
    if (*v == "tokens") cfg.format = CorpusFormat::Tokens;
    else if (*v == "text") cfg.format = CorpusFormat::Text;
    else throw ConfigError("format", "expected tokens or text, got '" + *v + "'");
  }
  if (auto v = get("variant")) {
    const auto variant = parse_variant(*v);
    if (!variant) throw ConfigError("variant", "expected original, reordered or fixed-vocab, got '" + *v + "'");
    cfg.variant = *variant;
  }
  {
    const auto v = require("seed_size");
    const auto n = detail::parse_unsigned<std::size_t>(v);
    if (!n || *n < 2) throw ConfigError("seed_size", "expected an integer >= 2, got '" + v + "'");
    cfg.seed_size = *n;
  }

  const auto kind_text = require("strategy");
  const auto kind = parse_strategy_kind(kind_text);
  if (!kind) throw ConfigError("strategy", "expected ig, uncertainty, random, always or never, got '" + kind_text + "'");
  const auto alpha = get("alpha");
  const auto budget = get("budget");
  const auto rng_seed = get("rng_seed");
  if (alpha && *kind != StrategyKind::Uncertainty) throw ConfigError("alpha", "only valid with strategy = uncertainty");
  if (budget && *kind != StrategyKind::Random) throw ConfigError("budget", "only valid with strategy = random");
  if (rng_seed && *kind != StrategyKind::Random) throw ConfigError("rng_seed", "only valid with strategy = random");
  switch (*kind) {
    case StrategyKind::InformationGain: cfg.strategy = Strategy::information_gain(); break;
    case StrategyKind::Always: cfg.strategy = Strategy::always(); break;
    case StrategyKind::Never: cfg.strategy = Strategy::never(); break;
    case StrategyKind::Uncertainty: {
      if (!alpha) throw ConfigError("alpha", "required with strategy = uncertainty");
      const auto log_alpha = detail::parse_log_alpha(*alpha);
      if (!log_alpha || !(*log_alpha < 0.0)) throw ConfigError("alpha", "expected a value in (0,1), got '" + *alpha + "'");
      cfg.strategy = Strategy::uncertainty_log(*log_alpha);
      break;
    }
    case StrategyKind::Random: {
      if (!budget) throw ConfigError("budget", "required with strategy = random");
      const auto b = detail::parse_real(*budget);
      if (!b || *b < 0.0 || *b > 1.0) throw ConfigError("budget", "expected a value in [0,1], got '" + *budget + "'");
      std::uint64_t seed = 1;
      if (rng_seed) {
        const auto s = detail::parse_unsigned<std::uint64_t>(*rng_seed);
        if (!s) throw ConfigError("rng_seed", "expected a non-negative integer, got '" + *rng_seed + "'");
        seed = *s;
      }
      cfg.strategy = Strategy::random(*b, seed);
      break;
    }
  }

  if (auto v = get("window")) {
    const auto n = detail::parse_unsigned<std::size_t>(*v);
    if (!n || *n == 0) throw ConfigError("window", "expected a positive integer, got '" + *v + "'");
    cfg.window = *n;
  }
  if (auto v = get("window_mode")) {
    const auto m = parse_window_mode(*v);
    if (!m) throw ConfigError("window_mode", "expected sliding or tumbling, got '" + *v + "'");
    cfg.window_mode = *m;
  }
  if (auto v = get("output_dir")) cfg.output_dir = *v;
  if (auto v = get("oracle_timeout_ms")) {
    const auto n = detail::parse_unsigned<std::uint64_t>(*v);
    if (!n) throw ConfigError("oracle_timeout_ms", "expected a non-negative integer, got '" + *v + "'");
    cfg.oracle_timeout_ms = *n;
  }
  if (auto v = get("static_dir")) cfg.static_dir = *v;
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& text_or_path, bool is_path) {
  if (!is_path) {
    std::istringstream in(text_or_path);
    return parse_config(in);
  }
  std::ifstream in(text_or_path);
  if (!in) throw Error("cannot read config '" + text_or_path + "'");
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) { return parse_config(path, true); }

}  // namespace polar
