#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace polar;

namespace {

ExperimentConfig parse(const std::string& text) { return parse_config(text, false); }

std::string key_of_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

const std::string kBase = "stream = s.txt\nseed_size = 10\n";

}  // namespace

TEST(Config, MinimalWithDefaults) {
  const auto c = parse(kBase + "strategy = never\n");
  EXPECT_EQ(c.stream_path, "s.txt");
  EXPECT_EQ(c.seed_size, 10u);
  EXPECT_EQ(c.strategy.kind(), StrategyKind::Never);
  EXPECT_EQ(c.variant, StreamVariant::Original);
  EXPECT_EQ(c.window, 100u);
  EXPECT_EQ(c.window_mode, WindowMode::Sliding);
  EXPECT_EQ(c.oracle_timeout_ms, 120000u);
}

TEST(Config, FullUncertaintyConfig) {
  const auto c = parse(
      "# comment\nstream = \"data/s.txt\"\nformat = text\nvariant = fixed-vocab\nseed_size = 200\n"
      "strategy = uncertainty\nalpha = 2.5e-9\nwindow = 500\nwindow_mode = tumbling\noutput_dir = out/u\n"
      "oracle_timeout_ms = 250\nstatic_dir = web\n");
  EXPECT_EQ(c.stream_path, "data/s.txt");
  EXPECT_EQ(c.format, CorpusFormat::Text);
  EXPECT_EQ(c.variant, StreamVariant::FixedVocab);
  EXPECT_NEAR(*c.strategy.alpha() / 2.5e-9, 1.0, 1e-12);
  EXPECT_EQ(c.window, 500u);
  EXPECT_EQ(c.window_mode, WindowMode::Tumbling);
  EXPECT_EQ(c.output_dir, "out/u");
  EXPECT_EQ(c.oracle_timeout_ms, 250u);
  EXPECT_EQ(c.static_dir, "web");
}

TEST(Config, ExpAlphaKeepsTheExponentExact) {
  const auto c = parse(kBase + "strategy = uncertainty\nalpha = exp(-40)\n");
  EXPECT_EQ(*c.strategy.log_alpha(), -40.0);
}

TEST(Config, RandomSeedDefaultsToOne) {
  const auto c = parse(kBase + "strategy = random\nbudget = 0.3\n");
  EXPECT_EQ(*c.strategy.budget(), 0.3);
  EXPECT_EQ(*c.strategy.rng_seed(), 1u);
  EXPECT_EQ(*parse(kBase + "strategy = random\nbudget = 0.3\nrng_seed = 7\n").strategy.rng_seed(), 7u);
}

TEST(Config, ErrorsNameTheOffendingKey) {
  EXPECT_EQ(key_of_error("seed_size = 10\nstrategy = ig\n"), "stream");
  EXPECT_EQ(key_of_error(kBase + "strategy = committee\n"), "strategy");
  EXPECT_EQ(key_of_error(kBase + "strategy = ig\nbudget = 0.3\n"), "budget");
  EXPECT_EQ(key_of_error(kBase + "strategy = random\nalpha = 0.1\nbudget = 0.3\n"), "alpha");
  EXPECT_EQ(key_of_error(kBase + "strategy = uncertainty\n"), "alpha");
  EXPECT_EQ(key_of_error(kBase + "strategy = uncertainty\nalpha = 2\n"), "alpha");
  EXPECT_EQ(key_of_error(kBase + "strategy = random\nbudget = 1.2\n"), "budget");
  EXPECT_EQ(key_of_error(kBase + "strategy = never\nwindow = 0\n"), "window");
  EXPECT_EQ(key_of_error(kBase + "strategy = never\nwindow_mode = cumulative\n"), "window_mode");
  EXPECT_EQ(key_of_error(kBase + "strategy = never\nvariant = shuffled\n"), "variant");
  EXPECT_EQ(key_of_error(kBase + "strategy = never\nwindw = 5\n"), "windw");
  EXPECT_EQ(key_of_error("stream = s\nseed_size = 1\nstrategy = never\n"), "seed_size");
  EXPECT_EQ(key_of_error("stream = s\nseed_size = ten\nstrategy = never\n"), "seed_size");
}

TEST(Config, MissingFileIsReported) { EXPECT_THROW(load_config("/nonexistent/x.conf"), Error); }
