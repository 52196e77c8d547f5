#include <gtest/gtest.h>

#include <sstream>

#include "subcdm/environment.hpp"

using namespace subcdm;

namespace {

TileGrid make(double fraction, std::uint64_t seed = 7) {
  RngStream rng(seed);
  return generate_environment(8.0, 0.2, fraction, rng);
}

std::size_t count_black(const TileGrid& g) {
  std::size_t n = 0;
  for (std::size_t r = 0; r < g.height_tiles(); ++r)
    for (std::size_t c = 0; c < g.width_tiles(); ++c) n += g.at(c, r) == Color::Black;
  return n;
}

}  // namespace

TEST(Environment, FortyByFortyWith544Black) {
  const TileGrid g = make(0.34);
  EXPECT_EQ(g.width_tiles(), 40u);
  EXPECT_EQ(g.height_tiles(), 40u);
  EXPECT_EQ(count_black(g), 544u);
  EXPECT_EQ(g.black_count(), 544u);
  EXPECT_EQ(g.dominant(), Color::White);
}

TEST(Environment, DegenerateFractions) {
  EXPECT_EQ(count_black(make(0.0)), 0u);
  EXPECT_EQ(count_black(make(1.0)), 1600u);
  const TileGrid half = make(0.5);
  EXPECT_EQ(count_black(half), 800u);
  EXPECT_FALSE(half.dominant().has_value());
}

TEST(Environment, ExactCountForEveryFraction) {
  for (int pct = 0; pct <= 100; ++pct) {
    const double f = pct / 100.0;
    const TileGrid g = make(f, 100 + pct);
    EXPECT_EQ(count_black(g), static_cast<std::size_t>(std::lround(f * 1600))) << f;
  }
}

TEST(Environment, SameSeedSameGrid) {
  EXPECT_EQ(make(0.42, 3), make(0.42, 3));
  EXPECT_FALSE(make(0.42, 3) == make(0.42, 4));
}

TEST(Environment, RejectsBadConfiguration) {
  RngStream rng(1);
  EXPECT_THROW(generate_environment(8.0, 0.3, 0.34, rng), ConfigError);
  EXPECT_THROW(generate_environment(8.0, 0.2, -0.01, rng), ConfigError);
  EXPECT_THROW(generate_environment(8.0, 0.2, 1.01, rng), ConfigError);
}

TEST(Environment, HalfOpenTileBoundaries) {
  std::vector<Color> colors(4, Color::White);
  colors[0] = Color::Black;  // tile (0,0)
  const TileGrid g(2, 2, 0.2, colors);
  EXPECT_EQ(tile_at(g, {0.1, 0.1}), Color::Black);
  EXPECT_EQ(tile_at(g, {0.2, 0.0}), Color::White);
  EXPECT_EQ(tile_at(g, {0.0, 0.0}), Color::Black);
  EXPECT_EQ(tile_at(g, {0.1999, 0.1999}), Color::Black);
  EXPECT_THROW(tile_at(g, {0.4, 0.1}), QueryError);
  EXPECT_THROW(tile_at(g, {0.1, -0.001}), QueryError);
}

TEST(Environment, UpperEdgeOfFullArenaIsOutOfBounds) {
  const TileGrid g = make(0.34);
  EXPECT_THROW(tile_at(g, {8.0, 4.0}), QueryError);
  EXPECT_NO_THROW(tile_at(g, {7.9999, 4.0}));
}

TEST(Environment, NoiselessSensingEqualsTileLookup) {
  const TileGrid g = make(0.4);
  RngStream pos(11), noise(12);
  for (int i = 0; i < 5000; ++i) {
    const Vec2 p{pos.uniform(0.0, 8.0), pos.uniform(0.0, 8.0)};
    EXPECT_EQ(sense_ground(g, p, 0.0, noise), tile_at(g, p));
  }
}

TEST(Environment, FullNoiseAlwaysFlips) {
  const TileGrid g = make(0.4);
  RngStream pos(13), noise(14);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p{pos.uniform(0.0, 8.0), pos.uniform(0.0, 8.0)};
    EXPECT_EQ(sense_ground(g, p, 1.0, noise), flip(tile_at(g, p)));
  }
}

TEST(Environment, TenPercentNoiseFlipRate) {
  const TileGrid g(1, 1, 0.2, {Color::Black});
  RngStream rng(15);
  int white = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) white += sense_ground(g, {0.1, 0.1}, 0.1, rng) == Color::White;
  EXPECT_NEAR(white / static_cast<double>(n), 0.1, 0.01);
}

TEST(Environment, TextRoundTrip) {
  const TileGrid g = make(0.46, 21);
  std::stringstream ss;
  write_grid(ss, g);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "40 40 0.2");
  EXPECT_EQ(read_grid(ss), g);
}

TEST(Environment, TextRowZeroFirst) {
  const TileGrid g(2, 2, 0.5, {Color::Black, Color::White, Color::White, Color::White});
  std::stringstream ss;
  write_grid(ss, g);
  EXPECT_EQ(ss.str(), "2 2 0.5\nBW\nWW\n");
}
