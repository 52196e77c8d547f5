#include "subcdm/environment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include <fmt/format.h>

namespace subcdm {

TileGrid::TileGrid(std::size_t width, std::size_t height, double tile_size, std::vector<Color> colors)
    : width_(width), height_(height), tile_size_(tile_size), colors_(std::move(colors)) {
  if (width_ == 0 || height_ == 0 || colors_.size() != width_ * height_) {
    throw ConfigError("tile grid dimensions do not match color data");
  }
  if (!(tile_size_ > 0.0)) throw ConfigError("tile_size must be positive", "tile_size");
  black_count_ = static_cast<std::size_t>(
      std::count(colors_.begin(), colors_.end(), Color::Black));
}

std::optional<Color> TileGrid::dominant() const noexcept {
  const std::size_t white = colors_.size() - black_count_;
  if (black_count_ == white) return std::nullopt;
  return black_count_ > white ? Color::Black : Color::White;
}

TileGrid generate_environment(double arena_side, double tile_size, double black_fraction,
                              RngStream& rng) {
  if (!(tile_size > 0.0)) throw ConfigError("tile_size must be positive", "tile_size");
  if (!(arena_side > 0.0)) throw ConfigError("arena_side must be positive", "arena_side");
  const double ratio = arena_side / tile_size;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0) {
    throw ConfigError(fmt::format("arena_side {} is not a multiple of tile_size {}", arena_side,
                                  tile_size),
                      "arena_side");
  }
  if (!(black_fraction >= 0.0 && black_fraction <= 1.0)) {
    throw ConfigError(fmt::format("black_fraction {} outside [0, 1]", black_fraction),
                      "black_fraction");
  }

  const auto side = static_cast<std::size_t>(rounded);
  const std::size_t total = side * side;
  const auto black = static_cast<std::size_t>(std::llround(black_fraction * static_cast<double>(total)));

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Fisher-Yates over the first `black` slots only.
  for (std::size_t i = 0; i < black && i + 1 < total; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(order[i], order[j]);
  }
  std::vector<Color> colors(total, Color::White);
  for (std::size_t i = 0; i < black; ++i) colors[order[i]] = Color::Black;
  return TileGrid(side, side, tile_size, std::move(colors));
}

Color tile_at(const TileGrid& grid, Vec2 position) {
  if (!(position.x >= 0.0 && position.y >= 0.0 && position.x < grid.side_x() &&
        position.y < grid.side_y())) {
    throw QueryError(fmt::format("position ({}, {}) outside arena", position.x, position.y));
  }
  const auto col = std::min(static_cast<std::size_t>(std::floor(position.x / grid.tile_size())),
                            grid.width_tiles() - 1);
  const auto row = std::min(static_cast<std::size_t>(std::floor(position.y / grid.tile_size())),
                            grid.height_tiles() - 1);
  return grid.at(col, row);
}

Color sense_ground(const TileGrid& grid, Vec2 position, double noise_p, RngStream& rng) {
  const Color truth = tile_at(grid, position);
  if (noise_p <= 0.0) return truth;
  return rng.bernoulli(noise_p) ? flip(truth) : truth;
}

void write_grid(std::ostream& os, const TileGrid& grid) {
  os << grid.width_tiles() << ' ' << grid.height_tiles() << ' ' << fmt::format("{}", grid.tile_size())
     << '\n';
  std::string row(grid.width_tiles(), 'W');
  for (std::size_t r = 0; r < grid.height_tiles(); ++r) {
    for (std::size_t c = 0; c < grid.width_tiles(); ++c) row[c] = color_char(grid.at(c, r));
    os << row << '\n';
  }
}

TileGrid read_grid(std::istream& is) {
  std::size_t w = 0;
  std::size_t h = 0;
  double size = 0.0;
  if (!(is >> w >> h >> size)) throw ConfigError("malformed grid header");
  std::vector<Color> colors;
  colors.reserve(w * h);
  std::string row;
  for (std::size_t r = 0; r < h; ++r) {
    if (!(is >> row) || row.size() != w) throw ConfigError(fmt::format("malformed grid row {}", r));
    for (char ch : row) {
      if (ch == 'B') {
        colors.push_back(Color::Black);
      } else if (ch == 'W') {
        colors.push_back(Color::White);
      } else {
        throw ConfigError(fmt::format("unexpected grid character '{}'", ch));
      }
    }
  }
  return TileGrid(w, h, size, std::move(colors));
}

}  // namespace subcdm
