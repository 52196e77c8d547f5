#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "subcdm/rng.hpp"
#include "subcdm/types.hpp"

namespace subcdm {

/// Black/white tiled arena. Immutable once generated.
class TileGrid {
 public:
  TileGrid(std::size_t width, std::size_t height, double tile_size, std::vector<Color> colors);

  std::size_t width_tiles() const noexcept { return width_; }
  std::size_t height_tiles() const noexcept { return height_; }
  std::size_t tile_count() const noexcept { return colors_.size(); }
  double tile_size() const noexcept { return tile_size_; }
  double side_x() const noexcept { return static_cast<double>(width_) * tile_size_; }
  double side_y() const noexcept { return static_cast<double>(height_) * tile_size_; }

  /// Color of tile (col, row); row 0 is y in [0, tile_size).
  Color at(std::size_t col, std::size_t row) const { return colors_.at(row * width_ + col); }
  std::size_t black_count() const noexcept { return black_count_; }
  double black_fraction() const noexcept {
    return static_cast<double>(black_count_) / static_cast<double>(colors_.size());
  }
  /// Majority color, or nullopt on an exact tie.
  std::optional<Color> dominant() const noexcept;

  friend bool operator==(const TileGrid&, const TileGrid&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  double tile_size_;
  std::vector<Color> colors_;
  std::size_t black_count_;
};

/// Places exactly round(black_fraction * N) black tiles by a uniform permutation.
TileGrid generate_environment(double arena_side, double tile_size, double black_fraction,
                              RngStream& rng);

/// Color under `position`. Tiles are half-open: [k*size, (k+1)*size).
Color tile_at(const TileGrid& grid, Vec2 position);

/// Ground sensor reading, flipped with probability `noise_p`.
Color sense_ground(const TileGrid& grid, Vec2 position, double noise_p, RngStream& rng);

// Plain-text form: "W H tile_size" then H rows of W characters in {B, W}, row 0 first.
void write_grid(std::ostream& os, const TileGrid& grid);
TileGrid read_grid(std::istream& is);

}  // namespace subcdm
