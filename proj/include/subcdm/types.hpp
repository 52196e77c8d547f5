#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace subcdm {

/// Tile color and opinion share one encoding: Black = 0, White = 1.
enum class Color : std::uint8_t { Black = 0, White = 1 };
using Opinion = Color;

constexpr Color flip(Color c) noexcept {
  return c == Color::Black ? Color::White : Color::Black;
}

constexpr std::size_t index_of(Color c) noexcept {
  return static_cast<std::size_t>(c);
}

constexpr char color_char(Color c) noexcept {
  return c == Color::Black ? 'B' : 'W';
}

/// Identifier a robot broadcasts. Distinct from its slot in the swarm vector.
using RobotId = std::uint32_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance_sq(Vec2 a, Vec2 b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Invalid parameter or configuration; `field()` names the offending key when known.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what, std::string field = {})
      : std::invalid_argument(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Out-of-domain query, e.g. a position outside the arena.
class QueryError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace subcdm
