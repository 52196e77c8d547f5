#include "subcdm/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subcdm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double clamp_coordinate(double v, double radius, double side) noexcept {
  return std::clamp(v, radius, side - radius);
}

}  // namespace

double wrap_angle(double radians) noexcept {
  double a = std::fmod(radians, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

MotionPhase sample_straight(const MotionParams& params, RngStream& rng) {
  return {MotionMode::Straight, rng.exponential(params.mean_straight),
          TurnDirection::CounterClockwise};
}

MotionPhase sample_rotation(const MotionParams& params, RngStream& rng) {
  const double duration = rng.uniform(0.0, params.max_rotation);
  const auto turn = rng.bernoulli(0.5) ? TurnDirection::Clockwise : TurnDirection::CounterClockwise;
  return {MotionMode::Rotating, duration, turn};
}

std::optional<double> avoid(const Pose& pose, std::span<const Vec2> neighbors, double arena_side,
                            const MotionParams& params) {
  const Vec2 p = pose.position;
  const double contact = params.body_diameter + params.avoid_margin;
  double best = std::numeric_limits<double>::infinity();
  std::optional<Vec2> obstacle;

  for (const Vec2& q : neighbors) {
    const double d2 = distance_sq(p, q);
    if (d2 < contact * contact && d2 < best * best) {
      best = std::sqrt(d2);
      obstacle = q;
    }
  }

  // Walls count only when the robot is heading into them.
  const double cx = std::cos(pose.heading);
  const double cy = std::sin(pose.heading);
  const double radius = params.proximity_radius;
  const auto consider_wall = [&](double dist, bool approaching, Vec2 point) {
    if (approaching && dist < radius && dist < best) {
      best = dist;
      obstacle = point;
    }
  };
  consider_wall(p.x, cx < 0.0, {0.0, p.y});
  consider_wall(arena_side - p.x, cx > 0.0, {arena_side, p.y});
  consider_wall(p.y, cy < 0.0, {p.x, 0.0});
  consider_wall(arena_side - p.y, cy > 0.0, {p.x, arena_side});

  if (!obstacle) return std::nullopt;
  const double dx = p.x - obstacle->x;
  const double dy = p.y - obstacle->y;
  if (dx == 0.0 && dy == 0.0) return wrap_angle(pose.heading + std::numbers::pi);
  return wrap_angle(std::atan2(dy, dx));
}

std::pair<Pose, MotionPhase> step_motion(const Pose& pose, const MotionPhase& phase, double dt,
                                         std::span<const Vec2> neighbors, double arena_side,
                                         const MotionParams& params, RngStream& rng) {
  MotionPhase next = phase;
  if (next.remaining <= 0.0) {
    next = next.mode == MotionMode::Straight ? sample_rotation(params, rng)
                                             : sample_straight(params, rng);
  }

  Pose out = pose;
  if (const auto override_heading = avoid(pose, neighbors, arena_side, params)) {
    out.heading = *override_heading;
  }

  if (next.mode == MotionMode::Straight) {
    out.position.x += params.speed * dt * std::cos(out.heading);
    out.position.y += params.speed * dt * std::sin(out.heading);
  } else {
    const double sign = next.turn == TurnDirection::CounterClockwise ? 1.0 : -1.0;
    out.heading = wrap_angle(out.heading + sign * params.angular_speed * dt);
  }
  next.remaining = std::max(0.0, next.remaining - dt);

  const double r = params.body_diameter / 2.0;
  out.position.x = clamp_coordinate(out.position.x, r, arena_side);
  out.position.y = clamp_coordinate(out.position.y, r, arena_side);
  return {out, next};
}

std::size_t resolve_overlaps(std::span<const Vec2> previous, std::span<Pose> proposed,
                             double body_diameter) {
  const std::size_t n = proposed.size();
  const double min_sq = body_diameter * body_diameter;
  std::vector<Vec2> committed(previous.begin(), previous.end());
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 target = proposed[i].position;
    bool clear = true;
    for (std::size_t j = 0; j < n && clear; ++j) {
      if (j != i && distance_sq(target, committed[j]) < min_sq) clear = false;
    }
    if (clear) {
      committed[i] = target;
    } else {
      proposed[i].position = previous[i];
      ++rejected;
    }
  }
  return rejected;
}

std::vector<Pose> place_robots(std::size_t count, double arena_side, const MotionParams& params,
                               RngStream& rng) {
  const double r = params.body_diameter / 2.0;
  const double min_sq = params.body_diameter * params.body_diameter;
  std::vector<Pose> poses;
  poses.reserve(count);
  std::size_t attempts = 0;
  while (poses.size() < count) {
    if (++attempts > 1000 * (count + 1)) throw ConfigError("arena too small for robot count", "n_robots");
    const Vec2 p{rng.uniform(r, arena_side - r), rng.uniform(r, arena_side - r)};
    const bool free = std::none_of(poses.begin(), poses.end(), [&](const Pose& other) {
      return distance_sq(p, other.position) < min_sq;
    });
    if (free) poses.push_back({p, rng.uniform(0.0, kTwoPi)});
  }
  return poses;
}

}  // namespace subcdm
