#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "subcdm/rng.hpp"
#include "subcdm/types.hpp"

namespace subcdm {

struct Pose {
  Vec2 position;
  double heading = 0.0;  // radians, [0, 2pi)
};

enum class MotionMode : std::uint8_t { Straight, Rotating };
enum class TurnDirection : std::uint8_t { Clockwise, CounterClockwise };

struct MotionPhase {
  MotionMode mode = MotionMode::Straight;
  double remaining = 0.0;  // seconds
  TurnDirection turn = TurnDirection::CounterClockwise;
};

struct MotionParams {
  double speed = 0.32;               // m/s
  double mean_straight = 40.0;       // s, exponential
  double max_rotation = 4.5;         // s, uniform upper bound
  double angular_speed = std::numbers::pi;  // rad/s while rotating
  double body_diameter = 0.17;       // m
  double proximity_radius = 0.3;     // m
  double avoid_margin = 0.05;        // m
};

double wrap_angle(double radians) noexcept;

MotionPhase sample_straight(const MotionParams& params, RngStream& rng);
MotionPhase sample_rotation(const MotionParams& params, RngStream& rng);

/// Heading that steers away from the nearest close neighbor or a wall being
/// approached; nullopt when nothing is in the way.
std::optional<double> avoid(const Pose& pose, std::span<const Vec2> neighbors, double arena_side,
                            const MotionParams& params);

/// One tick of the straight/rotate random walk. `neighbors` are obstacle
/// centers near the robot (previous tick's positions). The returned pose is
/// clamped to the arena but not yet checked against other robots; see
/// `resolve_overlaps`.
std::pair<Pose, MotionPhase> step_motion(const Pose& pose, const MotionPhase& phase, double dt,
                                         std::span<const Vec2> neighbors, double arena_side,
                                         const MotionParams& params, RngStream& rng);

/// Commits proposed positions in index order, keeping a robot at its previous
/// position when the move would bring it within one body diameter of an
/// already committed robot. `previous` must itself satisfy the separation.
/// Returns the number of rejected moves.
std::size_t resolve_overlaps(std::span<const Vec2> previous, std::span<Pose> proposed,
                             double body_diameter);

/// Random non-overlapping placement inside [r, side - r]^2.
std::vector<Pose> place_robots(std::size_t count, double arena_side, const MotionParams& params,
                               RngStream& rng);

}  // namespace subcdm
