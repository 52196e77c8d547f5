#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "subcdm/rng.hpp"
#include "subcdm/types.hpp"

namespace subcdm {

/// Opinion of decision-maker `origin`; relays rebroadcast with origin preserved.
struct OpinionBroadcast {
  Opinion opinion = Opinion::Black;
  RobotId origin = 0;
};

/// Hop-count structure beacon rooted at `leader`.
struct HopBeacon {
  RobotId leader = 0;
  int hop = 0;
  int s = 1;
  double since_contact = 0.0;  // sender's seconds since its last supporting beacon
};

/// Leader election flooding: best candidate known and how stale that knowledge is.
struct ElectionBeacon {
  RobotId candidate = 0;
  double age = 0.0;
};

using Payload = std::variant<OpinionBroadcast, HopBeacon, ElectionBeacon>;

struct Message {
  RobotId sender = 0;
  long tick = 0;
  Payload payload;
};

struct CommsConfig {
  double d_comm = 1.0;            // m
  int delivery_period = 1;        // ticks
  double drop_probability = 0.0;

  void validate() const;
};

/// Uniform-grid spatial index over a snapshot of positions.
class NeighborIndex {
 public:
  NeighborIndex(std::span<const Vec2> positions, double arena_side, double radius);

  /// All j != i with distance <= radius, ascending index order.
  void query(std::size_t i, std::vector<std::size_t>& out) const;
  /// Same relation for every robot.
  std::vector<std::vector<std::size_t>> all() const;

 private:
  std::span<const Vec2> positions_;
  double radius_;
  double cell_;
  std::size_t cells_per_side_;
  std::vector<std::vector<std::size_t>> buckets_;
  std::size_t cell_of(double v) const noexcept;
};

/// Robots within `d_comm` of robot `i` (brute force over all positions).
std::vector<std::size_t> neighbors(std::span<const Vec2> positions, std::size_t i, double d_comm);

/// Range-limited broadcast. Inboxes are indexed like `outboxes`. Nothing is
/// delivered on ticks where `tick % delivery_period != 0`; faulty robots
/// neither send nor receive; each (receiver, message) pair is dropped
/// independently using the receiver's stream in `receiver_rngs`.
/// Returns the number of delivered messages.
std::size_t deliver(std::span<const std::vector<Message>> outboxes,
                    std::span<const std::vector<std::size_t>> adjacency,
                    const CommsConfig& cfg, const std::vector<bool>& faulty, long tick,
                    std::span<RngStream> receiver_rngs, std::vector<std::vector<Message>>& inboxes);

struct FaultParams {
  double probability = 0.0;
  double duration = 10.0;  // seconds; infinity means permanent
};

/// Intermittent malfunction. Trials happen at role-reassignment instants.
struct FaultState {
  bool faulty = false;
  double remaining = 0.0;
  bool trial_consumed = false;  // a trial already happened for the pending expiry
};

/// Advances a fault by one tick. When `at_role_expiry` and the robot is
/// healthy and has not yet been tried for this expiry, draws a new fault.
void fault_scheduler(FaultState& state, bool at_role_expiry, const FaultParams& params, double dt,
                     RngStream& rng);

}  // namespace subcdm
