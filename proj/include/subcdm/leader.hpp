#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "subcdm/comms.hpp"
#include "subcdm/roles.hpp"
#include "subcdm/types.hpp"

namespace subcdm {

// ---------------------------------------------------------------------------
// Hop-count recruitment
// ---------------------------------------------------------------------------

struct HopState {
  RobotId leader = 0;
  std::optional<int> hop;      // unset until a beacon from `leader` is heard
  double last_contact = 0.0;   // s since the last beacon supporting `hop`
  int s = 1;
};

struct HopParams {
  double expiry = 5.0;  // s of disconnection before the hop count is cleared
};

/// Hop state of the leader itself: hop 0, never expires.
HopState leader_hop_state(RobotId leader, int s);
/// Unset hop state of a robot following `leader`.
HopState follower_hop_state(RobotId leader);

/// Applies this tick's beacons. Beacons rooted at another leader are ignored.
/// A beacon supports the current hop count when hop + 1 <= h; without
/// support for longer than `expiry` the count is cleared.
void update_hop(HopState& state, std::span<const HopBeacon> beacons, double dt,
                const HopParams& params = {});

/// Member iff the hop count is set and within s.
Membership membership(const HopState& state) noexcept;

// ---------------------------------------------------------------------------
// Leader-side subset evaluation
// ---------------------------------------------------------------------------

struct EvalParams {
  std::size_t n_op = 10;
  double r_op = 0.8;
  double tau_op = 10.0;       // s the majority ratio must hold
  std::size_t k = 2;          // consistent decisions required
  double per_s_timeout = 150.0;

  void validate() const;
};

/// Gathering: collecting at the current s. Converged / TimedOut: the
/// previous s just ended with a recorded decision / a timeout (one tick).
enum class EvalPhase : std::uint8_t { Gathering, Converged, TimedOut, Final };

struct SubsetDecision {
  int s = 0;
  Opinion opinion = Opinion::Black;
};

struct EvalState {
  int s = 1;
  EvalPhase phase = EvalPhase::Gathering;
  std::unordered_map<RobotId, Opinion> collected;
  std::optional<Opinion> held_majority;
  double hold_timer = 0.0;
  double at_s_elapsed = 0.0;
  double majority_ratio = 0.0;
  std::vector<SubsetDecision> decisions;
  std::optional<Opinion> final_opinion;

  bool final() const noexcept { return phase == EvalPhase::Final; }
};

/// One opinion as seen by the leader: who sent it and what it was.
struct OpinionReport {
  RobotId robot = 0;
  Opinion opinion = Opinion::Black;
};

/// One tick of evaluation on the leader.
void leader_evaluate(EvalState& state, std::span<const OpinionReport> inbox, double dt,
                     const EvalParams& params);

// ---------------------------------------------------------------------------
// Min-ID flooding election
// ---------------------------------------------------------------------------

struct ElectionParams {
  double settle_time = 10.0;  // s without hearing a smaller id before claiming leadership
  double timeout = 5.0;       // s after which knowledge of a silent candidate is dropped
};

struct ElectionState {
  RobotId candidate = 0;
  double age = 0.0;    // s since the candidate itself was last (transitively) heard from
  double quiet = 0.0;  // s since the candidate last changed
  bool leader = false;
};

ElectionState start_election(RobotId self);

/// Adopts the smallest live candidate among what was heard and itself.
/// Returns true when the candidate changed.
bool update_election(ElectionState& state, RobotId self, std::span<const ElectionBeacon> beacons,
                     double dt, const ElectionParams& params = {});

ElectionBeacon election_beacon(const ElectionState& state) noexcept;

}  // namespace subcdm
