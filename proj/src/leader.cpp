#include "subcdm/leader.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

namespace subcdm {

namespace {
constexpr double kTimeEps = 1e-9;
}

HopState leader_hop_state(RobotId leader, int s) {
  HopState state;
  state.leader = leader;
  state.hop = 0;
  state.s = s;
  return state;
}

HopState follower_hop_state(RobotId leader) {
  HopState state;
  state.leader = leader;
  return state;
}

void update_hop(HopState& state, std::span<const HopBeacon> beacons, double dt,
                const HopParams& params) {
  if (state.hop == 0) {
    state.last_contact = 0.0;
    return;
  }
  bool supported = false;
  std::optional<int> best = state.hop;
  for (const HopBeacon& b : beacons) {
    if (b.leader != state.leader || b.hop < 0) continue;
    const int candidate = b.hop + 1;
    if (!state.hop || candidate <= *state.hop) supported = true;
    if (!best || candidate < *best) best = candidate;
    state.s = std::max(state.s, b.s);
  }
  state.hop = best;
  if (supported) {
    state.last_contact = 0.0;
  } else {
    state.last_contact += dt;
    if (state.last_contact > params.expiry + kTimeEps) state.hop.reset();
  }
}

Membership membership(const HopState& state) noexcept {
  return state.hop && *state.hop <= state.s ? Membership::Member : Membership::NonMember;
}

void EvalParams::validate() const {
  if (n_op < 1) throw ConfigError("n_op must be >= 1", "n_op");
  if (!(r_op > 0.5 && r_op <= 1.0)) throw ConfigError(fmt::format("r_op {} outside (0.5, 1]", r_op), "r_op");
  if (!(tau_op >= 0.0)) throw ConfigError("tau_op must be non-negative", "tau_op");
  if (k < 1) throw ConfigError("k must be >= 1", "k");
  if (!(per_s_timeout > 0.0)) throw ConfigError("per_s_timeout must be positive", "per_s_timeout");
}

void leader_evaluate(EvalState& state, std::span<const OpinionReport> inbox, double dt,
                     const EvalParams& params) {
  if (state.final()) return;
  state.phase = EvalPhase::Gathering;

  for (const OpinionReport& r : inbox) state.collected[r.robot] = r.opinion;
  state.at_s_elapsed += dt;

  state.majority_ratio = 0.0;
  if (state.collected.size() >= params.n_op) {
    std::array<std::size_t, 2> counts{};
    for (const auto& [robot, opinion] : state.collected) ++counts[index_of(opinion)];
    const Opinion majority = counts[0] >= counts[1] ? Opinion::Black : Opinion::White;
    state.majority_ratio =
        static_cast<double>(counts[index_of(majority)]) / static_cast<double>(state.collected.size());
    if (state.majority_ratio >= params.r_op - kTimeEps) {
      if (state.held_majority != majority) {
        state.hold_timer = 0.0;
        state.held_majority = majority;
      }
      state.hold_timer += dt;
    } else {
      state.hold_timer = 0.0;
      state.held_majority.reset();
    }
  } else {
    state.hold_timer = 0.0;
    state.held_majority.reset();
  }

  const auto next_s = [&state] {
    state.collected.clear();
    state.hold_timer = 0.0;
    state.held_majority.reset();
    state.at_s_elapsed = 0.0;
    ++state.s;
  };

  if (state.held_majority && state.hold_timer >= params.tau_op - kTimeEps) {
    const Opinion decided = *state.held_majority;
    state.decisions.push_back({state.s, decided});
    next_s();
    state.phase = EvalPhase::Converged;
    if (state.decisions.size() >= params.k) {
      const auto tail = std::span(state.decisions).last(params.k);
      const bool agree = std::all_of(tail.begin(), tail.end(),
                                     [&](const SubsetDecision& d) { return d.opinion == decided; });
      if (agree) {
        state.phase = EvalPhase::Final;
        state.final_opinion = decided;
      }
    }
  } else if (state.at_s_elapsed >= params.per_s_timeout - kTimeEps) {
    next_s();
    state.phase = EvalPhase::TimedOut;
  }
}

ElectionState start_election(RobotId self) {
  return ElectionState{self, 0.0, 0.0, false};
}

bool update_election(ElectionState& state, RobotId self, std::span<const ElectionBeacon> beacons,
                     double dt, const ElectionParams& params) {
  // Own knowledge ages by one tick; a robot backing itself is always fresh.
  RobotId best = self;
  double best_age = 0.0;
  if (state.candidate != self) {
    const double aged = state.age + dt;
    if (aged <= params.timeout + kTimeEps && state.candidate < best) {
      best = state.candidate;
      best_age = aged;
    }
  }
  for (const ElectionBeacon& b : beacons) {
    const double aged = b.age + dt;
    if (aged > params.timeout + kTimeEps) continue;
    if (b.candidate < best || (b.candidate == best && best != self && aged < best_age)) {
      best = b.candidate;
      best_age = aged;
    }
  }

  const bool changed = best != state.candidate;
  state.candidate = best;
  state.age = best == self ? 0.0 : best_age;
  state.quiet = changed ? 0.0 : state.quiet + dt;
  if (best != self) {
    state.leader = false;
  } else if (!state.leader && state.quiet >= params.settle_time - kTimeEps) {
    state.leader = true;
  }
  return changed;
}

ElectionBeacon election_beacon(const ElectionState& state) noexcept {
  return {state.candidate, state.age};
}

}  // namespace subcdm
