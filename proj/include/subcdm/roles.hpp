#pragma once

#include <cstdint>
#include <string_view>

#include "subcdm/rng.hpp"

namespace subcdm {

enum class Role : std::uint8_t { DecisionMaking, Idle, Relay };
enum class Membership : std::uint8_t { Member, NonMember };

std::string_view role_name(Role role) noexcept;

struct RoleState {
  Role role = Role::Idle;
  double remaining = 0.0;  // tau_role left, s

  bool expired() const noexcept { return remaining <= 1e-12; }
};

/// Sticky role assignment. While the timer runs it is decremented by `dt` and
/// the role kept; on expiry `decide()` is queried (only then, since it may
/// consume randomness) and a fresh Exp(mean_role_time) duration is drawn.
/// Returns true when a reassignment happened.
template <typename Decide>
bool maybe_reassign(RoleState& state, Decide&& decide, Role non_member_role, double mean_role_time,
                    double dt, RngStream& rng) {
  if (!state.expired()) {
    state.remaining = state.remaining > dt ? state.remaining - dt : 0.0;
    return false;
  }
  const Membership m = decide();
  state.role = m == Membership::Member ? Role::DecisionMaking : non_member_role;
  state.remaining = rng.exponential(mean_role_time);
  return true;
}

}  // namespace subcdm
