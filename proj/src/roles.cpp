#include "subcdm/roles.hpp"

namespace subcdm {

std::string_view role_name(Role role) noexcept {
  switch (role) {
    case Role::DecisionMaking: return "dm";
    case Role::Idle: return "idle";
    case Role::Relay: return "relay";
  }
  return "?";
}

}  // namespace subcdm
