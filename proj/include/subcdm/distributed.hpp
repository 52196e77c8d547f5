#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "subcdm/comms.hpp"
#include "subcdm/roles.hpp"
#include "subcdm/rng.hpp"
#include "subcdm/types.hpp"

namespace subcdm {

struct ConfidenceParams {
  double alpha_init = 1.0;
  double gamma = 0.01;
  double step = 0.05;      // alpha depth per escalation
  int s_init = 1;
  double p_per_s = 0.1;    // selection probability per unit of s

  void validate() const;
};

/// Per-robot convergence confidence and the subset parameter it drives.
struct ConfidenceState {
  double alpha = 1.0;
  double alpha_floor = 1.0;  // lowest alpha seen so far
  int s = 1;
  double p = 0.1;
};

ConfidenceState initial_confidence(const ConfidenceParams& params);

/// One confidence update for one observed opinion:
/// match -> alpha + gamma (1 - alpha), mismatch -> alpha - gamma alpha.
double update_confidence(double alpha, Opinion own, Opinion observed, double gamma) noexcept;

/// Ratchets the floor and recomputes s = s_init + floor((alpha_init - floor) / step)
/// and p = min(p_per_s * s, 1). Neither s nor p ever decreases.
void escalate(ConfidenceState& state, const ConfidenceParams& params) noexcept;

double selection_probability(int s, double p_per_s) noexcept;

/// delta ~ U(0,1); member iff delta <= p.
Membership membership_draw(double p, RngStream& rng);

struct RelayEntry {
  RobotId origin = 0;
  Opinion opinion = Opinion::Black;
  long heard_tick = 0;
};

struct RelayParams {
  std::size_t capacity = 3;
  double ttl = 1.0;  // s an entry survives without being refreshed
};

/// Bounded buffer of decision-makers' opinions, one entry per origin.
class RelayBuffer {
 public:
  explicit RelayBuffer(RelayParams params = {}) : params_(params) {}

  /// Inserts or overwrites the entry for `origin`; evicts the least recently
  /// heard entry when a new origin arrives at capacity.
  void ingest(RobotId origin, Opinion opinion, long tick);
  /// Drops entries not refreshed within the ttl.
  void expire(long tick, double dt);
  void clear() noexcept { entries_.clear(); }

  std::span<const RelayEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  RelayParams params_;
  std::vector<RelayEntry> entries_;
};

/// Ingests direct broadcasts (sender == origin) from `inbox` and appends one
/// rebroadcast per live entry to `outbox`, preserving origin ids.
void relay_tick(RelayBuffer& buffer, std::span<const Message> inbox, std::vector<Message>& outbox,
                RobotId self, long tick, double dt);

}  // namespace subcdm
