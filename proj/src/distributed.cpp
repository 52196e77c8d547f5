#include "subcdm/distributed.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace subcdm {

void ConfidenceParams::validate() const {
  if (!(alpha_init >= 0.0 && alpha_init <= 1.0)) throw ConfigError("alpha_init outside [0, 1]", "alpha_init");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError(fmt::format("gamma {} outside (0, 1]", gamma), "gamma");
  if (!(step > 0.0)) throw ConfigError("alpha_step must be positive", "alpha_step");
  if (s_init < 1) throw ConfigError("s_init must be >= 1", "s_init");
  if (!(p_per_s > 0.0)) throw ConfigError("p_per_s must be positive", "p_per_s");
}

ConfidenceState initial_confidence(const ConfidenceParams& params) {
  ConfidenceState state;
  state.alpha = params.alpha_init;
  state.alpha_floor = params.alpha_init;
  state.s = params.s_init;
  state.p = selection_probability(params.s_init, params.p_per_s);
  return state;
}

double update_confidence(double alpha, Opinion own, Opinion observed, double gamma) noexcept {
  return own == observed ? alpha + gamma * (1.0 - alpha) : alpha - gamma * alpha;
}

double selection_probability(int s, double p_per_s) noexcept {
  return std::min(p_per_s * static_cast<double>(s), 1.0);
}

void escalate(ConfidenceState& state, const ConfidenceParams& params) noexcept {
  state.alpha_floor = std::min(state.alpha_floor, state.alpha);
  // The epsilon keeps exact multiples of the step (0.05 / 0.05) from rounding down.
  const double depth = (params.alpha_init - state.alpha_floor) / params.step;
  const int s = params.s_init + static_cast<int>(std::floor(depth + 1e-9));
  state.s = std::max(state.s, s);
  state.p = selection_probability(state.s, params.p_per_s);
}

Membership membership_draw(double p, RngStream& rng) {
  return rng.uniform() <= p ? Membership::Member : Membership::NonMember;
}

void RelayBuffer::ingest(RobotId origin, Opinion opinion, long tick) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [origin](const RelayEntry& e) { return e.origin == origin; });
  if (it != entries_.end()) {
    it->opinion = opinion;
    it->heard_tick = tick;
    return;
  }
  if (params_.capacity == 0) return;
  if (entries_.size() >= params_.capacity) {
    auto oldest = std::min_element(entries_.begin(), entries_.end(),
                                   [](const RelayEntry& a, const RelayEntry& b) {
                                     return a.heard_tick < b.heard_tick;
                                   });
    entries_.erase(oldest);
  }
  entries_.push_back({origin, opinion, tick});
}

void RelayBuffer::expire(long tick, double dt) {
  const double ttl = params_.ttl;
  std::erase_if(entries_, [&](const RelayEntry& e) {
    return static_cast<double>(tick - e.heard_tick) * dt > ttl + 1e-9;
  });
}

void relay_tick(RelayBuffer& buffer, std::span<const Message> inbox, std::vector<Message>& outbox,
                RobotId self, long tick, double dt) {
  for (const Message& m : inbox) {
    if (const auto* op = std::get_if<OpinionBroadcast>(&m.payload)) {
      if (op->origin == m.sender && op->origin != self) buffer.ingest(op->origin, op->opinion, tick);
    }
  }
  buffer.expire(tick, dt);
  for (const RelayEntry& e : buffer.entries()) {
    outbox.push_back(Message{self, tick, OpinionBroadcast{e.opinion, e.origin}});
  }
}

}  // namespace subcdm
