#include "subcdm/comms.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace subcdm {

void CommsConfig::validate() const {
  if (!(d_comm > 0.0)) throw ConfigError(fmt::format("d_comm must be positive, got {}", d_comm), "d_comm");
  if (delivery_period < 1) {
    throw ConfigError(fmt::format("delivery_period must be >= 1, got {}", delivery_period),
                      "delivery_period");
  }
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
    throw ConfigError(fmt::format("drop_probability {} outside [0, 1]", drop_probability),
                      "drop_probability");
  }
}

NeighborIndex::NeighborIndex(std::span<const Vec2> positions, double arena_side, double radius)
    : positions_(positions), radius_(radius) {
  cells_per_side_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(arena_side / radius)));
  cell_ = arena_side / static_cast<double>(cells_per_side_);
  buckets_.resize(cells_per_side_ * cells_per_side_);
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    buckets_[cell_of(positions_[i].y) * cells_per_side_ + cell_of(positions_[i].x)].push_back(i);
  }
}

std::size_t NeighborIndex::cell_of(double v) const noexcept {
  if (v <= 0.0) return 0;
  return std::min(cells_per_side_ - 1, static_cast<std::size_t>(v / cell_));
}

void NeighborIndex::query(std::size_t i, std::vector<std::size_t>& out) const {
  out.clear();
  const Vec2 p = positions_[i];
  const double r2 = radius_ * radius_;
  const auto cx = static_cast<long>(cell_of(p.x));
  const auto cy = static_cast<long>(cell_of(p.y));
  const auto n = static_cast<long>(cells_per_side_);
  for (long y = std::max(0L, cy - 1); y <= std::min(n - 1, cy + 1); ++y) {
    for (long x = std::max(0L, cx - 1); x <= std::min(n - 1, cx + 1); ++x) {
      for (std::size_t j : buckets_[static_cast<std::size_t>(y * n + x)]) {
        if (j != i && distance_sq(p, positions_[j]) <= r2) out.push_back(j);
      }
    }
  }
  std::sort(out.begin(), out.end());
}

std::vector<std::vector<std::size_t>> NeighborIndex::all() const {
  std::vector<std::vector<std::size_t>> adjacency(positions_.size());
  for (std::size_t i = 0; i < positions_.size(); ++i) query(i, adjacency[i]);
  return adjacency;
}

std::vector<std::size_t> neighbors(std::span<const Vec2> positions, std::size_t i, double d_comm) {
  std::vector<std::size_t> out;
  const double r2 = d_comm * d_comm;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (j != i && distance_sq(positions[i], positions[j]) <= r2) out.push_back(j);
  }
  return out;
}

std::size_t deliver(std::span<const std::vector<Message>> outboxes,
                    std::span<const std::vector<std::size_t>> adjacency,
                    const CommsConfig& cfg, const std::vector<bool>& faulty, long tick,
                    std::span<RngStream> receiver_rngs, std::vector<std::vector<Message>>& inboxes) {
  const std::size_t n = outboxes.size();
  inboxes.resize(n);
  for (auto& box : inboxes) box.clear();
  if (tick % cfg.delivery_period != 0) return 0;

  const bool lossy = cfg.drop_probability > 0.0;
  std::size_t delivered = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (faulty[r]) continue;
    auto& inbox = inboxes[r];
    for (std::size_t s : adjacency[r]) {
      if (faulty[s]) continue;
      for (const Message& m : outboxes[s]) {
        if (lossy && receiver_rngs[r].bernoulli(cfg.drop_probability)) continue;
        inbox.push_back(m);
        ++delivered;
      }
    }
  }
  return delivered;
}

void fault_scheduler(FaultState& state, bool at_role_expiry, const FaultParams& params, double dt,
                     RngStream& rng) {
  if (state.faulty) {
    state.remaining -= dt;
    if (state.remaining <= 1e-9) {
      state.faulty = false;
      state.remaining = 0.0;
    }
    return;
  }
  if (!at_role_expiry) {
    state.trial_consumed = false;
    return;
  }
  if (state.trial_consumed) return;
  state.trial_consumed = true;
  if (params.probability > 0.0 && rng.bernoulli(params.probability)) {
    state.faulty = true;
    state.remaining = params.duration;
  }
}

}  // namespace subcdm
