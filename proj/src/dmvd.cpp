#include "subcdm/dmvd.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace subcdm {

void DmvdParams::validate() const {
  if (!(sigma > 0.0)) throw ConfigError(fmt::format("sigma must be positive, got {}", sigma), "sigma");
  if (!(g > 0.0)) throw ConfigError(fmt::format("g must be positive, got {}", g), "g");
  if (!(rho_min > 0.0 && rho_min <= 1.0)) {
    throw ConfigError(fmt::format("rho_min {} outside (0, 1]", rho_min), "rho_min");
  }
}

DecisionState begin_exploration(Opinion opinion, double sigma, RngStream& rng) {
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive", "sigma");
  DecisionState state;
  state.opinion = opinion;
  state.phase = DmvdPhase::Exploration;
  state.duration = rng.exponential(sigma);
  return state;
}

void explore_tick(DecisionState& state, Color ground_sample, double dt) {
  if (!state.exploring()) throw std::logic_error("explore_tick outside exploration");
  const double step = std::clamp(state.duration - state.elapsed, 0.0, dt);
  state.elapsed += step;
  if (ground_sample == state.opinion) state.time_matched += step;
}

double quality_estimate(double time_matched, double exploration_time, double rho_min) {
  if (!(exploration_time > 0.0)) return rho_min;
  return std::clamp(time_matched / exploration_time, 0.0, 1.0);
}

void begin_dissemination(DecisionState& state, double quality, const DmvdParams& params,
                         RngStream& rng) {
  state.quality = quality;
  state.phase = DmvdPhase::Dissemination;
  state.duration = rng.exponential(std::max(quality, params.rho_min) * params.g);
  state.elapsed = 0.0;
  state.time_matched = 0.0;
  state.observed = {};
}

void disseminate_tick(DecisionState& state, std::span<const Opinion> inbox, double dt) {
  if (!state.disseminating()) throw std::logic_error("disseminate_tick outside dissemination");
  for (Opinion o : inbox) ++state.observed[index_of(o)];
  state.elapsed += dt;
}

Opinion adopt_opinion(const std::array<std::uint32_t, 2>& observed, Opinion own, RngStream& rng) {
  const std::uint64_t total = std::uint64_t{observed[0]} + observed[1];
  if (total == 0) return own;
  return rng.below(total) < observed[0] ? Opinion::Black : Opinion::White;
}

}  // namespace subcdm
