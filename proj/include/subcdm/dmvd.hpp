#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "subcdm/rng.hpp"
#include "subcdm/types.hpp"

namespace subcdm {

// Direct modulation of voter-based decisions: a decision-maker alternates
// between exploring (estimating the quality of its opinion) and
// disseminating (broadcasting it for a time proportional to that quality),
// then adopts the opinion of a random message heard while disseminating.

enum class DmvdPhase : std::uint8_t { Exploration, Dissemination };

struct DmvdParams {
  double sigma = 10.0;     // mean exploration time, s
  double g = 10.0;         // dissemination scale, s
  double rho_min = 0.01;   // quality floor for the dissemination mean

  void validate() const;
};

struct DecisionState {
  Opinion opinion = Opinion::Black;
  DmvdPhase phase = DmvdPhase::Exploration;
  double duration = 0.0;      // t_e or t_d
  double elapsed = 0.0;
  double time_matched = 0.0;  // t_o, exploration only
  double quality = 0.0;       // quality of the last finished exploration
  std::array<std::uint32_t, 2> observed{};  // dissemination multiset, counted per color

  bool exploring() const noexcept { return phase == DmvdPhase::Exploration; }
  bool disseminating() const noexcept { return phase == DmvdPhase::Dissemination; }
  bool phase_done() const noexcept { return elapsed >= duration - 1e-12; }
  std::uint32_t observed_total() const noexcept { return observed[0] + observed[1]; }
};

/// Fresh exploration keeping `opinion`; t_e ~ Exp(sigma).
DecisionState begin_exploration(Opinion opinion, double sigma, RngStream& rng);

/// Advances exploration by one tick, never past t_e.
void explore_tick(DecisionState& state, Color ground_sample, double dt);

/// t_o / t_e; a zero-length exploration yields `rho_min`.
double quality_estimate(double time_matched, double exploration_time, double rho_min = 0.01);

/// Switches to dissemination with t_d ~ Exp(max(quality, rho_min) * g).
void begin_dissemination(DecisionState& state, double quality, const DmvdParams& params,
                         RngStream& rng);

/// Records every opinion heard this tick (one entry per message) and advances the clock.
void disseminate_tick(DecisionState& state, std::span<const Opinion> inbox, double dt);

/// Uniform pick from the observed multiset; keeps `own` when nothing was heard.
Opinion adopt_opinion(const std::array<std::uint32_t, 2>& observed, Opinion own, RngStream& rng);

}  // namespace subcdm
