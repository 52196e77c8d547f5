#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "subcdm/comms.hpp"
#include "subcdm/distributed.hpp"
#include "subcdm/dmvd.hpp"
#include "subcdm/leader.hpp"
#include "subcdm/motion.hpp"

namespace subcdm {

enum class Strategy : std::uint8_t { FullSwarmDMVD, LeaderBased, Distributed };

std::string_view strategy_name(Strategy s) noexcept;
Strategy parse_strategy(std::string_view name);

/// Everything that determines a run besides the seed. Defaults reproduce the
/// reference setup: 100 robots, 8 m arena with 0.2 m tiles, 10 Hz, 1 m range.
struct SimConfig {
  Strategy strategy = Strategy::FullSwarmDMVD;
  std::size_t n_robots = 100;
  double arena_side = 8.0;
  double tile_size = 0.2;
  double black_fraction = 0.34;
  double tick_rate = 10.0;
  double max_duration = 2000.0;

  DmvdParams dmvd;
  MotionParams motion;
  CommsConfig comms;
  FaultParams faults;
  double noise_p = 0.0;
  double mean_role_time = 20.0;

  // Leader-based strategy.
  HopParams hop;
  EvalParams eval;
  bool leader_election = false;
  ElectionParams election;

  // Distributed strategy.
  ConfidenceParams confidence;
  RelayParams relay;

  /// When > 0, s (leader) or every s_i (distributed) is pinned to this value
  /// and adaptive growth is disabled.
  int fixed_s = 0;

  // Instrumentation.
  bool stop_on_convergence = true;
  double convergence_threshold = 0.8;
  double convergence_hold = 30.0;
  double convergence_margin = 10.0;
  double steady_window = 50.0;
  double heatmap_cell = 0.4;

  std::uint64_t seed = 1;
  std::size_t repetitions = 1;

  double dt() const noexcept { return 1.0 / tick_rate; }
  long max_ticks() const noexcept;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Sets one field from its textual value. Throws ConfigError for unknown keys
/// or unparsable values.
void set_field(SimConfig& cfg, std::string_view key, std::string_view value);
bool is_field(std::string_view key);
/// Every field name accepted by set_field, in canonical order.
std::vector<std::string> field_names();

/// key -> value text for every field; set_field on each reproduces `cfg`.
std::map<std::string, std::string> to_key_values(const SimConfig& cfg);

/// "key = value" lines; '#' starts a comment.
void apply_key_values(SimConfig& cfg, std::istream& in);
SimConfig load_config_file(const std::string& path, SimConfig base = {});

}  // namespace subcdm
