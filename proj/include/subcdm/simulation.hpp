#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "subcdm/comms.hpp"
#include "subcdm/config.hpp"
#include "subcdm/distributed.hpp"
#include "subcdm/dmvd.hpp"
#include "subcdm/environment.hpp"
#include "subcdm/leader.hpp"
#include "subcdm/metrics.hpp"
#include "subcdm/motion.hpp"
#include "subcdm/rng.hpp"
#include "subcdm/roles.hpp"

namespace subcdm {

struct Robot {
  std::size_t index = 0;
  RobotId id = 0;
  Pose pose;
  MotionPhase motion;
  RoleState role;
  FaultState fault;
  Opinion opinion = Opinion::Black;          // retained across role changes
  std::optional<DecisionState> decision;     // present while decision-making

  HopState hop;
  ElectionState election;
  std::optional<EvalState> eval;             // present on a leader

  ConfidenceState confidence;
  RelayBuffer relay;

  RngStream motion_rng;
  RngStream sensing_rng;
  RngStream dmvd_rng;
  RngStream role_rng;
  RngStream membership_rng;
  RngStream fault_rng;

  bool active_decision_maker() const noexcept {
    return role.role == Role::DecisionMaking && !fault.faulty;
  }
  bool is_leader() const noexcept { return eval.has_value(); }
};

/// Synchronous tick loop. Each tick: (1) fault scheduling, (2) delivery of
/// the previous tick's outboxes, (3) per-robot strategy, role and DMVD
/// updates, (4) motion. Output is a pure function of (config, seed).
class Simulation {
 public:
  Simulation(SimConfig cfg, std::uint64_t seed);

  /// Advances one tick. Returns false once the run is over.
  bool step();
  void run();
  bool finished() const noexcept { return finished_; }

  /// Streams one CSV row per robot per tick (header written immediately).
  void attach_robot_trace(std::ostream& os);

  long tick() const noexcept { return tick_; }
  double time() const noexcept { return static_cast<double>(tick_) * cfg_.dt(); }
  const SimConfig& config() const noexcept { return cfg_; }
  const TileGrid& grid() const noexcept { return grid_; }
  std::span<const Robot> robots() const noexcept { return robots_; }
  const RunTrace& trace() const noexcept { return trace_; }
  const CoverageHeatmap& heatmap() const noexcept { return heatmap_; }
  const ConvergenceResult& convergence() const noexcept { return convergence_; }

  RunSummary summarize() const;

 private:
  void schedule_faults();
  void exchange_messages();
  void update_robot(Robot& r);
  void update_election(Robot& r);
  void update_role(Robot& r);
  void update_decision(Robot& r);
  void build_outbox(Robot& r);
  void move_robots();
  void record();
  const Robot* tracked_leader() const;
  void write_robot_rows();

  SimConfig cfg_;
  std::uint64_t seed_;
  TileGrid grid_;
  std::vector<Robot> robots_;
  std::vector<RngStream> delivery_rngs_;
  RobotId designated_leader_ = 0;

  long tick_ = 0;
  bool finished_ = false;
  std::optional<long> stop_tick_;

  std::vector<Vec2> positions_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::vector<Message>> outboxes_;
  std::vector<std::vector<Message>> inboxes_;
  std::vector<bool> faulty_scratch_;
  std::size_t delivered_last_ = 0;

  // Per-robot scratch, reused across robots.
  std::vector<Opinion> heard_;
  std::vector<OpinionReport> reports_;
  std::vector<HopBeacon> hop_beacons_;
  std::vector<ElectionBeacon> election_beacons_;

  RunTrace trace_;
  CoverageHeatmap heatmap_;
  ConvergenceDetector detector_;
  ConvergenceResult convergence_;
  std::optional<RobotId> last_leader_;
  std::size_t leader_changes_ = 0;
  std::ostream* robot_trace_ = nullptr;
};

/// Runs to completion. When `robot_trace` is given, per-robot rows are written to it.
std::pair<RunTrace, RunSummary> run_one(const SimConfig& cfg, std::uint64_t seed,
                                        std::ostream* robot_trace = nullptr);

/// Per-tick aggregate CSV.
void write_tick_csv(std::ostream& os, const RunTrace& trace);

}  // namespace subcdm
