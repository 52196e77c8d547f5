#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "subcdm/types.hpp"

namespace subcdm {

// ---------------------------------------------------------------------------
// Convergence detection
// ---------------------------------------------------------------------------

/// Opinion counts over the population of interest at one tick.
struct OpinionCounts {
  std::size_t black = 0;
  std::size_t white = 0;
  std::size_t total() const noexcept { return black + white; }
};

struct ConvergenceResult {
  bool converged = false;
  std::optional<Opinion> decision;
  double time = 0.0;  // streak start + hold; meaningful only when converged
};

/// Streaming detector: converged once one opinion holds a share >= threshold
/// of the population at every sample over a closed window of `hold` seconds.
class ConvergenceDetector {
 public:
  ConvergenceDetector(double threshold, double hold, double dt);

  /// Feeds the sample for time tick * dt. Returns true on the tick convergence is reached.
  bool observe(long tick, OpinionCounts counts);
  const ConvergenceResult& result() const noexcept { return result_; }

 private:
  double threshold_;
  long hold_ticks_;
  double dt_;
  std::optional<Opinion> streak_opinion_;
  long streak_start_ = 0;
  ConvergenceResult result_;
};

/// Offline form over a series sampled every `dt` starting at t = 0.
ConvergenceResult detect_convergence(std::span<const OpinionCounts> series, double threshold,
                                     double hold, double dt);

// ---------------------------------------------------------------------------
// Spatial statistics
// ---------------------------------------------------------------------------

enum class Contiguity : std::uint8_t { Rook, Queen };

/// Row-major c x c field.
struct GridField {
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::vector<double> values;

  double& at(std::size_t col, std::size_t row) { return values[row * cols + col]; }
  double at(std::size_t col, std::size_t row) const { return values[row * cols + col]; }
  double sum() const noexcept;
};

/// Moran's I with binary contiguity weights; nullopt for a zero-variance field.
std::optional<double> morans_index(const GridField& field, Contiguity weights = Contiguity::Queen);

/// Dwell time of decision-makers per cell.
class CoverageHeatmap {
 public:
  CoverageHeatmap(double arena_side, double cell);

  void accumulate(Vec2 position, double dt);
  const GridField& field() const noexcept { return field_; }

 private:
  double cell_;
  GridField field_;
};

// ---------------------------------------------------------------------------
// Subset size and order statistics
// ---------------------------------------------------------------------------

double median(std::vector<double> values);
/// Linear-interpolation percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

/// Median number of decision-makers over the `window` seconds ending at `end_time`.
double steady_subset_size(std::span<const int> dm_counts, double dt, double end_time, double window);

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

struct TickRecord {
  long tick = 0;
  int decision_makers = 0;     // active (non-faulty) decision-makers
  OpinionCounts dm_opinions;   // over those decision-makers
  OpinionCounts all_opinions;  // over every robot
  int faulty = 0;
  std::size_t messages_sent = 0;
  std::size_t messages_delivered = 0;
  // Leader-based fields; zero otherwise.
  RobotId leader = 0;
  int s = 0;
  std::size_t collected = 0;
  double majority_ratio = 0.0;
  double hold_timer = 0.0;
  std::size_t decisions = 0;
  double mean_s = 0.0;  // distributed: swarm mean of s_i
};

struct RunTrace {
  double dt = 0.1;
  std::vector<TickRecord> ticks;

  std::vector<int> dm_series() const;
};

enum class Outcome : std::uint8_t { Correct, Incorrect, Undecided };
std::string_view outcome_name(Outcome o) noexcept;

struct RunSummary {
  std::uint64_t seed = 0;
  bool converged = false;
  std::optional<Opinion> decision;
  double convergence_time = 0.0;
  double duration = 0.0;
  double steady_subset_size = 0.0;
  std::optional<double> morans_i;
  Outcome outcome = Outcome::Undecided;
  int final_s = 0;         // leader s, or rounded mean s_i for the distributed strategy
  double mean_s = 0.0;
  std::size_t leader_changes = 0;
  std::size_t messages_delivered = 0;

  /// Undecided runs count as incorrect for accuracy.
  bool correct() const noexcept { return outcome == Outcome::Correct; }
};

}  // namespace subcdm
