#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subcdm/config.hpp"
#include "subcdm/metrics.hpp"

namespace subcdm {

struct MetricStats {
  std::size_t n = 0;
  double median = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
};

MetricStats summarize_metric(const std::vector<double>& values);

struct BatchSummary {
  std::vector<RunSummary> runs;  // ordered by seed
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t undecided = 0;
  MetricStats convergence_time;  // over converged runs
  MetricStats steady_subset_size;
  MetricStats morans_i;          // over runs with a defined index

  double accuracy() const noexcept;
};

BatchSummary aggregate(std::vector<RunSummary> runs);

/// Called once per finished run (from worker threads; calls are serialized).
using RunCallback = std::function<void(std::size_t rep, const RunSummary&)>;

/// Runs seeds cfg.seed + 0 .. cfg.seed + repetitions - 1. `threads` = 0 uses
/// the hardware concurrency. Results do not depend on the thread count.
BatchSummary run_batch(const SimConfig& cfg, std::size_t repetitions, std::size_t threads = 0,
                       const RunCallback& on_run = {});

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepAxis {
  std::string name;
  std::vector<std::string> values;
};

/// Parses "AXIS=V1,V2,...". Unknown axis or empty value list -> ConfigError.
SweepAxis parse_sweep_axis(std::string_view text);

struct Scenario {
  std::string label;  // "axis=value,axis=value", or "base" without axes
  std::vector<std::pair<std::string, std::string>> params;
  SimConfig config;
};

/// Cross product of all axes applied to `base`, first axis varying slowest.
std::vector<Scenario> sweep(const SimConfig& base, std::span<const SweepAxis> axes);

struct ExperimentOptions {
  std::filesystem::path out_dir = "out";
  bool write_traces = false;     // per-run robot and tick CSV traces (large)
  bool write_heatmaps = false;
  std::size_t threads = 0;
};

/// Writes the manifest, then executes every scenario and writes per-run
/// summaries and per-scenario aggregates. Returns the aggregates in scenario order.
std::vector<BatchSummary> run_experiment(const std::vector<Scenario>& scenarios,
                                         const ExperimentOptions& options,
                                         std::ostream* progress = nullptr);

/// Manifest: the full configuration and seed list of every scenario.
void write_manifest(std::ostream& os, const std::vector<Scenario>& scenarios);
std::vector<Scenario> read_manifest(std::istream& is);

// Output records.
void write_summary_json(std::ostream& os, const RunSummary& summary);
void write_aggregate_header(std::ostream& os, std::span<const std::string> param_names);
void write_aggregate_row(std::ostream& os, const Scenario& scenario, const BatchSummary& batch);
void write_heatmap(std::ostream& os, const GridField& field);

}  // namespace subcdm
