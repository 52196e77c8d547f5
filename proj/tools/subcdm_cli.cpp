// Command-line experiment runner.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "subcdm/config.hpp"
#include "subcdm/harness.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::string> strategy;
  std::optional<double> black_fraction;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<double> noise_p;
  std::optional<int> delivery_period;
  std::optional<double> drop_prob;
  std::optional<double> fault_prob;
  std::vector<std::string> sets;
  std::vector<std::string> sweeps;
  std::string out = "out";
  std::string manifest;
  bool traces = false;
  bool heatmaps = false;
  bool print_config = false;
  std::size_t threads = 0;
};

subcdm::SimConfig build_config(const Options& o) {
  subcdm::SimConfig cfg;
  if (!o.config_path.empty()) cfg = subcdm::load_config_file(o.config_path, cfg);
  if (o.strategy) cfg.strategy = subcdm::parse_strategy(*o.strategy);
  if (o.black_fraction) cfg.black_fraction = *o.black_fraction;
  if (o.seed) cfg.seed = *o.seed;
  if (o.reps) cfg.repetitions = *o.reps;
  if (o.noise_p) cfg.noise_p = *o.noise_p;
  if (o.delivery_period) cfg.comms.delivery_period = *o.delivery_period;
  if (o.drop_prob) cfg.comms.drop_probability = *o.drop_prob;
  if (o.fault_prob) cfg.faults.probability = *o.fault_prob;
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw subcdm::ConfigError(fmt::format("--set expects KEY=VALUE, got '{}'", kv), "set");
    }
    subcdm::set_field(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subset-based collective decision-making swarm simulator"};
  Options o;
  app.add_option("--config", o.config_path, "Key-value configuration file")->check(CLI::ExistingFile);
  app.add_option("--strategy", o.strategy, "full | leader | distributed");
  app.add_option("--black-fraction", o.black_fraction, "Fraction of black tiles");
  app.add_option("--seed", o.seed, "Base seed; repetition r uses seed + r");
  app.add_option("--reps", o.reps, "Repetitions per scenario");
  app.add_option("--noise-p", o.noise_p, "Ground sensor flip probability");
  app.add_option("--delivery-period", o.delivery_period, "Deliver messages every N ticks");
  app.add_option("--drop-prob", o.drop_prob, "Per-message drop probability");
  app.add_option("--fault-prob", o.fault_prob, "Fault probability per role reassignment");
  app.add_option("--set", o.sets, "Override any configuration key: KEY=VALUE");
  app.add_option("--sweep", o.sweeps, "Sweep axis: AXIS=V1,V2,... (repeatable, cross product)");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--manifest", o.manifest, "Re-run every scenario recorded in a manifest")
      ->check(CLI::ExistingFile);
  app.add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
  app.add_flag("--trace", o.traces, "Write per-run robot and tick CSV traces");
  app.add_flag("--heatmaps", o.heatmaps, "Write per-run coverage heatmaps");
  app.add_flag("--print-config", o.print_config, "Print the resolved configuration and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<subcdm::Scenario> scenarios;
    if (!o.manifest.empty()) {
      std::ifstream in(o.manifest);
      scenarios = subcdm::read_manifest(in);
    } else {
      const subcdm::SimConfig base = build_config(o);
      if (o.print_config) {
        for (const auto& [k, v] : subcdm::to_key_values(base)) std::cout << k << " = " << v << '\n';
        return EXIT_SUCCESS;
      }
      std::vector<subcdm::SweepAxis> axes;
      for (const std::string& s : o.sweeps) axes.push_back(subcdm::parse_sweep_axis(s));
      scenarios = subcdm::sweep(base, axes);
    }

    subcdm::ExperimentOptions options;
    options.out_dir = o.out;
    options.write_traces = o.traces;
    options.write_heatmaps = o.heatmaps;
    options.threads = o.threads;
    subcdm::run_experiment(scenarios, options, &std::cout);
  } catch (const subcdm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return EXIT_SUCCESS;
}
