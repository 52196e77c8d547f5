#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "subcdm/harness.hpp"
#include "subcdm/simulation.hpp"

using namespace subcdm;

namespace {

SimConfig quick(Strategy s = Strategy::Distributed) {
  SimConfig c;
  c.strategy = s;
  c.max_duration = 60.0;
  c.seed = 40;
  return c;
}

std::string summaries_text(const BatchSummary& b) {
  std::ostringstream os;
  for (const RunSummary& r : b.runs) write_summary_json(os, r);
  return os.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("subcdm_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Harness, SingleRepEqualsRun) {
  const SimConfig cfg = quick();
  const BatchSummary b = run_batch(cfg, 1, 1);
  const auto [trace, s] = run_one(cfg, cfg.seed);
  ASSERT_EQ(b.runs.size(), 1u);
  EXPECT_EQ(b.steady_subset_size.median, s.steady_subset_size);
  EXPECT_EQ(b.runs[0].seed, cfg.seed);
}

TEST(Harness, ThreadCountDoesNotChangeResults) {
  const SimConfig cfg = quick();
  const BatchSummary one = run_batch(cfg, 6, 1);
  const BatchSummary many = run_batch(cfg, 6, 4);
  EXPECT_EQ(summaries_text(one), summaries_text(many));
  EXPECT_EQ(one.steady_subset_size.median, many.steady_subset_size.median);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(one.runs[i].seed, cfg.seed + i);
}

TEST(Harness, AggregateCountsOutcomes) {
  std::vector<RunSummary> runs(4);
  runs[0].outcome = Outcome::Correct;
  runs[1].outcome = Outcome::Correct;
  runs[2].outcome = Outcome::Incorrect;
  runs[0].converged = runs[1].converged = runs[2].converged = true;
  runs[0].convergence_time = 10;
  runs[1].convergence_time = 20;
  runs[2].convergence_time = 30;
  const BatchSummary b = aggregate(runs);
  EXPECT_EQ(b.correct, 2u);
  EXPECT_EQ(b.incorrect, 1u);
  EXPECT_EQ(b.undecided, 1u);
  EXPECT_DOUBLE_EQ(b.accuracy(), 0.5);
  EXPECT_DOUBLE_EQ(b.convergence_time.median, 20.0);
  EXPECT_DOUBLE_EQ(b.convergence_time.p25, 15.0);
  EXPECT_EQ(b.convergence_time.n, 3u);
}

TEST(Sweep, DifficultyAxisGivesEightScenarios) {
  const SweepAxis axis = parse_sweep_axis("black_fraction=0.34,0.36,0.38,0.40,0.42,0.44,0.46,0.48");
  const auto scenarios = sweep(SimConfig{}, std::span(&axis, 1));
  ASSERT_EQ(scenarios.size(), 8u);
  EXPECT_EQ(scenarios[0].label, "black_fraction=0.34");
  EXPECT_DOUBLE_EQ(scenarios[7].config.black_fraction, 0.48);
  std::size_t runs = 0;
  for (auto s : scenarios) {
    s.config.repetitions = 100;
    runs += s.config.repetitions;
  }
  EXPECT_EQ(runs, 800u);
}

TEST(Sweep, CrossProduct) {
  const std::vector<SweepAxis> axes{parse_sweep_axis("strategy=leader,distributed"),
                                    parse_sweep_axis("noise_p=0,0.05,0.1")};
  const auto scenarios = sweep(SimConfig{}, axes);
  ASSERT_EQ(scenarios.size(), 6u);
  EXPECT_EQ(scenarios[0].label, "strategy=leader,noise_p=0");
  EXPECT_EQ(scenarios[5].label, "strategy=distributed,noise_p=0.1");
  EXPECT_EQ(scenarios[5].config.strategy, Strategy::Distributed);
  EXPECT_DOUBLE_EQ(scenarios[5].config.noise_p, 0.1);
}

TEST(Sweep, Errors) {
  EXPECT_THROW(parse_sweep_axis("warp_factor=1,2"), ConfigError);
  EXPECT_THROW(parse_sweep_axis("noise_p="), ConfigError);
  EXPECT_THROW(parse_sweep_axis("noise_p"), ConfigError);
  const std::vector<SweepAxis> empty{{"noise_p", {}}};
  EXPECT_THROW(sweep(SimConfig{}, empty), ConfigError);
  const std::vector<SweepAxis> invalid{{"black_fraction", {"1.5"}}};
  EXPECT_THROW(sweep(SimConfig{}, invalid), ConfigError);
}

TEST(Manifest, RoundTrip) {
  SimConfig base = quick(Strategy::LeaderBased);
  base.repetitions = 3;
  const std::vector<SweepAxis> axes{parse_sweep_axis("fault_prob=0,0.1")};
  const auto scenarios = sweep(base, axes);
  std::stringstream ss;
  write_manifest(ss, scenarios);
  const auto back = read_manifest(ss);
  ASSERT_EQ(back.size(), scenarios.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].label, scenarios[i].label);
    EXPECT_EQ(back[i].params, scenarios[i].params);
    EXPECT_EQ(to_key_values(back[i].config), to_key_values(scenarios[i].config));
  }
}

TEST(Experiment, WritesOutputsAndReplaysFromManifest) {
  SimConfig base = quick(Strategy::Distributed);
  base.max_duration = 30.0;
  base.repetitions = 2;
  const std::vector<SweepAxis> axes{parse_sweep_axis("noise_p=0,0.1")};
  const auto scenarios = sweep(base, axes);

  ExperimentOptions opt;
  opt.out_dir = temp_dir("exp_a");
  opt.write_heatmaps = true;
  opt.threads = 1;
  run_experiment(scenarios, opt);
  EXPECT_TRUE(std::filesystem::exists(opt.out_dir / "manifest.json"));
  EXPECT_TRUE(std::filesystem::exists(opt.out_dir / "aggregates.csv"));
  const auto dir = opt.out_dir / "noise_p=0.1";
  EXPECT_TRUE(std::filesystem::exists(dir / "summaries.jsonl"));
  EXPECT_TRUE(std::filesystem::exists(dir / "aggregate.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "heatmap_41.txt"));

  std::ifstream manifest(opt.out_dir / "manifest.json");
  const auto replay = read_manifest(manifest);
  ExperimentOptions opt_b = opt;
  opt_b.out_dir = temp_dir("exp_b");
  run_experiment(replay, opt_b);
  for (const char* f : {"aggregates.csv", "noise_p=0/summaries.jsonl", "noise_p=0.1/summaries.jsonl",
                        "noise_p=0.1/heatmap_40.txt"}) {
    EXPECT_EQ(slurp(opt.out_dir / f), slurp(opt_b.out_dir / f)) << f;
  }
  std::filesystem::remove_all(opt.out_dir);
  std::filesystem::remove_all(opt_b.out_dir);
}

TEST(Experiment, AggregateTableHasOneRowPerScenario) {
  SimConfig base = quick(Strategy::FullSwarmDMVD);
  base.max_duration = 20.0;
  const std::vector<SweepAxis> axes{parse_sweep_axis("black_fraction=0.34,0.4,0.46")};
  ExperimentOptions opt;
  opt.out_dir = temp_dir("exp_c");
  run_experiment(sweep(base, axes), opt);
  const std::string table = slurp(opt.out_dir / "aggregates.csv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  EXPECT_EQ(table.rfind("black_fraction,runs,", 0), 0u);
  std::filesystem::remove_all(opt.out_dir);
}
