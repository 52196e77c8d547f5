#include "subcdm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "subcdm/simulation.hpp"

namespace subcdm {

using nlohmann::json;

MetricStats summarize_metric(const std::vector<double>& values) {
  if (values.empty()) return {};
  return {values.size(), median(values), percentile(values, 25.0), percentile(values, 75.0)};
}

double BatchSummary::accuracy() const noexcept {
  const std::size_t n = runs.size();
  return n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n);
}

BatchSummary aggregate(std::vector<RunSummary> runs) {
  BatchSummary batch;
  std::vector<double> times;
  std::vector<double> sizes;
  std::vector<double> morans;
  for (const RunSummary& r : runs) {
    switch (r.outcome) {
      case Outcome::Correct: ++batch.correct; break;
      case Outcome::Incorrect: ++batch.incorrect; break;
      case Outcome::Undecided: ++batch.undecided; break;
    }
    if (r.converged) times.push_back(r.convergence_time);
    sizes.push_back(r.steady_subset_size);
    if (r.morans_i) morans.push_back(*r.morans_i);
  }
  batch.convergence_time = summarize_metric(times);
  batch.steady_subset_size = summarize_metric(sizes);
  batch.morans_i = summarize_metric(morans);
  batch.runs = std::move(runs);
  return batch;
}

BatchSummary run_batch(const SimConfig& cfg, std::size_t repetitions, std::size_t threads,
                       const RunCallback& on_run) {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1", "repetitions");
  cfg.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, repetitions);

  std::vector<RunSummary> runs(repetitions);
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  const auto worker = [&] {
    for (std::size_t rep = next++; rep < repetitions; rep = next++) {
      Simulation sim(cfg, cfg.seed + rep);
      sim.run();
      runs[rep] = sim.summarize();
      if (on_run) {
        std::lock_guard lock(callback_mutex);
        on_run(rep, runs[rep]);
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return aggregate(std::move(runs));
}

SweepAxis parse_sweep_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(fmt::format("sweep '{}' must look like AXIS=V1,V2,...", text), "sweep");
  }
  SweepAxis axis{std::string(text.substr(0, eq)), {}};
  if (!is_field(axis.name)) {
    throw ConfigError(fmt::format("unknown sweep axis '{}'", axis.name), axis.name);
  }
  std::string_view rest = text.substr(eq + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view value = rest.substr(0, comma);
    if (!value.empty()) axis.values.emplace_back(value);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (axis.values.empty()) {
    throw ConfigError(fmt::format("sweep axis '{}' has no values", axis.name), axis.name);
  }
  return axis;
}

std::vector<Scenario> sweep(const SimConfig& base, std::span<const SweepAxis> axes) {
  std::vector<Scenario> out{Scenario{"base", {}, base}};
  for (const SweepAxis& axis : axes) {
    if (!is_field(axis.name)) throw ConfigError(fmt::format("unknown sweep axis '{}'", axis.name), axis.name);
    if (axis.values.empty()) {
      throw ConfigError(fmt::format("sweep axis '{}' has no values", axis.name), axis.name);
    }
    std::vector<Scenario> next;
    next.reserve(out.size() * axis.values.size());
    for (const Scenario& s : out) {
      for (const std::string& v : axis.values) {
        Scenario child = s;
        set_field(child.config, axis.name, v);
        child.params.emplace_back(axis.name, v);
        next.push_back(std::move(child));
      }
    }
    out = std::move(next);
  }
  for (Scenario& s : out) {
    if (s.params.empty()) continue;
    std::string label;
    for (const auto& [k, v] : s.params) {
      if (!label.empty()) label += ',';
      label += k + '=' + v;
    }
    s.label = label;
    s.config.validate();
  }
  if (out.size() == 1) out.front().config.validate();
  return out;
}

void write_manifest(std::ostream& os, const std::vector<Scenario>& scenarios) {
  json doc;
  doc["format"] = "subcdm-manifest-1";
  json list = json::array();
  for (const Scenario& s : scenarios) {
    json entry;
    entry["label"] = s.label;
    json params = json::array();
    for (const auto& [k, v] : s.params) params.push_back({k, v});
    entry["params"] = params;
    entry["config"] = to_key_values(s.config);
    json seeds = json::array();
    for (std::size_t rep = 0; rep < s.config.repetitions; ++rep) seeds.push_back(s.config.seed + rep);
    entry["seeds"] = seeds;
    list.push_back(entry);
  }
  doc["scenarios"] = list;
  os << doc.dump(2) << '\n';
}

std::vector<Scenario> read_manifest(std::istream& is) {
  const json doc = json::parse(is);
  std::vector<Scenario> out;
  for (const json& entry : doc.at("scenarios")) {
    Scenario s;
    s.label = entry.at("label").get<std::string>();
    for (const json& p : entry.at("params")) {
      s.params.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    }
    for (const auto& [k, v] : entry.at("config").items()) set_field(s.config, k, v.get<std::string>());
    s.config.validate();
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary_json(std::ostream& os, const RunSummary& r) {
  json j;
  j["seed"] = r.seed;
  j["converged"] = r.converged;
  j["decision"] = r.decision ? json(std::string(1, color_char(*r.decision))) : json(nullptr);
  j["convergence_time"] = r.converged ? json(r.convergence_time) : json(nullptr);
  j["duration"] = r.duration;
  j["steady_subset_size"] = r.steady_subset_size;
  j["morans_i"] = r.morans_i ? json(*r.morans_i) : json(nullptr);
  j["outcome"] = std::string(outcome_name(r.outcome));
  j["final_s"] = r.final_s;
  j["mean_s"] = r.mean_s;
  j["leader_changes"] = r.leader_changes;
  j["messages_delivered"] = r.messages_delivered;
  os << j.dump() << '\n';
}

void write_aggregate_header(std::ostream& os, std::span<const std::string> param_names) {
  for (const std::string& p : param_names) os << p << ',';
  os << "runs,correct,incorrect,undecided,accuracy,"
        "conv_time_median,conv_time_p25,conv_time_p75,"
        "subset_median,subset_p25,subset_p75,"
        "morans_median,morans_p25,morans_p75\n";
}

void write_aggregate_row(std::ostream& os, const Scenario& scenario, const BatchSummary& b) {
  for (const auto& [k, v] : scenario.params) os << v << ',';
  const auto stats = [](const MetricStats& m) {
    if (m.n == 0) return std::string(",,");
    return fmt::format("{:.4f},{:.4f},{:.4f}", m.median, m.p25, m.p75);
  };
  fmt::print(os, "{},{},{},{},{:.4f},{},{},{}\n", b.runs.size(), b.correct, b.incorrect, b.undecided,
             b.accuracy(), stats(b.convergence_time), stats(b.steady_subset_size), stats(b.morans_i));
}

void write_heatmap(std::ostream& os, const GridField& field) {
  for (std::size_t r = 0; r < field.rows; ++r) {
    for (std::size_t c = 0; c < field.cols; ++c) {
      if (c) os << ' ';
      fmt::print(os, "{:.1f}", field.at(c, r));
    }
    os << '\n';
  }
}

namespace {

std::filesystem::path scenario_dir(const std::filesystem::path& root, const Scenario& s) {
  std::string name = s.label;
  std::replace(name.begin(), name.end(), ',', '_');
  std::replace(name.begin(), name.end(), '/', '_');
  return root / name;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

std::vector<BatchSummary> run_experiment(const std::vector<Scenario>& scenarios,
                                         const ExperimentOptions& options, std::ostream* progress) {
  namespace fs = std::filesystem;
  fs::create_directories(options.out_dir);
  {
    std::ofstream manifest = open_output(options.out_dir / "manifest.json");
    write_manifest(manifest, scenarios);
  }

  std::vector<std::string> param_names;
  if (!scenarios.empty()) {
    for (const auto& [k, v] : scenarios.front().params) param_names.push_back(k);
  }
  std::ofstream table = open_output(options.out_dir / "aggregates.csv");
  write_aggregate_header(table, param_names);

  std::vector<BatchSummary> results;
  for (const Scenario& s : scenarios) {
    const fs::path dir = scenario_dir(options.out_dir, s);
    fs::create_directories(dir);
    const SimConfig& cfg = s.config;

    std::vector<RunSummary> runs(cfg.repetitions);
    if (options.write_traces || options.write_heatmaps) {
      // Traces are written from the run itself, so these runs stay sequential.
      for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        const std::uint64_t seed = cfg.seed + rep;
        Simulation sim(cfg, seed);
        std::ofstream robot_trace;
        if (options.write_traces) {
          robot_trace = open_output(dir / fmt::format("trace_{}.csv", seed));
          sim.attach_robot_trace(robot_trace);
        }
        sim.run();
        runs[rep] = sim.summarize();
        if (options.write_traces) {
          std::ofstream ticks = open_output(dir / fmt::format("ticks_{}.csv", seed));
          write_tick_csv(ticks, sim.trace());
        }
        if (options.write_heatmaps) {
          std::ofstream heat = open_output(dir / fmt::format("heatmap_{}.txt", seed));
          write_heatmap(heat, sim.heatmap().field());
        }
      }
    } else {
      runs = run_batch(cfg, cfg.repetitions, options.threads).runs;
    }

    BatchSummary batch = aggregate(std::move(runs));
    {
      std::ofstream summaries = open_output(dir / "summaries.jsonl");
      for (const RunSummary& r : batch.runs) write_summary_json(summaries, r);
      std::ofstream agg = open_output(dir / "aggregate.csv");
      write_aggregate_header(agg, param_names);
      write_aggregate_row(agg, s, batch);
    }
    write_aggregate_row(table, s, batch);
    if (progress) {
      fmt::print(*progress, "{}: {} runs, accuracy {:.2f}, median subset {:.1f}, median time {:.1f} s\n",
                 s.label, batch.runs.size(), batch.accuracy(), batch.steady_subset_size.median,
                 batch.convergence_time.median);
    }
    results.push_back(std::move(batch));
  }
  return results;
}

}  // namespace subcdm
