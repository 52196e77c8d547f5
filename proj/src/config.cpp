#include "subcdm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <sstream>
#include <utility>

#include <fmt/format.h>

namespace subcdm {

std::string_view strategy_name(Strategy s) noexcept {
  switch (s) {
    case Strategy::FullSwarmDMVD: return "full";
    case Strategy::LeaderBased: return "leader";
    case Strategy::Distributed: return "distributed";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "full" || name == "full-swarm" || name == "FullSwarmDMVD") return Strategy::FullSwarmDMVD;
  if (name == "leader" || name == "leader-based" || name == "LeaderBased") return Strategy::LeaderBased;
  if (name == "distributed" || name == "Distributed") return Strategy::Distributed;
  throw ConfigError(fmt::format("unknown strategy '{}' (expected full, leader or distributed)", name),
                    "strategy");
}

long SimConfig::max_ticks() const noexcept { return std::lround(max_duration * tick_rate); }

void SimConfig::validate() const {
  const auto require = [](bool ok, std::string_view field, std::string msg) {
    if (!ok) throw ConfigError(fmt::format("{}: {}", field, msg), std::string(field));
  };
  require(n_robots >= 1, "n_robots", "must be >= 1");
  require(arena_side > 0.0, "arena_side", "must be positive");
  require(tile_size > 0.0, "tile_size", "must be positive");
  const double tiles = arena_side / tile_size;
  require(std::abs(tiles - std::round(tiles)) <= 1e-9 * std::max(1.0, tiles), "arena_side",
          "must be an integer multiple of tile_size");
  require(black_fraction >= 0.0 && black_fraction <= 1.0, "black_fraction", "must lie in [0, 1]");
  require(tick_rate > 0.0, "tick_rate", "must be positive");
  require(max_duration > 0.0, "max_duration", "must be positive");
  require(noise_p >= 0.0 && noise_p <= 1.0, "noise_p", "must lie in [0, 1]");
  require(mean_role_time > 0.0, "mean_role_time", "must be positive");
  require(faults.probability >= 0.0 && faults.probability <= 1.0, "fault_prob", "must lie in [0, 1]");
  require(faults.duration > 0.0, "fault_duration", "must be positive");
  require(hop.expiry > 0.0, "hop_expiry", "must be positive");
  require(election.settle_time >= 0.0, "t_elect", "must be non-negative");
  require(election.timeout > 0.0, "election_timeout", "must be positive");
  require(fixed_s >= 0, "fixed_s", "must be >= 0");
  require(convergence_threshold > 0.5 && convergence_threshold <= 1.0, "convergence_threshold",
          "must lie in (0.5, 1]");
  require(convergence_hold >= 0.0, "convergence_hold", "must be non-negative");
  require(convergence_margin >= 0.0, "convergence_margin", "must be non-negative");
  require(steady_window >= 0.0, "steady_window", "must be non-negative");
  require(heatmap_cell > 0.0, "heatmap_cell", "must be positive");
  const double cells = arena_side / heatmap_cell;
  require(std::abs(cells - std::round(cells)) <= 1e-9 * std::max(1.0, cells), "heatmap_cell",
          "must divide arena_side");
  require(repetitions >= 1, "repetitions", "must be >= 1");
  require(motion.speed >= 0.0, "speed", "must be non-negative");
  require(motion.mean_straight > 0.0, "mean_straight", "must be positive");
  require(motion.max_rotation >= 0.0, "max_rotation", "must be non-negative");
  require(motion.body_diameter > 0.0, "body_diameter", "must be positive");
  require(relay.ttl > 0.0, "relay_ttl", "must be positive");
  dmvd.validate();
  comms.validate();
  eval.validate();
  confidence.validate();
}

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (text == "inf" || text == "infinity") return std::numeric_limits<T>::infinity();
  }
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError(fmt::format("{}: cannot parse '{}'", key, text), std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, text), std::string(key));
}

std::string format_double(double v) {
  if (std::isinf(v)) return "inf";
  return fmt::format("{}", v);
}

struct Field {
  std::string_view name;
  std::function<void(SimConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

#define SUBCDM_DOUBLE(NAME, EXPR)                                                                \
  Field {                                                                                        \
    NAME, [](SimConfig& c, std::string_view k, std::string_view v) { c.EXPR = parse_number<double>(k, v); }, \
        [](const SimConfig& c) { return format_double(c.EXPR); }                                \
  }
#define SUBCDM_INT(NAME, TYPE, EXPR)                                                             \
  Field {                                                                                        \
    NAME, [](SimConfig& c, std::string_view k, std::string_view v) { c.EXPR = parse_number<TYPE>(k, v); }, \
        [](const SimConfig& c) { return fmt::format("{}", c.EXPR); }                            \
  }
#define SUBCDM_BOOL(NAME, EXPR)                                                                  \
  Field {                                                                                        \
    NAME, [](SimConfig& c, std::string_view k, std::string_view v) { c.EXPR = parse_bool(k, v); }, \
        [](const SimConfig& c) { return std::string(c.EXPR ? "true" : "false"); }               \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"strategy",
            [](SimConfig& c, std::string_view, std::string_view v) { c.strategy = parse_strategy(v); },
            [](const SimConfig& c) { return std::string(strategy_name(c.strategy)); }},
      SUBCDM_INT("n_robots", std::size_t, n_robots),
      SUBCDM_DOUBLE("arena_side", arena_side),
      SUBCDM_DOUBLE("tile_size", tile_size),
      SUBCDM_DOUBLE("black_fraction", black_fraction),
      SUBCDM_DOUBLE("tick_rate", tick_rate),
      SUBCDM_DOUBLE("max_duration", max_duration),
      SUBCDM_DOUBLE("sigma", dmvd.sigma),
      SUBCDM_DOUBLE("g", dmvd.g),
      SUBCDM_DOUBLE("rho_min", dmvd.rho_min),
      SUBCDM_DOUBLE("speed", motion.speed),
      SUBCDM_DOUBLE("mean_straight", motion.mean_straight),
      SUBCDM_DOUBLE("max_rotation", motion.max_rotation),
      SUBCDM_DOUBLE("angular_speed", motion.angular_speed),
      SUBCDM_DOUBLE("body_diameter", motion.body_diameter),
      SUBCDM_DOUBLE("proximity_radius", motion.proximity_radius),
      SUBCDM_DOUBLE("avoid_margin", motion.avoid_margin),
      SUBCDM_DOUBLE("d_comm", comms.d_comm),
      SUBCDM_INT("delivery_period", int, comms.delivery_period),
      SUBCDM_DOUBLE("drop_probability", comms.drop_probability),
      SUBCDM_DOUBLE("fault_prob", faults.probability),
      SUBCDM_DOUBLE("fault_duration", faults.duration),
      SUBCDM_DOUBLE("noise_p", noise_p),
      SUBCDM_DOUBLE("mean_role_time", mean_role_time),
      SUBCDM_DOUBLE("hop_expiry", hop.expiry),
      SUBCDM_INT("n_op", std::size_t, eval.n_op),
      SUBCDM_DOUBLE("r_op", eval.r_op),
      SUBCDM_DOUBLE("tau_op", eval.tau_op),
      SUBCDM_INT("k", std::size_t, eval.k),
      SUBCDM_DOUBLE("per_s_timeout", eval.per_s_timeout),
      SUBCDM_BOOL("leader_election", leader_election),
      SUBCDM_DOUBLE("t_elect", election.settle_time),
      SUBCDM_DOUBLE("election_timeout", election.timeout),
      SUBCDM_DOUBLE("alpha_init", confidence.alpha_init),
      SUBCDM_DOUBLE("gamma", confidence.gamma),
      SUBCDM_DOUBLE("alpha_step", confidence.step),
      SUBCDM_INT("s_init", int, confidence.s_init),
      SUBCDM_DOUBLE("p_per_s", confidence.p_per_s),
      SUBCDM_INT("relay_capacity", std::size_t, relay.capacity),
      SUBCDM_DOUBLE("relay_ttl", relay.ttl),
      SUBCDM_INT("fixed_s", int, fixed_s),
      SUBCDM_BOOL("stop_on_convergence", stop_on_convergence),
      SUBCDM_DOUBLE("convergence_threshold", convergence_threshold),
      SUBCDM_DOUBLE("convergence_hold", convergence_hold),
      SUBCDM_DOUBLE("convergence_margin", convergence_margin),
      SUBCDM_DOUBLE("steady_window", steady_window),
      SUBCDM_DOUBLE("heatmap_cell", heatmap_cell),
      SUBCDM_INT("seed", std::uint64_t, seed),
      SUBCDM_INT("repetitions", std::size_t, repetitions),
  };
  return table;
}

#undef SUBCDM_DOUBLE
#undef SUBCDM_INT
#undef SUBCDM_BOOL

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (f.name == key) return &f;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void set_field(SimConfig& cfg, std::string_view key, std::string_view value) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError(fmt::format("unknown configuration key '{}'", key), std::string(key));
  f->set(cfg, key, trim(value));
}

bool is_field(std::string_view key) { return find_field(key) != nullptr; }

std::vector<std::string> field_names() {
  std::vector<std::string> names;
  for (const Field& f : fields()) names.emplace_back(f.name);
  return names;
}

std::map<std::string, std::string> to_key_values(const SimConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const Field& f : fields()) out.emplace(std::string(f.name), f.get(cfg));
  return out;
}

void apply_key_values(SimConfig& cfg, std::istream& in) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", number));
    }
    set_field(cfg, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
  }
}

SimConfig load_config_file(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path), "config");
  apply_key_values(base, in);
  return base;
}

}  // namespace subcdm
