#include "subcdm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace subcdm {

ConvergenceDetector::ConvergenceDetector(double threshold, double hold, double dt)
    : threshold_(threshold), hold_ticks_(std::lround(hold / dt)), dt_(dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive", "tick_rate");
}

bool ConvergenceDetector::observe(long tick, OpinionCounts counts) {
  if (result_.converged) return false;
  std::optional<Opinion> leading;
  if (const std::size_t n = counts.total(); n > 0) {
    const auto need = threshold_ * static_cast<double>(n) - 1e-9;
    if (static_cast<double>(counts.black) >= need) {
      leading = Opinion::Black;
    } else if (static_cast<double>(counts.white) >= need) {
      leading = Opinion::White;
    }
  }
  if (!leading) {
    streak_opinion_.reset();
    return false;
  }
  if (streak_opinion_ != leading) {
    streak_opinion_ = leading;
    streak_start_ = tick;
  }
  if (tick - streak_start_ >= hold_ticks_) {
    result_.converged = true;
    result_.decision = leading;
    result_.time = static_cast<double>(streak_start_ + hold_ticks_) * dt_;
    return true;
  }
  return false;
}

ConvergenceResult detect_convergence(std::span<const OpinionCounts> series, double threshold,
                                     double hold, double dt) {
  ConvergenceDetector detector(threshold, hold, dt);
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (detector.observe(static_cast<long>(t), series[t])) break;
  }
  return detector.result();
}

double GridField::sum() const noexcept {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

std::optional<double> morans_index(const GridField& field, Contiguity weights) {
  const std::size_t n = field.values.size();
  if (n < 2 || field.cols * field.rows != n) return std::nullopt;
  const double mean = field.sum() / static_cast<double>(n);

  double denom = 0.0;
  for (double v : field.values) denom += (v - mean) * (v - mean);
  if (!(denom > 0.0)) return std::nullopt;

  // Each unordered neighbor pair visited once; both w_ij and w_ji counted.
  double cross = 0.0;
  double weight_sum = 0.0;
  const auto link = [&](std::size_t a, std::size_t b) {
    cross += 2.0 * (field.values[a] - mean) * (field.values[b] - mean);
    weight_sum += 2.0;
  };
  for (std::size_t r = 0; r < field.rows; ++r) {
    for (std::size_t c = 0; c < field.cols; ++c) {
      const std::size_t i = r * field.cols + c;
      if (c + 1 < field.cols) link(i, i + 1);
      if (r + 1 < field.rows) link(i, i + field.cols);
      if (weights == Contiguity::Queen && r + 1 < field.rows) {
        if (c + 1 < field.cols) link(i, i + field.cols + 1);
        if (c > 0) link(i, i + field.cols - 1);
      }
    }
  }
  if (weight_sum == 0.0) return std::nullopt;
  return (static_cast<double>(n) / weight_sum) * cross / denom;
}

CoverageHeatmap::CoverageHeatmap(double arena_side, double cell) : cell_(cell) {
  const double ratio = arena_side / cell;
  const double rounded = std::round(ratio);
  if (!(cell > 0.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0) {
    throw ConfigError(fmt::format("heatmap cell {} does not divide arena side {}", cell, arena_side),
                      "heatmap_cell");
  }
  const auto c = static_cast<std::size_t>(rounded);
  field_ = GridField{c, c, std::vector<double>(c * c, 0.0)};
}

void CoverageHeatmap::accumulate(Vec2 position, double dt) {
  const auto clamp_index = [&](double v) {
    if (v <= 0.0) return std::size_t{0};
    return std::min(field_.cols - 1, static_cast<std::size_t>(v / cell_));
  };
  field_.at(clamp_index(position.x), clamp_index(position.y)) += dt;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double rank = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (rank - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return percentile(std::move(values), 50.0); }

double steady_subset_size(std::span<const int> dm_counts, double dt, double end_time, double window) {
  if (dm_counts.empty()) return 0.0;
  const long last = std::min(static_cast<long>(dm_counts.size()) - 1, std::lround(end_time / dt));
  const long first = std::max(0L, last - std::lround(window / dt));
  std::vector<double> slice;
  slice.reserve(static_cast<std::size_t>(last - first + 1));
  for (long t = first; t <= last; ++t) slice.push_back(dm_counts[static_cast<std::size_t>(t)]);
  return median(std::move(slice));
}

std::vector<int> RunTrace::dm_series() const {
  std::vector<int> out;
  out.reserve(ticks.size());
  for (const TickRecord& r : ticks) out.push_back(r.decision_makers);
  return out;
}

std::string_view outcome_name(Outcome o) noexcept {
  switch (o) {
    case Outcome::Correct: return "correct";
    case Outcome::Incorrect: return "incorrect";
    case Outcome::Undecided: return "undecided";
  }
  return "?";
}

}  // namespace subcdm
