#pragma once

// Reference implementations used only by tests. Deliberately naive.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace subcdm::oracle {

/// Two-sided one-sample Kolmogorov-Smirnov statistic against `cdf`.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Asymptotic critical value of the KS statistic at level `alpha` for `n` draws.
double ks_critical(std::size_t n, double alpha);

struct RankTest {
  double u = 0.0;        // U statistic of the first sample
  double z = 0.0;
  double p_value = 1.0;  // one-sided
};

/// Mann-Whitney U, one-sided alternative "x tends to be larger than y".
/// Normal approximation with tie and continuity corrections.
RankTest mann_whitney_greater(std::span<const double> x, std::span<const double> y);

/// Unweighted shortest-path distances from `root`; -1 where unreachable.
std::vector<int> bfs_distances(std::span<const std::vector<std::size_t>> adjacency,
                               std::size_t root);

/// Moran's I by the textbook double sum over all cell pairs.
/// `queen` selects 8-neighbour contiguity, otherwise 4-neighbour.
double morans_reference(std::span<const double> values, std::size_t cols, std::size_t rows,
                        bool queen);

}  // namespace subcdm::oracle
