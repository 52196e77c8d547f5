#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <numeric>

namespace subcdm::oracle {

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double rn = std::sqrt(static_cast<double>(n));
  return c / (rn + 0.12 + 0.11 / rn);
}

RankTest mann_whitney_greater(std::span<const double> x, std::span<const double> y) {
  struct Item {
    double v;
    bool from_x;
  };
  std::vector<Item> all;
  for (double v : x) all.push_back({v, true});
  for (double v : y) all.push_back({v, false});
  std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.v < b.v; });

  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  const double n = n1 + n2;
  double rank_sum_x = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].from_x) rank_sum_x += mid;
    }
    i = j;
  }

  RankTest out;
  out.u = rank_sum_x - n1 * (n1 + 1.0) / 2.0;
  const double mean = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return out;
  out.z = (out.u - mean - 0.5) / std::sqrt(var);
  out.p_value = 0.5 * std::erfc(out.z / std::sqrt(2.0));
  return out;
}

std::vector<int> bfs_distances(std::span<const std::vector<std::size_t>> adjacency,
                               std::size_t root) {
  std::vector<int> dist(adjacency.size(), -1);
  std::deque<std::size_t> queue{root};
  dist[root] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adjacency[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

double morans_reference(std::span<const double> values, std::size_t cols, std::size_t rows,
                        bool queen) {
  const std::size_t n = cols * rows;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double num = 0.0;
  double w_total = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    den += (values[i] - mean) * (values[i] - mean);
    const long ci = static_cast<long>(i % cols);
    const long ri = static_cast<long>(i / cols);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const long dc = std::labs(ci - static_cast<long>(j % cols));
      const long dr = std::labs(ri - static_cast<long>(j / cols));
      const bool adjacent = queen ? (dc <= 1 && dr <= 1) : (dc + dr == 1);
      if (!adjacent) continue;
      w_total += 1.0;
      num += (values[i] - mean) * (values[j] - mean);
    }
  }
  return static_cast<double>(n) / w_total * num / den;
}

}  // namespace subcdm::oracle
