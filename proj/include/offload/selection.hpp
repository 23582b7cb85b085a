#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace offload {

/// Servers ordered fastest-path first.
struct ServerRanking {
  std::vector<std::size_t> order;    // permutation of 0..N-1, ascending unit delay
  std::vector<double> sorted_delay_s; // unit delays in that order
};

/// Aggregate constants of a chosen server subset.  The whole optimization
/// depends on the subset only through these.
struct SubsetAggregates {
  std::size_t size = 0;
  double inv_delay_sum = 0.0;    // sum of 1/unit_delay over the subset (1/s)
  double effective_delay_s = 0.0; // upload delay + 1/inv_delay_sum
  double worst_delay_s = 0.0;     // upload delay + max unit delay in the subset
};

/// Sorts servers by ascending unit delay; ties keep original order so the
/// ranking is reproducible.
inline ServerRanking rank_servers(std::span<const double> unit_delay_s) {
  if (unit_delay_s.empty()) {
    throw std::invalid_argument("rank_servers: empty fleet");
  }
  ServerRanking r;
  r.order.resize(unit_delay_s.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
    if (unit_delay_s[a] != unit_delay_s[b]) return unit_delay_s[a] < unit_delay_s[b];
    return a < b;
  });
  r.sorted_delay_s.reserve(unit_delay_s.size());
  for (std::size_t i : r.order) r.sorted_delay_s.push_back(unit_delay_s[i]);
  return r;
}

inline SubsetAggregates subset_aggregates(double upload_delay_s,
                                          std::span<const double> subset_delay_s) {
  if (subset_delay_s.empty()) {
    throw std::invalid_argument("subset_aggregates: empty subset");
  }
  SubsetAggregates agg;
  agg.size = subset_delay_s.size();
  double max_delay = 0.0;
  for (double q : subset_delay_s) {
    agg.inv_delay_sum += 1.0 / q;
    max_delay = std::max(max_delay, q);
  }
  agg.effective_delay_s = upload_delay_s + 1.0 / agg.inv_delay_sum;
  agg.worst_delay_s = upload_delay_s + max_delay;
  return agg;
}

}  // namespace offload
