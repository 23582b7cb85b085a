#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "offload/evaluator.hpp"
#include "offload/model.hpp"
#include "offload/random.hpp"
#include "offload/solver.hpp"

namespace offload {

/// Grid resolutions for the brute-force split search.
struct GridSpec {
  double x0_step = 1e-3;        // local-fraction grid
  double allocation_step = 1e-3; // simplex unit for the per-server shares
  double delay_step = 1e-3;      // local compute time grid (geometric, 1/step points)
};

struct GridSearchResult {
  double objective_j = 0.0; // reduced objective of the best grid point
  OffloadPlan plan;
};

/// Exhaustive scan of the split problem over a fixed subset: every grid
/// local fraction, every discretized share vector over the subset, every
/// grid local compute time.  Candidates are priced through evaluate() with
/// the constant full-upload and tail terms removed, keeping this search
/// fully independent of the closed-form solver.  Subset size is capped at 3
/// to keep the simplex enumeration tractable.
inline GridSearchResult grid_search_split(const Instance& in,
                                          std::span<const std::size_t> subset,
                                          const GridSpec& grid) {
  if (subset.empty() || subset.size() > 3) {
    throw std::invalid_argument("grid_search_split: subset size must be 1..3");
  }
  for (double step : {grid.x0_step, grid.allocation_step, grid.delay_step}) {
    if (!(step > 0.0 && step <= 0.1)) {
      throw std::invalid_argument("grid_search_split: steps must lie in (0, 0.1]");
    }
  }

  const DerivedParams params = derive_params(in);
  const std::size_t n = subset.size();
  std::vector<double> unit_delay(n);
  double worst_unit = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    unit_delay[i] = params.unit_delay_s[subset[i]];
    worst_unit = std::max(worst_unit, unit_delay[i]);
  }

  const double weight = in.delay_weight;
  const double kappa = in.device.switched_capacitance;
  const double f_max = in.device.max_frequency_hz;
  const double upload_e = params.upload_energy_j;
  const double upload_d = params.upload_delay_s;

  // Compute-time ceiling: past the slowest chain, the per-fraction tradeoff
  // delay, and the frequency-cap time, longer local compute only costs more.
  const double delay_hi = 1.5 * std::max({upload_d + worst_unit,
                                          std::cbrt(2.0 * params.energy_coeff / weight),
                                          params.total_cycles / f_max});
  const int delay_points = static_cast<int>(std::ceil(1.0 / grid.delay_step));
  const int x0_points = static_cast<int>(std::round(1.0 / grid.x0_step));

  double best_objective = kUnbounded;
  double best_x0 = 1.0;
  double best_delay = 0.0; // 0 marks "no local compute"
  std::vector<double> best_shares(n, 0.0);

  std::vector<double> shares(n);
  for (int j = 0; j <= x0_points; ++j) {
    const double x0 = static_cast<double>(j) / x0_points;
    const double offloaded = 1.0 - x0;
    const int units = static_cast<int>(std::round(offloaded / grid.allocation_step));
    const double scale = units > 0 ? offloaded / units : 0.0;

    // Smallest slowest-chain delay over the discrete simplex, by enumeration.
    double min_chain = upload_d * offloaded;
    bool have_alloc = false;
    auto consider = [&](double s0, double s1, double s2) {
      const double chain = upload_d * offloaded +
                           std::max({unit_delay[0] * s0, n > 1 ? unit_delay[1] * s1 : 0.0,
                                     n > 2 ? unit_delay[2] * s2 : 0.0});
      if (!have_alloc || chain < min_chain) {
        have_alloc = true;
        min_chain = chain;
        shares[0] = s0;
        if (n > 1) shares[1] = s1;
        if (n > 2) shares[2] = s2;
      }
    };
    if (units == 0) {
      std::fill(shares.begin(), shares.end(), 0.0);
      min_chain = 0.0; // nothing offloaded: no server chain at all
    } else if (n == 1) {
      consider(units * scale, 0.0, 0.0);
    } else if (n == 2) {
      for (int u = 0; u <= units; ++u) consider(u * scale, (units - u) * scale, 0.0);
    } else {
      for (int u0 = 0; u0 <= units; ++u0) {
        for (int u1 = 0; u1 + u0 <= units; ++u1) {
          consider(u0 * scale, u1 * scale, (units - u0 - u1) * scale);
        }
      }
    }

    const double cycles = params.total_cycles * x0;
    if (cycles == 0.0) {
      const double objective = weight * min_chain;
      if (objective < best_objective) {
        best_objective = objective;
        best_x0 = x0;
        best_delay = 0.0;
        best_shares = shares;
      }
      continue;
    }

    auto try_delay = [&](double local_delay) {
      if (!(local_delay > 0.0) || cycles / local_delay > f_max * (1.0 + 1e-12)) return;
      const double f = cycles / local_delay;
      const double objective = kappa * cycles * f * f - upload_e * x0 +
                               weight * std::max(local_delay, min_chain);
      if (objective < best_objective) {
        best_objective = objective;
        best_x0 = x0;
        best_delay = local_delay;
        best_shares = shares;
      }
    };
    // Geometric grid keeps the relative resolution uniform across the scan
    // range, whose ends can sit several decades apart.
    const double delay_lo = std::max(cycles / f_max, delay_hi * 1e-4);
    const double ratio = std::log(delay_hi / delay_lo);
    for (int k = 0; k <= delay_points; ++k) {
      try_delay(delay_lo * std::exp(ratio * static_cast<double>(k) / delay_points));
    }
    try_delay(min_chain);              // the kink of max(local, chain)
    try_delay(cycles / f_max);         // the frequency cap
  }

  // Materialize the winner and price it through the cost accountant.
  GridSearchResult result;
  result.plan.local_fraction = best_x0;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_shares[i] > 0.0) result.plan.allocations[subset[i]] = best_shares[i];
  }
  if (best_delay > 0.0) {
    const double cycles = params.total_cycles * best_x0;
    result.plan.schedule = FrequencySchedule::uniform(cycles, cycles / best_delay);
  }
  const CostBreakdown bd = evaluate(in, result.plan);
  result.objective_j = bd.objective_j - upload_e -
                       (best_x0 < 1.0 - 1e-12 ? in.device.tail_energy_j : 0.0);
  if (std::abs(result.objective_j - best_objective) >
      1e-9 * std::max(1.0, std::abs(result.objective_j))) {
    throw std::logic_error("grid_search_split: scan arithmetic disagrees with evaluate()");
  }
  return result;
}

/// Exhaustive subset search: evaluates the closed-form split over every
/// non-empty subset of at most server_cap servers and returns the cheapest.
/// Fleet size is capped at 12.
inline std::vector<std::size_t> best_subset_bruteforce(const Instance& in) {
  const std::size_t n = in.servers.size();
  if (n == 0 || n > 12) {
    throw std::invalid_argument("best_subset_bruteforce: fleet size must be 1..12");
  }
  const DerivedParams params = derive_params(in);
  const unsigned full = 1u << n;

  double best = kUnbounded;
  unsigned best_mask = 0;
  std::vector<double> q;
  for (unsigned mask = 1; mask < full; ++mask) {
    if (std::popcount(mask) > in.server_cap) continue;
    q.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) q.push_back(params.unit_delay_s[i]);
    }
    const double value = solve_subset(params, q, in.delay_weight).objective_j;
    if (value < best) {
      best = value;
      best_mask = mask;
    }
  }

  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_mask & (1u << i)) chosen.push_back(i);
  }
  return chosen;
}

/// Samples random piecewise-constant schedules with a fixed cycle budget and
/// total compute time, and checks each against the convexity lower bound
/// kappa * cycles^3 / time^2 (met with equality by the uniform schedule).
inline bool jensen_check(double cycles, double delay_s, double switched_capacitance,
                         int trials, std::uint64_t seed) {
  const double bound = switched_capacitance * cycles * cycles * cycles / (delay_s * delay_s);

  const FrequencySchedule uniform = FrequencySchedule::uniform(cycles, cycles / delay_s);
  if (std::abs(uniform.energy_j(switched_capacitance) - bound) > 1e-12 * bound) return false;

  SplitMix64 rng(seed);
  std::vector<double> cycle_weight, delay_weight;
  for (int t = 0; t < trials; ++t) {
    const std::size_t segments = 1 + rng.below(16);
    cycle_weight.resize(segments);
    delay_weight.resize(segments);
    double cw = 0.0, dw = 0.0;
    for (std::size_t i = 0; i < segments; ++i) {
      cw += cycle_weight[i] = rng.uniform(0.05, 1.0);
      dw += delay_weight[i] = rng.uniform(0.05, 1.0);
    }
    FrequencySchedule sched;
    for (std::size_t i = 0; i < segments; ++i) {
      const double c = cycles * cycle_weight[i] / cw;
      const double d = delay_s * delay_weight[i] / dw;
      sched.segments.push_back({c, c / d});
    }
    if (sched.energy_j(switched_capacitance) < bound - 1e-9) return false;
  }
  return true;
}

}  // namespace offload
