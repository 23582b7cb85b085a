#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "offload/evaluator.hpp"
#include "offload/model.hpp"
#include "offload/selection.hpp"

namespace offload {

/// Raised when no branch can meet the task deadline.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The energy-minimizing uniform CPU frequency for a given delay weight:
/// the stationary point of kappa*f^2 + weight/f per cycle, capped at the
/// device maximum.
inline double optimal_frequency(double delay_weight, double switched_capacitance,
                                double max_frequency_hz) {
  const double stationary = std::cbrt(delay_weight / (2.0 * switched_capacitance));
  return std::min(stationary, max_frequency_hz);
}

/// Unique non-negative root of 2y^3 + 3y^2 = rhs.
///
/// The left side is strictly increasing for y >= 0, so the root is unique.
/// Safeguarded Newton: the start value min(cbrt(rhs/2), sqrt(rhs/3)) bounds
/// the root from above, and a shrinking bracket catches any overshoot.
inline double solve_cubic(double rhs) {
  if (rhs < 0.0) throw std::domain_error("solve_cubic: negative right-hand side");
  if (rhs == 0.0) return 0.0;

  double lo = 0.0;
  double hi = std::min(std::cbrt(rhs / 2.0), std::sqrt(rhs / 3.0));
  double y = hi;
  for (int iter = 0; iter < 128; ++iter) {
    const double residual = (2.0 * y + 3.0) * y * y - rhs;
    if (residual == 0.0) break;
    if (residual > 0.0) hi = y; else lo = y;
    const double slope = 6.0 * y * (y + 1.0);
    double next = slope > 0.0 ? y - residual / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 1e-16 * y) break;
    y = next;
  }
  return y;
}

/// Cheapest all-local execution: cost, uniform frequency, and compute time.
struct LocalSolution {
  double cost_j = 0.0;
  double frequency_hz = 0.0;
  double delay_s = 0.0;
};

/// Optimal local-only execution under the deadline.  The frequency is
/// raised above the unconstrained optimum when the deadline demands it
/// (the per-cycle cost is convex, so the smallest deadline-feasible uniform
/// frequency is energy-minimal).  Returns nullopt when even the maximum
/// frequency cannot finish in time.
inline std::optional<LocalSolution> solve_local(const DerivedParams& params,
                                                const DeviceSpec& device, double delay_weight,
                                                double deadline_s) {
  double f = optimal_frequency(delay_weight, device.switched_capacitance,
                               device.max_frequency_hz);
  if (params.total_cycles / f > deadline_s) {
    f = params.total_cycles / deadline_s;
    if (f > device.max_frequency_hz * (1.0 + 1e-12)) return std::nullopt;
    f = std::min(f, device.max_frequency_hz);
  }
  LocalSolution s;
  s.frequency_hz = f;
  s.delay_s = params.total_cycles / f;
  s.cost_j = params.total_cycles *
             (device.switched_capacitance * f * f + delay_weight / f);
  return s;
}

/// The reduced split cost as a function of the local fraction, in its three
/// regimes.  For a fixed fraction x the end-to-end offload delay can range
/// over [(1-x) * effective_delay, (1-x) * worst_delay]; the cost-minimizing
/// delay is the per-fraction tradeoff point clamped into that interval,
/// giving one closed form per regime.
struct ReducedCost {
  double at_delay_floor = 0.0;   // offload delay clamped at its minimum (equalizing split)
  double at_delay_ceiling = 0.0; // offload delay clamped at its maximum
  double balanced = 0.0;         // interior tradeoff point, linear in x
  int region = 0;                // which regime contains x: 1 floor, 2 ceiling, 3 balanced
  double tradeoff_delay_s = 0.0; // cbrt(2 * energy_coeff / delay_weight)
  double floor_boundary = 0.0;   // regime boundary between floor and balanced
  double ceiling_boundary = 0.0; // regime boundary between balanced and ceiling
};

inline ReducedCost reduced_cost_pieces(double x, double effective_delay_s, double worst_delay_s,
                                       double energy_coeff, double upload_energy_j,
                                       double delay_weight) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("reduced_cost_pieces: fraction outside [0, 1]");
  }
  if (x == 1.0) {
    throw std::domain_error("reduced_cost_pieces: pole at fraction 1");
  }
  ReducedCost rc;
  rc.tradeoff_delay_s = std::cbrt(2.0 * energy_coeff / delay_weight);
  const double r = rc.tradeoff_delay_s;
  rc.floor_boundary = effective_delay_s / (r + effective_delay_s);
  rc.ceiling_boundary = worst_delay_s / (r + worst_delay_s);

  const double ratio = x * x * x / ((1.0 - x) * (1.0 - x));
  auto clamped_cost = [&](double delay_scale) {
    return energy_coeff / (delay_scale * delay_scale) * ratio - upload_energy_j * x +
           delay_weight * (1.0 - x) * delay_scale;
  };
  rc.at_delay_floor = clamped_cost(effective_delay_s);
  rc.at_delay_ceiling = clamped_cost(worst_delay_s);
  rc.balanced = (energy_coeff / (r * r) - upload_energy_j + delay_weight * r) * x;

  if (x < rc.floor_boundary) rc.region = 1;
  else if (x > rc.ceiling_boundary) rc.region = 2;
  else rc.region = 3;
  return rc;
}

/// Right-hand side of the characteristic cubic at a given effective delay.
inline double characteristic_rhs(const DerivedParams& params, double delay_weight,
                                 double effective_delay_s) {
  return (params.upload_energy_j + delay_weight * effective_delay_s) * effective_delay_s *
         effective_delay_s / params.energy_coeff;
}

/// Overall delay delivered by the closed-form split at a given effective
/// delay.  Strictly increasing, with supremum cbrt(2 * energy_coeff / weight).
inline double split_delay_at(const DerivedParams& params, double delay_weight,
                             double effective_delay_s) {
  const double y = solve_cubic(characteristic_rhs(params, delay_weight, effective_delay_s));
  return effective_delay_s / (1.0 + y);
}

/// Reduced objective delivered by the closed-form split at a given effective
/// delay.  Strictly increasing in the effective delay.
inline double split_objective_at(const DerivedParams& params, double delay_weight,
                                 double effective_delay_s) {
  const double y = solve_cubic(characteristic_rhs(params, delay_weight, effective_delay_s));
  return 3.0 * params.energy_coeff * y * y / (effective_delay_s * effective_delay_s) -
         params.upload_energy_j;
}

/// Closed-form optimum of the split problem for a fixed server subset.
struct SubsetSolution {
  double local_fraction = 0.0;     // share kept on the device
  double split_ratio = 0.0;        // local share / offloaded share, the cubic's root
  double objective_j = 0.0;        // reduced objective (excludes full-upload and tail constants)
  double overall_delay_s = 0.0;    // end-to-end offload delay; equals the local compute time
  double local_frequency_hz = 0.0; // uniform device frequency achieving that time
  std::vector<double> allocations; // per-server shares, aligned with the subset argument
  SubsetAggregates aggregates;
  bool energy_assumption_ok = true; // local compute energy exceeds upload energy at the optimum
};

/// Solves the split problem over one subset of servers in closed form:
/// the split ratio comes from the characteristic cubic, the allocations
/// equalize every server chain's delay, and the device frequency is chosen
/// so local compute finishes exactly when the slowest chain does.
inline SubsetSolution solve_subset(const DerivedParams& params,
                                   std::span<const double> subset_delay_s,
                                   double delay_weight) {
  SubsetSolution s;
  s.aggregates = subset_aggregates(params.upload_delay_s, subset_delay_s);
  const double eff = s.aggregates.effective_delay_s;

  const double y = solve_cubic(characteristic_rhs(params, delay_weight, eff));
  const double offloaded = 1.0 / (1.0 + y); // 1 - local fraction, computed without cancellation
  s.split_ratio = y;
  s.local_fraction = y * offloaded;
  s.overall_delay_s = eff * offloaded;
  s.local_frequency_hz = params.total_cycles * y / eff;
  s.objective_j =
      3.0 * params.energy_coeff * y * y / (eff * eff) - params.upload_energy_j;

  s.allocations.reserve(subset_delay_s.size());
  for (double q : subset_delay_s) {
    s.allocations.push_back(offloaded / (s.aggregates.inv_delay_sum * q));
  }

  const double frequency_ratio = y / eff;
  s.energy_assumption_ok =
      params.energy_coeff * frequency_ratio * frequency_ratio > params.upload_energy_j;

  // Consistency guard: the closed form must sit on the floor piece of the
  // reduced cost.  Tolerance is loose only to ride out the (1-x)^2
  // cancellation at extreme splits.
  if (s.local_fraction < 1.0 - 1e-9) {
    const double check = reduced_cost_pieces(s.local_fraction, eff, s.aggregates.worst_delay_s,
                                             params.energy_coeff, params.upload_energy_j,
                                             delay_weight)
                             .at_delay_floor;
    if (std::abs(check - s.objective_j) >
        1e-6 * std::max({1e-12, std::abs(check), std::abs(s.objective_j)})) {
      throw std::logic_error("solve_subset: closed form disagrees with the reduced cost");
    }
  }
  return s;
}

/// Upper bounds on the effective delay a subset may have for the analytic
/// split to be deliverable: one from the deadline, one from the device
/// frequency cap.  kUnbounded marks a bound that can never bind.
struct FeasibilityGates {
  double deadline_bound_s = kUnbounded;  // effective delays above this miss the deadline
  double frequency_bound_s = kUnbounded; // effective delays above this need f > f_max
  double subset_delay_s = 0.0;           // effective delay of the chosen subset
  bool ok = true;                        // subset_delay_s clears both bounds
};

inline FeasibilityGates feasibility_gates(const DerivedParams& params, const DeviceSpec& device,
                                          double delay_weight, double deadline_s,
                                          double subset_delay_s) {
  FeasibilityGates g;
  g.subset_delay_s = subset_delay_s;

  if (deadline_s != kUnbounded) {
    // The delay map is strictly increasing with supremum equal to the
    // tradeoff delay, so a deadline at or above that supremum never binds.
    const double delay_sup = std::cbrt(2.0 * params.energy_coeff / delay_weight);
    if (deadline_s >= delay_sup * (1.0 - 1e-12)) {
      g.deadline_bound_s = kUnbounded;
    } else {
      double lo = deadline_s; // map value always undercuts its argument
      double hi = deadline_s * 2.0;
      while (split_delay_at(params, delay_weight, hi) < deadline_s) hi *= 2.0;
      for (int iter = 0; iter < 200 && (hi - lo) > 1e-14 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (split_delay_at(params, delay_weight, mid) < deadline_s) lo = mid;
        else hi = mid;
      }
      g.deadline_bound_s = 0.5 * (lo + hi);
    }
  }

  const double f_max = device.max_frequency_hz;
  const double cubed = params.total_cycles * params.total_cycles * params.total_cycles;
  const double denominator = delay_weight * cubed - 2.0 * params.energy_coeff * f_max * f_max * f_max;
  if (denominator > 0.0) {
    g.frequency_bound_s = (3.0 * params.energy_coeff * f_max * f_max * params.total_cycles -
                           params.upload_energy_j * cubed) /
                          denominator;
  }
  g.ok = subset_delay_s <= std::min(g.deadline_bound_s, g.frequency_bound_s);
  return g;
}

enum class ExecutionBranch { local_only, offload };

/// Full scheduling decision for one instance.
struct Solution {
  ExecutionBranch branch = ExecutionBranch::local_only;
  OffloadPlan plan;
  double objective_j = 0.0;
  FeasibilityGates gates;
  bool certified = false; // analytic optimality established (both gates clear)
  std::vector<std::size_t> selected; // chosen server indices, fastest path first
  std::optional<SubsetSolution> split;
  std::optional<LocalSolution> local;
};

/// Schedules one task: ranks servers by unit delay, solves the split over
/// the fastest-cap-many in closed form, prices pure local execution, and
/// returns the cheaper deadline-feasible branch.  O(N log N) in the fleet
/// size.  Preconditions: the instance passes validate (an empty fleet is
/// accepted and handled as local-only).
///
/// When a gate fails, the analytic split is not deliverable as-is; the
/// solver falls back to the best feasible branch and reports
/// certified == false, since optimality is only established under the gates.
/// Throws InfeasibleError when no branch can meet the deadline.
inline Solution solve(const Instance& in) {
  const DerivedParams params = derive_params(in);
  const double deadline = in.task.deadline_s;

  Solution sol;
  sol.local = solve_local(params, in.device, in.delay_weight, deadline);

  if (!in.servers.empty() && in.server_cap >= 1) {
    const ServerRanking ranking = rank_servers(params.unit_delay_s);
    const std::size_t take =
        std::min<std::size_t>(static_cast<std::size_t>(in.server_cap), in.servers.size());
    sol.selected.assign(ranking.order.begin(), ranking.order.begin() + take);
    sol.split = solve_subset(
        params, std::span<const double>(ranking.sorted_delay_s).first(take), in.delay_weight);
    sol.gates = feasibility_gates(params, in.device, in.delay_weight, deadline,
                                  sol.split->aggregates.effective_delay_s);
  }

  const double slack = 1.0 + 1e-9;
  const bool local_ok = sol.local.has_value();
  const bool offload_ok = sol.split.has_value() &&
                          sol.split->overall_delay_s <= deadline * slack &&
                          sol.split->local_frequency_hz <= in.device.max_frequency_hz * slack;
  if (!local_ok && !offload_ok) {
    throw InfeasibleError("solve: no branch meets the deadline");
  }

  const double local_cost = local_ok ? sol.local->cost_j : kUnbounded;
  const double offload_cost =
      sol.split ? sol.split->objective_j + params.upload_energy_j + in.device.tail_energy_j
                : kUnbounded;

  if (offload_ok && (!local_ok || offload_cost < local_cost)) {
    sol.branch = ExecutionBranch::offload;
    sol.objective_j = offload_cost;
    const SubsetSolution& split = *sol.split;
    sol.plan.local_fraction = split.local_fraction;
    for (std::size_t i = 0; i < sol.selected.size(); ++i) {
      sol.plan.allocations[sol.selected[i]] = split.allocations[i];
    }
    sol.plan.schedule = FrequencySchedule::uniform(params.total_cycles * split.local_fraction,
                                                   split.local_frequency_hz);
  } else {
    sol.branch = ExecutionBranch::local_only;
    sol.objective_j = local_cost;
    sol.plan.local_fraction = 1.0;
    sol.plan.schedule = FrequencySchedule::uniform(params.total_cycles, sol.local->frequency_hz);
  }
  sol.certified = sol.gates.ok;
  return sol;
}

}  // namespace offload
