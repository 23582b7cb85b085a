#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>

#include "offload/model.hpp"
#include "offload/selection.hpp"
#include "offload/solver.hpp"

namespace offload {

/// The four scheduling policies of the comparative study.
enum class PolicyKind { tos, local, mec, mixed };

inline const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::tos: return "tos";
    case PolicyKind::local: return "local";
    case PolicyKind::mec: return "mec";
    case PolicyKind::mixed: return "mixed";
  }
  return "?";
}

/// Everything on the device, frequency scheduled optimally (raised when the
/// deadline demands it).
inline OffloadPlan policy_local(const Instance& in) {
  const DerivedParams params = derive_params(in);
  const auto local = solve_local(params, in.device, in.delay_weight, in.task.deadline_s);
  if (!local) throw InfeasibleError("policy_local: deadline unreachable at max frequency");
  OffloadPlan plan;
  plan.local_fraction = 1.0;
  plan.schedule = FrequencySchedule::uniform(params.total_cycles, local->frequency_hz);
  return plan;
}

/// Everything offloaded to the fastest-path servers, shares equalizing the
/// per-server chain delays.
inline OffloadPlan policy_mec(const Instance& in) {
  if (in.servers.empty() || in.server_cap < 1) {
    throw std::invalid_argument("policy_mec: no servers to offload to");
  }
  const DerivedParams params = derive_params(in);
  const ServerRanking ranking = rank_servers(params.unit_delay_s);
  const std::size_t take =
      std::min<std::size_t>(static_cast<std::size_t>(in.server_cap), in.servers.size());
  const auto subset = std::span<const double>(ranking.sorted_delay_s).first(take);
  const SubsetAggregates agg = subset_aggregates(params.upload_delay_s, subset);

  OffloadPlan plan;
  plan.local_fraction = 0.0;
  for (std::size_t i = 0; i < take; ++i) {
    plan.allocations[ranking.order[i]] = 1.0 / (agg.inv_delay_sum * subset[i]);
  }
  return plan;
}

/// Fixed split 1/(1+cap) on the device, the rest equalized over the fastest
/// servers.  The device frequency is set so local compute finishes with the
/// slowest chain, capped at the device maximum.  (The study defines this
/// policy only by its split; the delay-balanced frequency is this
/// implementation's completion of it, which the reports call out.)
inline OffloadPlan policy_mixed(const Instance& in) {
  if (in.servers.empty() || in.server_cap < 1) {
    throw std::invalid_argument("policy_mixed: no servers to offload to");
  }
  const DerivedParams params = derive_params(in);
  const ServerRanking ranking = rank_servers(params.unit_delay_s);
  const std::size_t take =
      std::min<std::size_t>(static_cast<std::size_t>(in.server_cap), in.servers.size());
  const auto subset = std::span<const double>(ranking.sorted_delay_s).first(take);
  const SubsetAggregates agg = subset_aggregates(params.upload_delay_s, subset);

  OffloadPlan plan;
  plan.local_fraction = 1.0 / (1.0 + static_cast<double>(in.server_cap));
  const double offloaded = 1.0 - plan.local_fraction;
  for (std::size_t i = 0; i < take; ++i) {
    plan.allocations[ranking.order[i]] = offloaded / (agg.inv_delay_sum * subset[i]);
  }
  const double chain_delay = offloaded * agg.effective_delay_s;
  const double cycles = params.total_cycles * plan.local_fraction;
  const double f = std::min(cycles / chain_delay, in.device.max_frequency_hz);
  plan.schedule = FrequencySchedule::uniform(cycles, f);
  return plan;
}

/// The full optimizing scheduler.
inline OffloadPlan policy_tos(const Instance& in) { return solve(in).plan; }

inline OffloadPlan run_policy(PolicyKind kind, const Instance& in) {
  switch (kind) {
    case PolicyKind::tos: return policy_tos(in);
    case PolicyKind::local: return policy_local(in);
    case PolicyKind::mec: return policy_mec(in);
    case PolicyKind::mixed: return policy_mixed(in);
  }
  throw std::logic_error("run_policy: unknown policy");
}

}  // namespace offload
