#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "offload/model.hpp"

namespace offload {

/// Piecewise-constant compression of the per-cycle frequency choice: the
/// device runs `cycles` CPU cycles at `frequency_hz`, segment by segment.
struct FrequencySegment {
  double cycles = 0.0;
  double frequency_hz = 0.0;
};

struct FrequencySchedule {
  std::vector<FrequencySegment> segments;

  double total_cycles() const {
    double sum = 0.0;
    for (const auto& s : segments) sum += s.cycles;
    return sum;
  }
  double delay_s() const {
    double sum = 0.0;
    for (const auto& s : segments) sum += s.cycles / s.frequency_hz;
    return sum;
  }
  double energy_j(double switched_capacitance) const {
    double sum = 0.0;
    for (const auto& s : segments) sum += s.cycles * s.frequency_hz * s.frequency_hz;
    return switched_capacitance * sum;
  }

  static FrequencySchedule uniform(double cycles, double frequency_hz) {
    FrequencySchedule sched;
    if (cycles > 0.0) sched.segments.push_back({cycles, frequency_hz});
    return sched;
  }
};

/// The decision variables: how much of the task stays local, how the rest is
/// split across servers, and how fast the device runs its share.
struct OffloadPlan {
  double local_fraction = 1.0;
  std::map<std::size_t, double> allocations; // server index -> fraction
  FrequencySchedule schedule;
};

/// Every delay and energy term of the cost model, plus the weighted
/// objective and feasibility flags.
struct CostBreakdown {
  double local_energy_j = 0.0;  // DVFS energy of the local share
  double upload_energy_j = 0.0; // radio energy incl. tail energy when anything is uploaded
  double local_delay_s = 0.0;   // device compute time
  double upload_delay_s = 0.0;  // device -> AP transmission time

  struct ServerCost {
    std::size_t index = 0;
    double transfer_delay_s = 0.0; // AP -> server transmission
    double compute_delay_s = 0.0;  // processing on the server
    double total_delay_s = 0.0;    // upload + transfer + compute
  };
  std::vector<ServerCost> servers; // one row per server with a positive share

  double max_server_delay_s = 0.0; // slowest server chain, 0 if nothing offloaded
  double overall_delay_s = 0.0;    // max(local compute, slowest server chain)
  double objective_j = 0.0;        // energy + delay_weight * overall delay
  bool feasible = true;
  std::vector<std::string> violations;
};

/// Cost accounting for an arbitrary plan.  This is the single source of
/// truth every policy and the brute-force oracle are measured against.
///
/// Throws std::invalid_argument when the plan is structurally broken
/// (fractions not summing to one, unknown server index, schedule cycles not
/// matching the local share).  Constraint violations that keep the plan
/// well-formed (deadline, frequency cap, server cap) are reported through
/// `feasible` and `violations` instead.
inline CostBreakdown evaluate(const Instance& in, const OffloadPlan& plan) {
  const double bits = static_cast<double>(in.task.data_bits);
  const double total_cycles = in.task.cycles_per_bit * bits;

  double fraction_sum = plan.local_fraction;
  for (const auto& [index, fraction] : plan.allocations) {
    if (index >= in.servers.size()) {
      throw std::invalid_argument("evaluate: allocation references unknown server index " +
                                  std::to_string(index));
    }
    if (fraction < -1e-12) {
      throw std::invalid_argument("evaluate: negative allocation fraction");
    }
    fraction_sum += fraction;
  }
  if (plan.local_fraction < -1e-12 || std::abs(fraction_sum - 1.0) > 1e-6) {
    throw std::invalid_argument("evaluate: plan fractions sum to " +
                                std::to_string(fraction_sum) + ", expected 1");
  }
  const double local_cycles = total_cycles * plan.local_fraction;
  const double scheduled = plan.schedule.total_cycles();
  if (std::abs(scheduled - local_cycles) > 1e-6 * std::max(1.0, local_cycles)) {
    throw std::invalid_argument("evaluate: schedule covers " + std::to_string(scheduled) +
                                " cycles, local share needs " + std::to_string(local_cycles));
  }

  CostBreakdown bd;
  bd.local_energy_j = plan.schedule.energy_j(in.device.switched_capacitance);
  bd.local_delay_s = plan.schedule.delay_s();

  const double uploaded = 1.0 - plan.local_fraction;
  bd.upload_delay_s = uploaded * bits / in.device.uplink_rate_bps;
  bd.upload_energy_j = in.device.transmit_power_w * bd.upload_delay_s;
  // Tail energy is charged once iff any bits leave the device.
  if (plan.local_fraction < 1.0 - 1e-12) {
    bd.upload_energy_j += in.device.tail_energy_j;
  }

  std::size_t used_servers = 0;
  for (const auto& [index, fraction] : plan.allocations) {
    if (fraction <= 0.0) continue;
    ++used_servers;
    const ServerSpec& s = in.servers[index];
    CostBreakdown::ServerCost row;
    row.index = index;
    row.transfer_delay_s = fraction * bits / s.link_rate_bps;
    row.compute_delay_s = in.task.cycles_per_bit * fraction * bits / s.compute_rate_hz;
    row.total_delay_s = bd.upload_delay_s + row.transfer_delay_s + row.compute_delay_s;
    bd.max_server_delay_s = std::max(bd.max_server_delay_s, row.total_delay_s);
    bd.servers.push_back(row);
  }

  bd.overall_delay_s = std::max(bd.local_delay_s, bd.max_server_delay_s);
  bd.objective_j = bd.local_energy_j + bd.upload_energy_j + in.delay_weight * bd.overall_delay_s;

  const double tol = 1e-9;
  if (bd.overall_delay_s > in.task.deadline_s * (1.0 + tol)) {
    bd.violations.push_back("overall delay exceeds the deadline");
  }
  if (used_servers > static_cast<std::size_t>(std::max(in.server_cap, 0))) {
    bd.violations.push_back("more servers used than the cap allows");
  }
  for (const auto& seg : plan.schedule.segments) {
    if (seg.frequency_hz > in.device.max_frequency_hz * (1.0 + tol) || seg.frequency_hz <= 0.0) {
      bd.violations.push_back("schedule frequency outside (0, max_frequency]");
      break;
    }
  }
  bd.feasible = bd.violations.empty();
  return bd;
}

}  // namespace offload
