#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

namespace offload {

/// Sentinel for "no deadline": comparisons against it behave naturally.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// A divisible computation task.
struct TaskSpec {
  std::int64_t data_bits = 0;     // input size in bits
  double deadline_s = kUnbounded; // completion deadline, kUnbounded if none
  double cycles_per_bit = 0.0;    // CPU cycles needed per input bit
};

/// The mobile device executing and/or uploading the task.
struct DeviceSpec {
  double max_frequency_hz = 0.0;      // CPU frequency cap
  double switched_capacitance = 0.0;  // per-cycle energy is this times f^2 (J*s^2/cycle^3)
  double transmit_power_w = 0.0;      // radio power while uploading
  double tail_energy_j = 0.0;         // fixed radio cost charged once if anything is uploaded
  double uplink_rate_bps = 0.0;       // device -> access point rate
};

/// One edge server reachable through the access point.
struct ServerSpec {
  std::string id;
  double link_rate_bps = 0.0;   // access point -> server rate
  double compute_rate_hz = 0.0; // server CPU cycles per second
};

/// A complete problem: task, device, fleet, delay weight, and the cap on
/// how many servers may share one task.
struct Instance {
  TaskSpec task;
  DeviceSpec device;
  std::vector<ServerSpec> servers;
  double delay_weight = 0.0; // objective weight on overall delay (J/s)
  int server_cap = 0;        // at most this many servers per task
};

/// Constants every solver formula is written in terms of.  All are fixed by
/// the instance; recomputing them is cheap and deterministic.
struct DerivedParams {
  double total_cycles = 0.0;       // cycles to process the whole task
  double energy_coeff = 0.0;       // switched_capacitance * total_cycles^3 (J*s^2)
  double upload_energy_j = 0.0;    // radio energy to upload the whole task
  double upload_delay_s = 0.0;     // time to upload the whole task to the AP
  std::vector<double> unit_delay_s; // per server: transfer + processing time for the whole task
};

enum class ValidationCode {
  non_positive_field,
  duplicate_server_id,
  cap_exceeds_fleet,
  empty_fleet_with_offload_required,
};

struct ValidationError {
  ValidationCode code;
  std::string message;
};

/// Checks every structural constraint and returns the complete list of
/// violations; an empty list means the instance is usable.
inline std::vector<ValidationError> validate(const Instance& in) {
  std::vector<ValidationError> errors;
  auto positive = [&errors](double v, const char* name) {
    if (!(v > 0.0)) {
      errors.push_back({ValidationCode::non_positive_field,
                        std::string(name) + " must be positive"});
    }
  };

  if (in.task.data_bits < 1) {
    errors.push_back({ValidationCode::non_positive_field, "task.data_bits must be >= 1"});
  }
  positive(in.task.cycles_per_bit, "task.cycles_per_bit");
  positive(in.task.deadline_s, "task.deadline_s");
  positive(in.device.max_frequency_hz, "device.max_frequency_hz");
  positive(in.device.switched_capacitance, "device.switched_capacitance");
  positive(in.device.transmit_power_w, "device.transmit_power_w");
  positive(in.device.tail_energy_j, "device.tail_energy_j");
  positive(in.device.uplink_rate_bps, "device.uplink_rate_bps");
  positive(in.delay_weight, "delay_weight");

  std::unordered_set<std::string> seen;
  seen.reserve(in.servers.size());
  for (const ServerSpec& s : in.servers) {
    positive(s.link_rate_bps, ("server " + s.id + " link_rate_bps").c_str());
    positive(s.compute_rate_hz, ("server " + s.id + " compute_rate_hz").c_str());
    if (!seen.insert(s.id).second) {
      errors.push_back({ValidationCode::duplicate_server_id,
                        "duplicate server id \"" + s.id + "\""});
    }
  }

  if (in.servers.empty()) {
    if (in.server_cap > 0) {
      errors.push_back({ValidationCode::empty_fleet_with_offload_required,
                        "server_cap > 0 but the fleet is empty"});
    }
  } else {
    if (in.server_cap < 1) {
      errors.push_back({ValidationCode::non_positive_field,
                        "server_cap must be >= 1 when servers are present"});
    } else if (static_cast<std::size_t>(in.server_cap) > in.servers.size()) {
      errors.push_back({ValidationCode::cap_exceeds_fleet,
                        "server_cap exceeds the number of servers"});
    }
  }
  return errors;
}

/// Derives the solver constants from a validated instance.  Pure: identical
/// inputs give bit-identical outputs.
inline DerivedParams derive_params(const Instance& in) {
  DerivedParams p;
  const double bits = static_cast<double>(in.task.data_bits);
  p.total_cycles = in.task.cycles_per_bit * bits;
  p.energy_coeff =
      in.device.switched_capacitance * p.total_cycles * p.total_cycles * p.total_cycles;
  p.upload_energy_j = in.device.transmit_power_w * bits / in.device.uplink_rate_bps;
  p.upload_delay_s = bits / in.device.uplink_rate_bps;
  p.unit_delay_s.reserve(in.servers.size());
  for (const ServerSpec& s : in.servers) {
    p.unit_delay_s.push_back(bits / s.link_rate_bps +
                             in.task.cycles_per_bit * bits / s.compute_rate_hz);
  }
  return p;
}

}  // namespace offload
