#pragma once

// Shared study-settings fixtures for the test suite.

#include <string>
#include <vector>

#include "offload/model.hpp"

namespace fixtures {

inline offload::TaskSpec study_task() {
  return {409600, offload::kUnbounded, 700.0};
}

inline offload::DeviceSpec study_device() {
  return {2e9, 1e-26, 0.5, 0.15, 2.5e6};
}

/// Instance with `n` identical servers whose unit delay works out to
/// 409600/rate + 700*409600/capacity.
inline offload::Instance uniform_fleet_instance(std::size_t n, double rate_bps,
                                                double capacity_hz, int cap,
                                                double alpha = 20.0) {
  offload::Instance in;
  in.task = study_task();
  in.device = study_device();
  in.delay_weight = alpha;
  in.server_cap = cap;
  for (std::size_t i = 0; i < n; ++i) {
    in.servers.push_back({"s" + std::to_string(i), rate_bps, capacity_hz});
  }
  return in;
}

}  // namespace fixtures
