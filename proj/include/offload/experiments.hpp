#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "offload/evaluator.hpp"
#include "offload/format.hpp"
#include "offload/model.hpp"
#include "offload/policies.hpp"
#include "offload/random.hpp"
#include "offload/solver.hpp"

namespace offload {

/// Random fleet model of the comparative study: per-server link rates and
/// compute capacities drawn uniformly from fixed ranges.
struct FleetDistribution {
  std::size_t fleet_size = 100;
  double rate_low_bps = 1e8;
  double rate_high_bps = 1e9;
  double capacity_low_hz = 1e9;
  double capacity_high_hz = 4e9;
};

/// Task and device settings the study keeps fixed.
struct StudyDefaults {
  std::int64_t data_bits = 409600; // 50 KiB
  double cycles_per_bit = 700.0;
  double switched_capacitance = 1e-26;
  double max_frequency_hz = 2e9;
  double uplink_rate_bps = 2.5e6;
  double transmit_power_w = 0.5;
  double tail_energy_j = 0.15;
  double deadline_s = kUnbounded;
};

/// Deterministic instance generator.  The server cap is clamped to the
/// fleet size so every generated instance validates.
inline Instance make_instance(const FleetDistribution& fleet, const StudyDefaults& defaults,
                              double delay_weight, int server_cap, std::uint64_t seed) {
  Instance in;
  in.task = {defaults.data_bits, defaults.deadline_s, defaults.cycles_per_bit};
  in.device = {defaults.max_frequency_hz, defaults.switched_capacitance,
               defaults.transmit_power_w, defaults.tail_energy_j, defaults.uplink_rate_bps};
  in.delay_weight = delay_weight;
  in.server_cap = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(std::max(server_cap, 0)),
                            fleet.fleet_size));

  SplitMix64 rng(seed);
  in.servers.reserve(fleet.fleet_size);
  for (std::size_t i = 0; i < fleet.fleet_size; ++i) {
    ServerSpec s;
    s.id = "s" + std::to_string(i);
    s.link_rate_bps = rng.uniform(fleet.rate_low_bps, fleet.rate_high_bps);
    s.compute_rate_hz = rng.uniform(fleet.capacity_low_hz, fleet.capacity_high_hz);
    in.servers.push_back(std::move(s));
  }
  return in;
}

enum class SweepParameter { server_cap, delay_weight };

struct SweepConfig {
  SweepParameter vary = SweepParameter::delay_weight;
  std::vector<double> values;
  int trials = 100;
  std::uint64_t seed = 42;
  double fixed_delay_weight = 20.0;
  int fixed_server_cap = 5;
  FleetDistribution fleet;
  StudyDefaults defaults;
  int jobs = 0; // worker threads; 0 means hardware concurrency
};

struct SweepRow {
  std::string param_name; // "m" or "alpha"
  double param_value = 0.0;
  PolicyKind policy = PolicyKind::tos;
  int trial = 0;
  double objective_j = 0.0;
  double delay_s = 0.0;
  double energy_j = 0.0;  // device-side energy only
  double normalized = 0.0; // objective relative to the tos row of the same trial
  bool certified = false;  // the tos solution cleared both gates on this instance
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

namespace detail {

constexpr PolicyKind kSweepPolicies[] = {PolicyKind::tos, PolicyKind::local, PolicyKind::mec,
                                         PolicyKind::mixed};

inline void run_sweep_cell(const SweepConfig& config, std::size_t param_index, int trial,
                           SweepRow* out) {
  const bool vary_cap = config.vary == SweepParameter::server_cap;
  const double value = config.values[param_index];
  const double weight = vary_cap ? config.fixed_delay_weight : value;
  const int cap = vary_cap ? static_cast<int>(value) : config.fixed_server_cap;
  const std::uint64_t seed = mix_seed(config.seed, param_index, static_cast<std::uint64_t>(trial));
  const Instance in = make_instance(config.fleet, config.defaults, weight, cap, seed);

  bool certified = false;
  double tos_objective = std::numeric_limits<double>::quiet_NaN();
  OffloadPlan tos_plan;
  bool tos_ok = false;
  try {
    const Solution sol = solve(in);
    certified = sol.certified;
    tos_plan = sol.plan;
    tos_ok = true;
  } catch (const InfeasibleError&) {
    // recorded as nan rows below
  }

  for (std::size_t p = 0; p < 4; ++p) {
    SweepRow& row = out[p];
    row.param_name = vary_cap ? "m" : "alpha";
    row.param_value = value;
    row.policy = kSweepPolicies[p];
    row.trial = trial;
    row.certified = certified;
    row.objective_j = row.delay_s = row.energy_j = row.normalized =
        std::numeric_limits<double>::quiet_NaN();
    try {
      const OffloadPlan plan = (row.policy == PolicyKind::tos && tos_ok)
                                   ? tos_plan
                                   : run_policy(row.policy, in);
      const CostBreakdown bd = evaluate(in, plan);
      row.objective_j = bd.objective_j;
      row.delay_s = bd.overall_delay_s;
      row.energy_j = bd.local_energy_j + bd.upload_energy_j;
      if (row.policy == PolicyKind::tos) tos_objective = bd.objective_j;
      row.normalized = row.objective_j / tos_objective;
    } catch (const std::exception&) {
      // policy cannot run on this instance (deadline, empty fleet); row stays nan
    }
  }
}

}  // namespace detail

/// Runs every policy over every (parameter value, trial) cell.  Rows come
/// back in canonical order (parameter, trial, policy) regardless of how many
/// worker threads execute the cells, so output is reproducible bit for bit.
inline SweepResult sweep(const SweepConfig& config) {
  const std::size_t cells = config.values.size() * static_cast<std::size_t>(config.trials);
  SweepResult result;
  result.rows.resize(cells * 4);

  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs) : hardware;

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t cell = next.fetch_add(1); cell < cells; cell = next.fetch_add(1)) {
      const std::size_t param_index = cell / static_cast<std::size_t>(config.trials);
      const int trial = static_cast<int>(cell % static_cast<std::size_t>(config.trials));
      detail::run_sweep_cell(config, param_index, trial, &result.rows[cell * 4]);
    }
  };

  if (jobs <= 1 || cells <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < std::min<std::size_t>(jobs, cells); ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

inline constexpr const char* kSweepCsvHeader =
    "param_name,param_value,policy,trial,objective_j,delay_s,energy_j,normalized,certified";

/// Renders the canonical CSV (9 significant digits, '.' decimal point).
inline std::string to_csv(const SweepResult& result) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const SweepRow& row : result.rows) {
    out += row.param_name;
    out += ',';
    out += format_double(row.param_value, 9);
    out += ',';
    out += to_string(row.policy);
    out += ',';
    out += std::to_string(row.trial);
    out += ',';
    out += format_double(row.objective_j, 9);
    out += ',';
    out += format_double(row.delay_s, 9);
    out += ',';
    out += format_double(row.energy_j, 9);
    out += ',';
    out += format_double(row.normalized, 9);
    out += ',';
    out += row.certified ? '1' : '0';
    out += '\n';
  }
  return out;
}

/// Per (parameter value, policy) means, for quick study summaries.
struct SweepSummaryRow {
  double param_value = 0.0;
  PolicyKind policy = PolicyKind::tos;
  double mean_objective_j = 0.0;
  double mean_delay_s = 0.0;
  double mean_energy_j = 0.0;
  double mean_normalized = 0.0;
  int samples = 0;
};

inline std::vector<SweepSummaryRow> summarize(const SweepResult& result) {
  std::map<std::pair<double, int>, SweepSummaryRow> acc;
  for (const SweepRow& row : result.rows) {
    if (std::isnan(row.objective_j)) continue;
    auto& s = acc[{row.param_value, static_cast<int>(row.policy)}];
    s.param_value = row.param_value;
    s.policy = row.policy;
    s.mean_objective_j += row.objective_j;
    s.mean_delay_s += row.delay_s;
    s.mean_energy_j += row.energy_j;
    s.mean_normalized += row.normalized;
    ++s.samples;
  }
  std::vector<SweepSummaryRow> rows;
  rows.reserve(acc.size());
  for (auto& [key, s] : acc) {
    s.mean_objective_j /= s.samples;
    s.mean_delay_s /= s.samples;
    s.mean_energy_j /= s.samples;
    s.mean_normalized /= s.samples;
    rows.push_back(s);
  }
  return rows;
}

}  // namespace offload
