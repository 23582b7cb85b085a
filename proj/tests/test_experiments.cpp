#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <string>

#include "offload/experiments.hpp"

using namespace offload;

namespace {
SweepConfig small_config() {
  SweepConfig config;
  config.vary = SweepParameter::delay_weight;
  config.values = {20.0};
  config.trials = 25;
  config.seed = 7;
  config.fleet.fleet_size = 30;
  return config;
}
}  // namespace

TEST_CASE("instance generation is deterministic and in range") {
  FleetDistribution fleet;
  StudyDefaults defaults;
  const Instance a = make_instance(fleet, defaults, 20.0, 5, 1);
  const Instance b = make_instance(fleet, defaults, 20.0, 5, 1);
  REQUIRE(a.servers.size() == 100);
  for (std::size_t i = 0; i < a.servers.size(); ++i) {
    CHECK(a.servers[i].link_rate_bps == b.servers[i].link_rate_bps);
    CHECK(a.servers[i].compute_rate_hz == b.servers[i].compute_rate_hz);
    CHECK(a.servers[i].link_rate_bps >= 1e8);
    CHECK(a.servers[i].link_rate_bps <= 1e9);
    CHECK(a.servers[i].compute_rate_hz >= 1e9);
    CHECK(a.servers[i].compute_rate_hz <= 4e9);
  }
  CHECK(validate(a).empty());
}

TEST_CASE("different seeds give different fleets") {
  FleetDistribution fleet;
  fleet.fleet_size = 3;
  StudyDefaults defaults;
  std::set<double> first_rates;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    first_rates.insert(make_instance(fleet, defaults, 20.0, 3, seed).servers[0].link_rate_bps);
  }
  CHECK(first_rates.size() == 1000);
}

TEST_CASE("the cap is clamped to the fleet size") {
  FleetDistribution fleet;
  fleet.fleet_size = 10;
  const Instance in = make_instance(fleet, StudyDefaults{}, 20.0, 200, 3);
  CHECK(in.server_cap == 10);
  CHECK(validate(in).empty());
}

TEST_CASE("a single-cell sweep yields one row per policy") {
  SweepConfig config = small_config();
  config.trials = 1;
  const SweepResult result = sweep(config);
  REQUIRE(result.rows.size() == 4);
  CHECK(result.rows[0].policy == PolicyKind::tos);
  CHECK(result.rows[0].normalized == 1.0);
  CHECK(result.rows[0].param_name == "alpha");
  for (const auto& row : result.rows) CHECK(std::isfinite(row.objective_j));
}

TEST_CASE("sweeps are reproducible bit for bit regardless of parallelism") {
  SweepConfig config = small_config();
  config.jobs = 1;
  const std::string serial = to_csv(sweep(config));
  config.jobs = 4;
  const std::string parallel = to_csv(sweep(config));
  CHECK(serial == parallel);
  CHECK(serial == to_csv(sweep(config)));
}

TEST_CASE("tos rows normalize to exactly one and dominate certified trials") {
  const SweepResult result = sweep(small_config());
  for (const auto& row : result.rows) {
    if (row.policy == PolicyKind::tos) {
      CHECK(row.normalized == 1.0);
    } else if (row.certified && std::isfinite(row.normalized)) {
      CHECK(row.normalized >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("csv schema is stable") {
  SweepConfig config = small_config();
  config.trials = 2;
  const std::string csv = to_csv(sweep(config));
  CHECK(csv.rfind("param_name,param_value,policy,trial,objective_j,delay_s,energy_j,"
                  "normalized,certified\n",
                  0) == 0);
  CHECK(csv.find("alpha,20,tos,0,") != std::string::npos);
  CHECK(csv.find("alpha,20,mixed,1,") != std::string::npos);
  // 8 data rows + header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("sweeping the cap produces m rows") {
  SweepConfig config = small_config();
  config.vary = SweepParameter::server_cap;
  config.values = {1.0, 5.0};
  config.trials = 3;
  const SweepResult result = sweep(config);
  REQUIRE(result.rows.size() == 24);
  CHECK(result.rows[0].param_name == "m");
  // canonical ordering: all rows of value 1 first
  for (std::size_t i = 0; i < 12; ++i) CHECK(result.rows[i].param_value == 1.0);
  for (std::size_t i = 12; i < 24; ++i) CHECK(result.rows[i].param_value == 5.0);
}

TEST_CASE("summaries aggregate per value and policy") {
  SweepConfig config = small_config();
  config.values = {10.0, 20.0};
  config.trials = 5;
  const auto rows = summarize(sweep(config));
  CHECK(rows.size() == 8);
  for (const auto& row : rows) {
    CHECK(row.samples == 5);
    if (row.policy == PolicyKind::tos) CHECK(row.mean_normalized == 1.0);
    else CHECK(row.mean_normalized >= 1.0 - 1e-9);
  }
}
