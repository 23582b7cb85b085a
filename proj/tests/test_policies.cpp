#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "offload/evaluator.hpp"
#include "offload/experiments.hpp"
#include "offload/policies.hpp"
#include "offload/solver.hpp"

using namespace offload;
using Catch::Matchers::WithinRel;

TEST_CASE("policy_local matches the local-only optimum") {
  const Instance in = fixtures::uniform_fleet_instance(5, 1e9, 4e9, 5);
  const OffloadPlan plan = policy_local(in);
  CHECK(plan.local_fraction == 1.0);
  CHECK_THAT(evaluate(in, plan).objective_j, WithinRel(8.6016, 1e-9));
}

TEST_CASE("policy_local raises frequency under a deadline and rejects impossible ones") {
  Instance in = fixtures::uniform_fleet_instance(1, 1e9, 4e9, 1);
  in.task.deadline_s = 0.2;
  const OffloadPlan plan = policy_local(in);
  REQUIRE(plan.schedule.segments.size() == 1);
  CHECK_THAT(plan.schedule.segments[0].frequency_hz, WithinRel(1.4336e9, 1e-12));
  CHECK(evaluate(in, plan).feasible);

  in.task.deadline_s = 0.1;
  CHECK_THROWS_AS(policy_local(in), InfeasibleError);
}

TEST_CASE("policy_mec offloads everything to equalized chains") {
  const Instance in = fixtures::uniform_fleet_instance(5, 1e9, 4e9, 5);
  const OffloadPlan plan = policy_mec(in);
  CHECK(plan.local_fraction == 0.0);
  CHECK(plan.schedule.segments.empty());
  CHECK(plan.allocations.size() == 5);

  const CostBreakdown bd = evaluate(in, plan);
  // objective = upload energy + tail + weight * effective delay of the subset
  CHECK_THAT(bd.objective_j, WithinRel(0.08192 + 0.15 + 20.0 * 0.17825792, 1e-9));
  for (const auto& row : bd.servers) {
    CHECK_THAT(row.total_delay_s, WithinRel(bd.max_server_delay_s, 1e-9));
  }
}

TEST_CASE("policy_mec with a single server sends it everything") {
  const Instance in = fixtures::uniform_fleet_instance(1, 1e9, 4e9, 1);
  const OffloadPlan plan = policy_mec(in);
  REQUIRE(plan.allocations.size() == 1);
  CHECK_THAT(plan.allocations.at(0), WithinRel(1.0, 1e-12));
}

TEST_CASE("policy_mixed keeps 1/(1+cap) locally and balances the rest") {
  const Instance in = fixtures::uniform_fleet_instance(5, 1e9, 4e9, 5);
  const OffloadPlan plan = policy_mixed(in);
  CHECK_THAT(plan.local_fraction, WithinRel(1.0 / 6.0, 1e-12));

  const CostBreakdown bd = evaluate(in, plan);
  CHECK_THAT(bd.local_delay_s, WithinRel(bd.max_server_delay_s, 1e-9)); // delay-balanced frequency
  for (const auto& row : bd.servers) {
    CHECK_THAT(row.total_delay_s, WithinRel(bd.max_server_delay_s, 1e-9));
  }
}

TEST_CASE("policy_mixed with one server splits evenly") {
  const Instance in = fixtures::uniform_fleet_instance(1, 1e9, 4e9, 1);
  const OffloadPlan plan = policy_mixed(in);
  CHECK_THAT(plan.local_fraction, WithinRel(0.5, 1e-12));
  CHECK_THAT(plan.allocations.at(0), WithinRel(0.5, 1e-12));
}

TEST_CASE("policy_mixed caps the frequency when chains are very fast") {
  Instance in = fixtures::uniform_fleet_instance(5, 5e10, 2e11, 5);
  in.device.uplink_rate_bps = 2.5e9; // everything fast: tiny chain delay
  const OffloadPlan plan = policy_mixed(in);
  REQUIRE(plan.schedule.segments.size() == 1);
  CHECK(plan.schedule.segments[0].frequency_hz == in.device.max_frequency_hz);
  const CostBreakdown bd = evaluate(in, plan);
  CHECK(bd.local_delay_s > bd.max_server_delay_s); // cap engaged, device is the straggler
}

TEST_CASE("policy_tos delegates to the scheduler") {
  const Instance in = fixtures::uniform_fleet_instance(5, 1e9, 4e9, 5);
  const OffloadPlan plan = policy_tos(in);
  const Solution sol = solve(in);
  CHECK(plan.local_fraction == sol.plan.local_fraction);
  CHECK(plan.allocations == sol.plan.allocations);
}

TEST_CASE("every policy's claimed cost is what evaluate reports") {
  const Instance in = fixtures::uniform_fleet_instance(5, 1e9, 4e9, 5);
  const Solution sol = solve(in);
  CHECK_THAT(evaluate(in, sol.plan).objective_j, WithinRel(sol.objective_j, 1e-6));

  const auto local = solve_local(derive_params(in), in.device, in.delay_weight, kUnbounded);
  CHECK_THAT(evaluate(in, policy_local(in)).objective_j, WithinRel(local->cost_j, 1e-6));
}

TEST_CASE("the scheduler dominates every policy on certified instances") {
  StudyDefaults defaults;
  FleetDistribution fleet;
  fleet.fleet_size = 40;
  int certified = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Instance in = make_instance(fleet, defaults, 5.0 + trial, 1 + trial % 8,
                                      1000 + static_cast<std::uint64_t>(trial));
    const Solution sol = solve(in);
    if (!sol.certified) continue;
    ++certified;
    const double best = evaluate(in, sol.plan).objective_j;
    for (PolicyKind kind : {PolicyKind::local, PolicyKind::mec, PolicyKind::mixed}) {
      const double other = evaluate(in, run_policy(kind, in)).objective_j;
      CHECK(best <= other * (1.0 + 1e-9));
    }
  }
  CHECK(certified > 0);
}
