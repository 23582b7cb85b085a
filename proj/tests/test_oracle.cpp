#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "fixtures.hpp"
#include "offload/oracle.hpp"
#include "offload/solver.hpp"
#include "offload/verification.hpp"

using namespace offload;
using Catch::Matchers::WithinRel;

namespace {
const GridSpec coarse{1e-2, 1e-2, 1e-2};
}

TEST_CASE("grid search brackets the closed form on one server") {
  const Instance in = fixtures::uniform_fleet_instance(1, 1e9, 4e9, 1);
  const DerivedParams p = derive_params(in);
  const SubsetSolution split = solve_subset(p, p.unit_delay_s, in.delay_weight);
  const std::vector<std::size_t> subset{0};
  const GridSearchResult scanned = grid_search_split(in, subset, coarse);

  // the grid can only sit above the true optimum
  CHECK(split.objective_j <= scanned.objective_j + 1e-9 * std::abs(split.objective_j));
  CHECK_THAT(scanned.objective_j, WithinRel(split.objective_j, 0.05));
}

TEST_CASE("grid search brackets the closed form on two servers") {
  Instance in = fixtures::uniform_fleet_instance(2, 1e9, 4e9, 2);
  in.servers[1].link_rate_bps = 3e8;
  in.servers[1].compute_rate_hz = 1.5e9;
  const DerivedParams p = derive_params(in);
  const SubsetSolution split = solve_subset(p, p.unit_delay_s, in.delay_weight);
  const std::vector<std::size_t> subset{0, 1};
  const GridSearchResult scanned = grid_search_split(in, subset, GridSpec{5e-3, 5e-3, 5e-3});

  CHECK(split.objective_j <= scanned.objective_j + 1e-9 * std::abs(split.objective_j));
  CHECK_THAT(scanned.objective_j, WithinRel(split.objective_j, 0.02));
}

TEST_CASE("grid search is deterministic") {
  const Instance in = fixtures::uniform_fleet_instance(2, 8e8, 3e9, 2);
  const std::vector<std::size_t> subset{0, 1};
  const GridSearchResult a = grid_search_split(in, subset, coarse);
  const GridSearchResult b = grid_search_split(in, subset, coarse);
  CHECK(a.objective_j == b.objective_j);
  CHECK(a.plan.local_fraction == b.plan.local_fraction);
  CHECK(a.plan.allocations == b.plan.allocations);
}

TEST_CASE("a hopeless server pushes the grid optimum toward local execution") {
  Instance in = fixtures::uniform_fleet_instance(1, 1e3, 1e6, 1); // crawling server
  const std::vector<std::size_t> subset{0};
  const GridSearchResult scanned = grid_search_split(in, subset, coarse);
  CHECK(scanned.plan.local_fraction > 0.95);
}

TEST_CASE("grid search validates its inputs") {
  const Instance in = fixtures::uniform_fleet_instance(4, 1e9, 4e9, 4);
  const std::vector<std::size_t> too_many{0, 1, 2, 3};
  CHECK_THROWS_AS(grid_search_split(in, too_many, coarse), std::invalid_argument);
  const std::vector<std::size_t> subset{0};
  CHECK_THROWS_AS(grid_search_split(in, subset, GridSpec{0.5, 1e-2, 1e-2}),
                  std::invalid_argument);
}

TEST_CASE("exhaustive subset search returns the fastest prefix") {
  Instance in = fixtures::uniform_fleet_instance(6, 1e9, 4e9, 3);
  in.servers[1].link_rate_bps = 2e8;
  in.servers[3].compute_rate_hz = 1e9;
  in.servers[5].link_rate_bps = 9e9;
  const auto chosen = best_subset_bruteforce(in);
  REQUIRE(chosen.size() == 3);

  const DerivedParams p = derive_params(in);
  const ServerRanking ranking = rank_servers(p.unit_delay_s);
  std::vector<double> q;
  for (std::size_t idx : chosen) q.push_back(p.unit_delay_s[idx]);
  const double brute = solve_subset(p, q, in.delay_weight).objective_j;
  const double prefix =
      solve_subset(p, std::span<const double>(ranking.sorted_delay_s).first(3), in.delay_weight)
          .objective_j;
  CHECK_THAT(brute, WithinRel(prefix, 1e-9));
}

TEST_CASE("when the cap equals the fleet the whole fleet wins") {
  const Instance in = fixtures::uniform_fleet_instance(4, 8e8, 2e9, 4);
  CHECK(best_subset_bruteforce(in) == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("identical servers make every full-size subset equivalent") {
  const Instance in = fixtures::uniform_fleet_instance(5, 1e9, 4e9, 2);
  const auto chosen = best_subset_bruteforce(in);
  REQUIRE(chosen.size() == 2);
  const DerivedParams p = derive_params(in);
  std::vector<double> q{p.unit_delay_s[chosen[0]], p.unit_delay_s[chosen[1]]};
  const double value = solve_subset(p, q, in.delay_weight).objective_j;
  const std::vector<double> first_two{p.unit_delay_s[0], p.unit_delay_s[1]};
  CHECK_THAT(value, WithinRel(solve_subset(p, first_two, in.delay_weight).objective_j, 1e-12));
}

TEST_CASE("oversized fleets are rejected") {
  const Instance in = fixtures::uniform_fleet_instance(13, 1e9, 4e9, 3);
  CHECK_THROWS_AS(best_subset_bruteforce(in), std::invalid_argument);
}

TEST_CASE("uniform schedules achieve the energy bound exactly") {
  FrequencySchedule uniform = FrequencySchedule::uniform(2.8672e8, 1e9);
  const double bound = 1e-26 * 2.8672e8 * 2.8672e8 * 2.8672e8 / (0.28672 * 0.28672);
  CHECK_THAT(uniform.energy_j(1e-26), WithinRel(bound, 1e-12));
}

TEST_CASE("perturbed schedules strictly exceed the energy bound") {
  const double cycles = 2.8672e8, delay = 0.28672;
  FrequencySchedule sched;
  // same cycles, same total delay, two different frequencies
  sched.segments = {{cycles * 0.5, cycles * 0.5 / (delay * 0.3)},
                    {cycles * 0.5, cycles * 0.5 / (delay * 0.7)}};
  const double bound = 1e-26 * cycles * cycles * cycles / (delay * delay);
  CHECK(sched.energy_j(1e-26) > bound * 1.05);
}

TEST_CASE("a thousand random schedules respect the bound") {
  CHECK(jensen_check(2.8672e8, 0.28672, 1e-26, 1000, 42));
}

TEST_CASE("the oracle has teeth: a corrupted closed-form value is rejected") {
  const Instance in = fixtures::uniform_fleet_instance(1, 1e9, 4e9, 1);
  const DerivedParams p = derive_params(in);
  const std::vector<std::size_t> subset{0};
  const GridSearchResult scanned = grid_search_split(in, subset, coarse);
  const double true_value = solve_subset(p, p.unit_delay_s, in.delay_weight).objective_j;

  CHECK(std::abs(scanned.objective_j - true_value) <= 0.05 * true_value);
  for (double corruption : {0.90, 1.10}) {
    const double corrupted = true_value * corruption;
    CHECK(std::abs(scanned.objective_j - corrupted) > 0.05 * corrupted);
  }
}

TEST_CASE("verification wrappers for the oracle pass at quick settings") {
  CHECK(check_grid_oracle(3, coarse, 0.05, 21).pass);
  CHECK(check_subset_selection(6, 22, 1e-9).pass);
  CHECK(check_jensen(100, 23).pass);
}
