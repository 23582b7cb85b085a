#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "fixtures.hpp"
#include "offload/evaluator.hpp"
#include "offload/format.hpp"
#include "offload/instance_io.hpp"
#include "offload/solver.hpp"

using namespace offload;
using Catch::Matchers::WithinRel;

namespace {
const char* kStudyInstance = R"({
  "task": {"L_bits": 409600, "tau_d_s": null, "gamma_A": 700},
  "device": {"f_max_hz": 2e9, "kappa": 1e-26, "P_tx_w": 0.5, "E_t_j": 0.15, "r_hp_bps": 2.5e6},
  "servers": [
    {"id": "edge-a", "r_bps": 1e9, "c_hz": 4e9},
    {"id": "edge-b", "r_bps": 5e8, "c_hz": 2e9}
  ],
  "alpha": 20, "m": 2
})";
}

TEST_CASE("instance documents parse field by field") {
  const Instance in = parse_instance(kStudyInstance);
  CHECK(in.task.data_bits == 409600);
  CHECK(in.task.deadline_s == kUnbounded);
  CHECK(in.task.cycles_per_bit == 700.0);
  CHECK(in.device.max_frequency_hz == 2e9);
  CHECK(in.device.switched_capacitance == 1e-26);
  REQUIRE(in.servers.size() == 2);
  CHECK(in.servers[0].id == "edge-a");
  CHECK(in.servers[1].link_rate_bps == 5e8);
  CHECK(in.delay_weight == 20.0);
  CHECK(in.server_cap == 2);
  CHECK(validate(in).empty());
}

TEST_CASE("a numeric deadline parses as a bound") {
  std::string text = kStudyInstance;
  text.replace(text.find("null"), 4, "0.25");
  CHECK(parse_instance(text).task.deadline_s == 0.25);
}

TEST_CASE("malformed or incomplete documents raise ParseError") {
  CHECK_THROWS_AS(parse_instance("{not json"), ParseError);
  CHECK_THROWS_AS(parse_instance("{\"task\": {}}"), ParseError);
  std::string text = kStudyInstance;
  text.replace(text.find("alpha"), 5, "alpha_oops");
  CHECK_THROWS_AS(parse_instance(text), ParseError);
}

TEST_CASE("instances round-trip through their JSON form") {
  const Instance in = parse_instance(kStudyInstance);
  const Instance back = parse_instance(instance_to_json(in));
  CHECK(back.task.data_bits == in.task.data_bits);
  CHECK(back.task.deadline_s == in.task.deadline_s);
  CHECK(back.device.switched_capacitance == in.device.switched_capacitance);
  REQUIRE(back.servers.size() == in.servers.size());
  for (std::size_t i = 0; i < in.servers.size(); ++i) {
    CHECK(back.servers[i].id == in.servers[i].id);
    CHECK(back.servers[i].link_rate_bps == in.servers[i].link_rate_bps);
    CHECK(back.servers[i].compute_rate_hz == in.servers[i].compute_rate_hz);
  }
  CHECK(back.delay_weight == in.delay_weight);
  CHECK(back.server_cap == in.server_cap);
}

TEST_CASE("plan documents parse against the instance's server ids") {
  const Instance in = parse_instance(kStudyInstance);
  const char* plan_text = R"({
    "x0": 0.5,
    "allocations": [{"id": "edge-b", "fraction": 0.5}],
    "schedule": [{"cycles": 1.4336e8, "frequency_hz": 1e9}]
  })";
  const OffloadPlan plan = parse_plan(plan_text, in);
  CHECK(plan.local_fraction == 0.5);
  REQUIRE(plan.allocations.size() == 1);
  CHECK(plan.allocations.at(1) == 0.5);
  REQUIRE(plan.schedule.segments.size() == 1);
  CHECK(evaluate(in, plan).feasible);

  CHECK_THROWS_AS(parse_plan(R"({"x0": 1.0, "allocations": [{"id": "nope", "fraction": 1}]})", in),
                  ParseError);
}

TEST_CASE("solution documents carry the contract fields") {
  const Instance in = parse_instance(kStudyInstance);
  const Solution sol = solve(in);
  const std::string json = solution_to_json(in, sol, evaluate(in, sol.plan));
  for (const char* key :
       {"\"branch\"", "\"x0\"", "\"allocations\"", "\"f_local_hz\"", "\"objective_j\"",
        "\"delay_s\"", "\"energy_j\"", "\"certified\"", "\"qbar_star\"", "\"qbar_max\"",
        "\"q_m\""}) {
    INFO(key);
    CHECK(json.find(key) != std::string::npos);
  }
  CHECK(json.find("\"branch\":\"offload\"") != std::string::npos);
  CHECK(json.find("edge-a") != std::string::npos);
  // unbounded gates serialize as null
  CHECK(json.find("\"qbar_star\":null") != std::string::npos);
}

TEST_CASE("numbers render locale-free at the contract precision") {
  CHECK(format_double(0.1, 17) == "0.10000000000000001");
  CHECK(format_double(1.0 / 3.0, 9) == "0.333333333");
  CHECK(format_double(2.5e6, 9) == "2500000");
  CHECK(format_double(1e-26, 17) == "1e-26");
  CHECK(format_double(-0.0001234567891234, 9) == "-0.000123456789");
  // 17 significant digits survive a parse round trip bit exactly
  const double value = 0.12345678901234567;
  CHECK(std::stod(format_double(value, 17)) == value);
}

TEST_CASE("json emission keeps full precision") {
  Instance in = parse_instance(kStudyInstance);
  in.device.tail_energy_j = 0.1 + 0.2; // 0.30000000000000004
  const Instance back = parse_instance(instance_to_json(in));
  CHECK(back.device.tail_energy_j == in.device.tail_energy_j);
}
