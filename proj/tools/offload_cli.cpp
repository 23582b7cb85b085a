// Command-line front door: solve single instances, price explicit plans,
// run policy sweeps, and run the verification suite.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "offload/offload.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw offload::ParseError("cannot open " + path);
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("OFFLOAD_OPT_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 42;
}

int report_validation(const std::vector<offload::ValidationError>& errors) {
  for (const auto& e : errors) std::cerr << "invalid instance: " << e.message << "\n";
  return 1;
}

struct InlineInstance {
  std::int64_t data_bits = 409600;
  double deadline_s = -1.0; // negative means unbounded
  double cycles_per_bit = 700.0;
  double max_frequency_hz = 2e9;
  double kappa = 1e-26;
  double transmit_power_w = 0.5;
  double tail_energy_j = 0.15;
  double uplink_rate_bps = 2.5e6;
  double alpha = 20.0;
  int cap = 5;
  std::vector<std::string> servers; // "id:rate_bps:capacity_hz"
};

offload::Instance build_inline(const InlineInstance& spec) {
  offload::Instance in;
  in.task = {spec.data_bits, spec.deadline_s > 0.0 ? spec.deadline_s : offload::kUnbounded,
             spec.cycles_per_bit};
  in.device = {spec.max_frequency_hz, spec.kappa, spec.transmit_power_w, spec.tail_energy_j,
               spec.uplink_rate_bps};
  in.delay_weight = spec.alpha;
  in.server_cap = spec.cap;
  for (const std::string& text : spec.servers) {
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos) {
      throw offload::ParseError("--server expects id:rate_bps:capacity_hz, got " + text);
    }
    offload::ServerSpec s;
    s.id = text.substr(0, first);
    s.link_rate_bps = std::stod(text.substr(first + 1, second - first - 1));
    s.compute_rate_hz = std::stod(text.substr(second + 1));
    in.servers.push_back(std::move(s));
  }
  return in;
}

int run_solve(const offload::Instance& in) {
  const auto errors = offload::validate(in);
  if (!errors.empty()) return report_validation(errors);
  try {
    const offload::Solution sol = offload::solve(in);
    const offload::CostBreakdown bd = offload::evaluate(in, sol.plan);
    std::cout << offload::solution_to_json(in, sol, bd) << "\n";
    return 0;
  } catch (const offload::InfeasibleError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

int run_evaluate(const std::string& instance_path, const std::string& plan_path) {
  const offload::Instance in = offload::parse_instance(read_file(instance_path));
  const auto errors = offload::validate(in);
  if (!errors.empty()) return report_validation(errors);
  const offload::OffloadPlan plan = offload::parse_plan(read_file(plan_path), in);
  const offload::CostBreakdown bd = offload::evaluate(in, plan);
  std::cout << offload::breakdown_to_json(in, bd) << "\n";
  return 0;
}

int run_sweep(const offload::SweepConfig& config, const std::string& out_path) {
  if (config.values.empty()) {
    std::cerr << "sweep: --values must list at least one parameter value\n";
    return 1;
  }
  for (double v : config.values) {
    if (!(v > 0.0)) {
      std::cerr << "sweep: parameter values must be positive\n";
      return 1;
    }
  }
  const offload::SweepResult result = offload::sweep(config);
  const std::string csv = offload::to_csv(result);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "sweep: cannot write " << out_path << "\n";
    return 1;
  }
  out << csv;

  std::cout << "mean normalized objective (relative to tos)\n";
  const char* name = config.vary == offload::SweepParameter::server_cap ? "m" : "alpha";
  std::cout << name << "\ttos\tlocal\tmec\tmixed\n";
  const auto rows = offload::summarize(result);
  for (const double value : config.values) {
    std::cout << offload::format_double(value, 9);
    for (const offload::PolicyKind policy :
         {offload::PolicyKind::tos, offload::PolicyKind::local, offload::PolicyKind::mec,
          offload::PolicyKind::mixed}) {
      for (const auto& row : rows) {
        if (row.param_value == value && row.policy == policy) {
          std::cout << '\t' << offload::format_double(row.mean_normalized, 6);
        }
      }
    }
    std::cout << '\n';
  }
  return 0;
}

int run_verify(offload::VerifyLevel level, std::uint64_t seed) {
  bool all_pass = true;
  for (const auto& check : offload::run_verification(level, seed)) {
    std::cout << (check.pass ? "PASS " : "FAIL ") << check.name;
    if (!check.detail.empty()) std::cout << " (" << check.detail << ")";
    std::cout << "\n";
    all_pass = all_pass && check.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-energy optimal task offloading across an edge server fleet"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Compute the optimal plan for one instance");
  std::string solve_instance;
  InlineInstance inline_spec;
  solve_cmd->add_option("--instance", solve_instance, "Instance JSON file");
  solve_cmd->add_option("--L-bits", inline_spec.data_bits, "Task size in bits");
  solve_cmd->add_option("--tau-d", inline_spec.deadline_s, "Deadline in seconds");
  solve_cmd->add_option("--gamma-a", inline_spec.cycles_per_bit, "Cycles per bit");
  solve_cmd->add_option("--f-max", inline_spec.max_frequency_hz, "Device frequency cap in Hz");
  solve_cmd->add_option("--kappa", inline_spec.kappa, "Switched capacitance");
  solve_cmd->add_option("--p-tx", inline_spec.transmit_power_w, "Transmit power in W");
  solve_cmd->add_option("--e-t", inline_spec.tail_energy_j, "Tail energy in J");
  solve_cmd->add_option("--r-hp", inline_spec.uplink_rate_bps, "Uplink rate in bits/s");
  solve_cmd->add_option("--alpha", inline_spec.alpha, "Delay weight in J/s");
  solve_cmd->add_option("--m", inline_spec.cap, "Server cap");
  solve_cmd->add_option("--server", inline_spec.servers,
                        "Inline server as id:rate_bps:capacity_hz (repeatable)");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Price an explicit plan for an instance");
  std::string eval_instance, eval_plan;
  eval_cmd->add_option("--instance", eval_instance, "Instance JSON file")->required();
  eval_cmd->add_option("--plan", eval_plan, "Plan JSON file")->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the four-policy comparative study");
  std::string vary = "alpha";
  std::vector<double> values;
  int trials = 100;
  std::uint64_t sweep_seed = default_seed();
  double sweep_alpha = 20.0;
  int sweep_cap = 5;
  std::size_t fleet_size = 100;
  double sweep_deadline = -1.0;
  int jobs = 0;
  std::string out_path;
  sweep_cmd->add_option("--vary", vary, "Swept parameter: m or alpha")
      ->check(CLI::IsMember({"m", "alpha"}));
  sweep_cmd->add_option("--values", values, "Parameter values")->delimiter(',')->required();
  sweep_cmd->add_option("--trials", trials, "Instances per parameter value")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sweep_seed, "Base RNG seed");
  sweep_cmd->add_option("--alpha", sweep_alpha, "Fixed delay weight when varying m");
  sweep_cmd->add_option("--m", sweep_cap, "Fixed server cap when varying alpha");
  sweep_cmd->add_option("--n", fleet_size, "Fleet size per instance");
  sweep_cmd->add_option("--tau-d", sweep_deadline, "Deadline in seconds (default: none)");
  sweep_cmd->add_option("--jobs", jobs, "Worker threads (default: number of processors)");
  sweep_cmd->add_option("--out", out_path, "CSV output file")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run the brute-force verification suite");
  std::string level = "quick";
  std::uint64_t verify_seed = default_seed();
  verify_cmd->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify_cmd->add_option("--seed", verify_seed, "RNG seed");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  std::size_t gen_fleet = 100;
  std::uint64_t gen_seed = default_seed();
  double gen_alpha = 20.0;
  int gen_cap = 5;
  double gen_deadline = -1.0;
  gen_cmd->add_option("--n", gen_fleet, "Fleet size");
  gen_cmd->add_option("--seed", gen_seed, "RNG seed");
  gen_cmd->add_option("--alpha", gen_alpha, "Delay weight in J/s");
  gen_cmd->add_option("--m", gen_cap, "Server cap");
  gen_cmd->add_option("--tau-d", gen_deadline, "Deadline in seconds (default: none)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve_cmd->parsed()) {
      const offload::Instance in = solve_instance.empty()
                                       ? build_inline(inline_spec)
                                       : offload::parse_instance(read_file(solve_instance));
      return run_solve(in);
    }
    if (eval_cmd->parsed()) {
      return run_evaluate(eval_instance, eval_plan);
    }
    if (sweep_cmd->parsed()) {
      offload::SweepConfig config;
      config.vary = vary == "m" ? offload::SweepParameter::server_cap
                                : offload::SweepParameter::delay_weight;
      config.values = values;
      config.trials = trials;
      config.seed = sweep_seed;
      config.fixed_delay_weight = sweep_alpha;
      config.fixed_server_cap = sweep_cap;
      config.fleet.fleet_size = fleet_size;
      if (sweep_deadline > 0.0) config.defaults.deadline_s = sweep_deadline;
      config.jobs = jobs;
      return run_sweep(config, out_path);
    }
    if (verify_cmd->parsed()) {
      return run_verify(level == "full" ? offload::VerifyLevel::full : offload::VerifyLevel::quick,
                        verify_seed);
    }
    if (gen_cmd->parsed()) {
      offload::StudyDefaults defaults;
      if (gen_deadline > 0.0) defaults.deadline_s = gen_deadline;
      offload::FleetDistribution fleet;
      fleet.fleet_size = gen_fleet;
      const offload::Instance in =
          offload::make_instance(fleet, defaults, gen_alpha, gen_cap, gen_seed);
      std::cout << offload::instance_to_json(in) << "\n";
      return 0;
    }
  } catch (const offload::InfeasibleError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 1;
}
