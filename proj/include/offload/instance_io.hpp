#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "offload/evaluator.hpp"
#include "offload/format.hpp"
#include "offload/model.hpp"
#include "offload/solver.hpp"

namespace offload {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses the instance document:
///   {"task": {"L_bits": int, "tau_d_s": float|null, "gamma_A": float},
///    "device": {"f_max_hz": float, "kappa": float, "P_tx_w": float,
///               "E_t_j": float, "r_hp_bps": float},
///    "servers": [{"id": string, "r_bps": float, "c_hz": float}, ...],
///    "alpha": float, "m": int}
/// A null tau_d_s means no deadline.
inline Instance parse_instance(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
  try {
    Instance in;
    const auto& task = doc.at("task");
    in.task.data_bits = task.at("L_bits").get<std::int64_t>();
    const auto& deadline = task.at("tau_d_s");
    in.task.deadline_s = deadline.is_null() ? kUnbounded : deadline.get<double>();
    in.task.cycles_per_bit = task.at("gamma_A").get<double>();

    const auto& device = doc.at("device");
    in.device.max_frequency_hz = device.at("f_max_hz").get<double>();
    in.device.switched_capacitance = device.at("kappa").get<double>();
    in.device.transmit_power_w = device.at("P_tx_w").get<double>();
    in.device.tail_energy_j = device.at("E_t_j").get<double>();
    in.device.uplink_rate_bps = device.at("r_hp_bps").get<double>();

    for (const auto& s : doc.at("servers")) {
      ServerSpec server;
      server.id = s.at("id").get<std::string>();
      server.link_rate_bps = s.at("r_bps").get<double>();
      server.compute_rate_hz = s.at("c_hz").get<double>();
      in.servers.push_back(std::move(server));
    }
    in.delay_weight = doc.at("alpha").get<double>();
    in.server_cap = doc.at("m").get<int>();
    return in;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
}

namespace detail {

// Emitted JSON goes through these so numbers are always locale-independent
// and carry full round-trip precision (17 significant digits).
inline std::string json_number(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return "null"; // unbounded quantities serialize as null
  return format_double(v, 17);
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string instance_to_json(const Instance& in) {
  using detail::json_number;
  using detail::json_string;
  std::string out = "{\"task\":{\"L_bits\":" + std::to_string(in.task.data_bits);
  out += ",\"tau_d_s\":" + (in.task.deadline_s == kUnbounded ? std::string("null")
                                                             : json_number(in.task.deadline_s));
  out += ",\"gamma_A\":" + json_number(in.task.cycles_per_bit);
  out += "},\"device\":{\"f_max_hz\":" + json_number(in.device.max_frequency_hz);
  out += ",\"kappa\":" + json_number(in.device.switched_capacitance);
  out += ",\"P_tx_w\":" + json_number(in.device.transmit_power_w);
  out += ",\"E_t_j\":" + json_number(in.device.tail_energy_j);
  out += ",\"r_hp_bps\":" + json_number(in.device.uplink_rate_bps);
  out += "},\"servers\":[";
  for (std::size_t i = 0; i < in.servers.size(); ++i) {
    if (i) out += ',';
    out += "{\"id\":" + json_string(in.servers[i].id);
    out += ",\"r_bps\":" + json_number(in.servers[i].link_rate_bps);
    out += ",\"c_hz\":" + json_number(in.servers[i].compute_rate_hz);
    out += '}';
  }
  out += "],\"alpha\":" + json_number(in.delay_weight);
  out += ",\"m\":" + std::to_string(in.server_cap);
  out += '}';
  return out;
}

/// Plan document, accepted by the evaluate command:
///   {"x0": float,
///    "allocations": [{"id": string, "fraction": float}, ...],
///    "schedule": [{"cycles": float, "frequency_hz": float}, ...]}
inline OffloadPlan parse_plan(const std::string& text, const Instance& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan JSON: ") + e.what());
  }
  try {
    OffloadPlan plan;
    plan.local_fraction = doc.at("x0").get<double>();
    if (doc.contains("allocations")) {
      for (const auto& a : doc.at("allocations")) {
        const std::string id = a.at("id").get<std::string>();
        std::size_t index = in.servers.size();
        for (std::size_t i = 0; i < in.servers.size(); ++i) {
          if (in.servers[i].id == id) {
            index = i;
            break;
          }
        }
        if (index == in.servers.size()) {
          throw ParseError("plan JSON: unknown server id \"" + id + "\"");
        }
        plan.allocations[index] = a.at("fraction").get<double>();
      }
    }
    if (doc.contains("schedule")) {
      for (const auto& s : doc.at("schedule")) {
        plan.schedule.segments.push_back(
            {s.at("cycles").get<double>(), s.at("frequency_hz").get<double>()});
      }
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan JSON: ") + e.what());
  }
}

/// Solution document emitted by the solve command.
inline std::string solution_to_json(const Instance& in, const Solution& sol,
                                    const CostBreakdown& bd) {
  using detail::json_number;
  using detail::json_string;
  std::string out = "{\"branch\":";
  out += sol.branch == ExecutionBranch::offload ? "\"offload\"" : "\"local\"";
  out += ",\"x0\":" + json_number(sol.plan.local_fraction);
  out += ",\"allocations\":[";
  bool first = true;
  for (const auto& [index, fraction] : sol.plan.allocations) {
    if (!first) out += ',';
    first = false;
    out += "{\"id\":" + json_string(in.servers[index].id);
    out += ",\"fraction\":" + json_number(fraction) + "}";
  }
  out += "]";
  const double f_local =
      sol.plan.schedule.segments.empty() ? 0.0 : sol.plan.schedule.segments.front().frequency_hz;
  out += ",\"f_local_hz\":" + json_number(f_local);
  out += ",\"objective_j\":" + json_number(bd.objective_j);
  out += ",\"delay_s\":" + json_number(bd.overall_delay_s);
  out += ",\"energy_j\":" + json_number(bd.local_energy_j + bd.upload_energy_j);
  out += sol.certified ? ",\"certified\":true" : ",\"certified\":false";
  out += ",\"gates\":{\"qbar_star\":" + json_number(sol.gates.deadline_bound_s);
  out += ",\"qbar_max\":" + json_number(sol.gates.frequency_bound_s);
  out += ",\"q_m\":" + json_number(sol.gates.subset_delay_s) + "}}";
  return out;
}

/// Cost breakdown document emitted by the evaluate command.
inline std::string breakdown_to_json(const Instance& in, const CostBreakdown& bd) {
  using detail::json_number;
  using detail::json_string;
  std::string out = "{\"e_l_j\":" + json_number(bd.local_energy_j);
  out += ",\"e_lp_j\":" + json_number(bd.upload_energy_j);
  out += ",\"d_l_s\":" + json_number(bd.local_delay_s);
  out += ",\"d_lp_s\":" + json_number(bd.upload_delay_s);
  out += ",\"servers\":[";
  for (std::size_t i = 0; i < bd.servers.size(); ++i) {
    if (i) out += ',';
    out += "{\"id\":" + json_string(in.servers[bd.servers[i].index].id);
    out += ",\"d_ps_s\":" + json_number(bd.servers[i].transfer_delay_s);
    out += ",\"d_sc_s\":" + json_number(bd.servers[i].compute_delay_s);
    out += ",\"r_s\":" + json_number(bd.servers[i].total_delay_s) + "}";
  }
  out += "],\"r_max_s\":" + json_number(bd.max_server_delay_s);
  out += ",\"overall_delay_s\":" + json_number(bd.overall_delay_s);
  out += ",\"objective_j\":" + json_number(bd.objective_j);
  out += bd.feasible ? ",\"feasible\":true" : ",\"feasible\":false";
  out += ",\"violations\":[";
  for (std::size_t i = 0; i < bd.violations.size(); ++i) {
    if (i) out += ',';
    out += json_string(bd.violations[i]);
  }
  out += "]}";
  return out;
}

}  // namespace offload
