#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bodt/model.hpp"

namespace bodt {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario document:
//   {"locations": [{"id","label"}], "sources": [ids], "tasks": [{"id","size","source"}],
//    "cost_model": {"comp","startup","block_seconds","block_price",
//                   "transfer": {source: {location: seconds_per_unit}}}}
// Unknown keys are rejected with ModelError.
Scenario parse_scenario(std::string_view json_text);
std::string scenario_to_json(const Scenario& scenario);

// Plan document:
//   {"vms": {vm_id: {"location","tasks","exec_seconds","blocks"}},
//    "makespan", "total_blocks", "feasible", "scenario_ref"}
// "feasible" records whether total_blocks fits `budget` (true without one).
// An infeasible planner outcome is written with an empty "vms" object,
// feasible=false and a "reason" string.
std::string plan_to_json(const Plan& plan, const Scenario& scenario,
                         std::optional<Budget> budget = std::nullopt);
std::string infeasible_plan_json(std::string_view reason);
// Throws ModelError when the document holds no plan, is malformed, or refers
// to a different scenario.
Plan parse_plan(std::string_view json_text, const Scenario& scenario);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace bodt
