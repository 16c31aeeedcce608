#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bodt/model.hpp"

namespace bodt {

// Tasks grouped by the location where their execution time is minimal.
// Ties go to the location with the smallest id.
struct NearestPlan {
  std::map<std::string, std::vector<std::string>> per_location;
};

// Every VM a task has ever been placed on during one planner invocation.
using AssignmentHistory = std::map<std::string, std::set<std::string, VmIdLess>>;

struct PlannerState {
  Plan plan;
  std::set<std::string, VmIdLess> ignored;
  AssignmentHistory history;
};

struct AssignResult {
  std::optional<Plan> plan;
  std::string failed_task;  // set when no receiver had room

  bool ok() const { return plan.has_value(); }
};

enum class InfeasibleReason { kNone, kNearestLocationOverflow, kReductionFloorAboveBudget };

std::string_view to_string(InfeasibleReason reason);

struct PlanOutcome {
  std::optional<Plan> plan;
  PlanMetrics metrics;
  InfeasibleReason reason = InfeasibleReason::kNone;
  std::string detail;

  bool feasible() const { return plan.has_value(); }
};

// Called after each planner phase ("nearest", "reduce_local",
// "reduce_global", "balance") with the plan as it stands.
using PhaseObserver = std::function<void(std::string_view phase, const Plan& plan)>;

NearestPlan nearest_plan(const Scenario& scenario);

// tb_b VMs per location, ids "{location}-{index}", locations in id order.
std::vector<VmInstance> initial_vms(const Scenario& scenario, Budget budget);

// Distributes `tasks` over `receivers` on top of `current`. Tasks are taken
// in descending execution time at their nearest location; each goes to the
// receiver with the lowest transfer rate, then lowest current load, then
// lowest id, among receivers that stay within one billing block after the
// addition. With one_block_cap=false every receiver is a candidate, which is
// how the comparison planners recover from an over-full block.
AssignResult assign(std::span<const std::string> tasks, std::span<const VmInstance> receivers,
                    const Plan& current, const Scenario& scenario, bool one_block_cap = true);

// Empties the least-loaded VMs onto the others (same location when is_local)
// until the plan fits in tb_b blocks or every VM is in `ignored`.
PlannerState reduce(PlannerState state, Budget budget, bool is_local, const Scenario& scenario);

// Moves tasks off the slowest VM onto the nearest VM that never held them and
// would still finish before the giver does. Never raises makespan or blocks.
Plan balance(const Plan& plan, const AssignmentHistory& history, const Scenario& scenario);

PlanOutcome find_plan(const Scenario& scenario, Budget budget,
                      const PhaseObserver& observer = {});

}  // namespace bodt
