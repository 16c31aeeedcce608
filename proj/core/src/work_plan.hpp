#pragma once

// Index-based mutable plan used inside the planners. Public types carry ids;
// this carries scenario indices so the inner loops avoid string lookups.

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bodt/model.hpp"
#include "bodt/planner.hpp"

namespace bodt::detail {

struct WorkVm {
  VmInstance vm;
  std::size_t loc = 0;
  std::vector<std::size_t> tasks;
  double work = 0.0;  // sum of task execution times, accumulated in task order
};

using TaskHistory = std::vector<std::set<std::string, VmIdLess>>;

struct Placement {
  std::size_t task;
  std::size_t vm;  // index into WorkPlan::vms
};

class WorkPlan {
 public:
  explicit WorkPlan(const Scenario& scenario) : scenario_(&scenario) {}

  static WorkPlan from_plan(const Plan& plan, const Scenario& scenario);
  Plan to_plan() const;

  const Scenario& scenario() const { return *scenario_; }

  double exec(const WorkVm& vm) const {
    return vm.tasks.empty() ? 0.0 : scenario_->cost_model().startup + vm.work;
  }
  std::int64_t blocks(const WorkVm& vm) const {
    return time_blocks(exec(vm), scenario_->cost_model());
  }
  std::int64_t total_blocks() const;

  // Appends a VM and returns its index. Ids must be unique.
  std::size_t add_vm(const VmInstance& vm);
  std::optional<std::size_t> find(std::string_view vm_id) const;

  void append(std::size_t vm, std::size_t task);
  void remove(std::size_t vm, std::size_t task);
  void clear(std::size_t vm);
  void drop_empty();

  std::vector<WorkVm> vms;

 private:
  const Scenario* scenario_;
};

std::size_t nearest_location(const Scenario& scenario, std::size_t task);

// Core of the assign step. On success the placements are applied to `plan`
// and returned; on failure `plan` is untouched and the offending task index
// is returned through `failed_task`.
std::optional<std::vector<Placement>> assign_into(WorkPlan& plan, std::vector<std::size_t> tasks,
                                                  std::span<const std::size_t> receivers,
                                                  bool one_block_cap, std::size_t* failed_task);

TaskHistory to_task_history(const AssignmentHistory& history, const Scenario& scenario);
AssignmentHistory to_assignment_history(const TaskHistory& history, const Scenario& scenario);

}  // namespace bodt::detail
