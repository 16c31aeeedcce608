#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bodt {

// Tolerance for every equality/boundary test on seconds.
inline constexpr double kTimeEpsilon = 1e-9;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleBudgetError : public ModelError {
 public:
  using ModelError::ModelError;
};

struct Location {
  std::string id;
  std::string label;
};

// A task pulls `size` abstract data units from `source`. Rates in the cost
// model are seconds per unit, so size carries no physical unit of its own.
struct Task {
  Task(std::string id, double size, std::string source);

  std::string id;
  double size;
  std::string source;
};

struct CostModel {
  // transfer[source][location] = seconds per data unit.
  std::map<std::string, std::map<std::string, double>> transfer;
  double comp = 0.0;
  double startup = 0.0;
  double block_seconds = 3600.0;
  double block_price = 1.0;

  // Throws ModelError when the pair is not covered by the matrix.
  double transfer_rate(std::string_view source, std::string_view location) const;
};

struct VmInstance {
  std::string id;
  std::string location;

  friend bool operator==(const VmInstance&, const VmInstance&) = default;
};

// Natural order on VM ids: digit runs compare numerically, so "A-2" < "A-10".
bool vm_id_less(std::string_view a, std::string_view b);

struct VmIdLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const { return vm_id_less(a, b); }
};

struct Budget {
  explicit Budget(std::int64_t blocks);
  std::int64_t tb_b;
};

// Immutable problem instance. Locations and sources are kept in id order;
// tasks keep their input order. Construction validates referential integrity
// and the totality of the transfer matrix, then caches per (task, location)
// execution times.
class Scenario {
 public:
  Scenario(std::vector<Location> locations, std::vector<std::string> sources,
           std::vector<Task> tasks, CostModel cost_model);

  const std::vector<Location>& locations() const { return locations_; }
  const std::vector<std::string>& sources() const { return sources_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  const CostModel& cost_model() const { return cost_model_; }

  std::size_t location_count() const { return locations_.size(); }
  std::size_t task_count() const { return tasks_.size(); }

  std::optional<std::size_t> find_location(std::string_view id) const;
  std::optional<std::size_t> find_task(std::string_view id) const;
  std::size_t location_index(std::string_view id) const;  // throws ModelError
  std::size_t task_index(std::string_view id) const;      // throws ModelError

  double transfer_rate(std::size_t task, std::size_t location) const {
    return transfer_[task * locations_.size() + location];
  }
  double exec_seconds(std::size_t task, std::size_t location) const {
    return exec_[task * locations_.size() + location];
  }

  // Stable content hash (hex) used as the plan's scenario reference.
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::vector<Location> locations_;
  std::vector<std::string> sources_;
  std::vector<Task> tasks_;
  CostModel cost_model_;
  std::unordered_map<std::string, std::size_t> location_index_;
  std::unordered_map<std::string, std::size_t> task_index_;
  std::vector<double> transfer_;
  std::vector<double> exec_;
  std::string fingerprint_;
};

struct VmAssignment {
  VmInstance vm;
  std::vector<std::string> tasks;
};

// Assignment of tasks to VM instances. Entries are kept in VM id order and
// VMs without tasks are dropped, since an empty VM is never created.
class Plan {
 public:
  Plan() = default;
  explicit Plan(std::vector<VmAssignment> entries, std::string scenario_ref = {});

  const std::vector<VmAssignment>& entries() const { return entries_; }
  const std::string& scenario_ref() const { return scenario_ref_; }
  std::size_t vm_count() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // nullptr when the VM is not part of the plan.
  const VmAssignment* find(std::string_view vm_id) const;

  friend bool operator==(const Plan& a, const Plan& b);

 private:
  std::vector<VmAssignment> entries_;
  std::string scenario_ref_;
};

struct VmMetrics {
  VmInstance vm;
  double exec_seconds;
  std::int64_t blocks;
};

struct PlanMetrics {
  double makespan = 0.0;
  std::int64_t total_blocks = 0;
  std::vector<VmMetrics> per_vm;
};

struct PlanViolations {
  std::vector<std::string> missing;
  std::vector<std::string> duplicate;
  std::vector<std::string> unknown_tasks;
  std::vector<std::string> unknown_locations;
  std::vector<std::string> duplicate_vms;
  bool empty_plan = false;

  bool ok() const {
    return missing.empty() && duplicate.empty() && unknown_tasks.empty() &&
           unknown_locations.empty() && duplicate_vms.empty() && !empty_plan;
  }
  std::string describe() const;
};

class PlanValidationError : public ModelError {
 public:
  explicit PlanValidationError(PlanViolations v);
  const PlanViolations& violations() const { return violations_; }

 private:
  PlanViolations violations_;
};

// (trans + comp) * size.
double exec_time(const Task& task, const Location& location, const CostModel& cm);

// Zero for an empty list, otherwise startup plus the per-task sum.
double vm_exec_time(std::span<const Task> tasks, const VmInstance& vm, const CostModel& cm);
double vm_exec_time(std::span<const std::string> task_ids, const VmInstance& vm,
                    const Scenario& scenario);

// Billing blocks for a VM that ran `exec_seconds`: ceiling with kTimeEpsilon
// slack at the boundary, zero for an unused VM.
std::int64_t time_blocks(double exec_seconds, const CostModel& cm);

PlanViolations validate_plan(const Plan& plan, const Scenario& scenario);

// Throws PlanValidationError on an invalid plan.
PlanMetrics plan_metrics(const Plan& plan, const Scenario& scenario);

// floor(money / block_price); throws InfeasibleBudgetError below one block.
Budget budget_to_blocks(double money, const CostModel& cm);

}  // namespace bodt
