#include "bodt/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace bodt {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Fnv1a {
 public:
  void add(std::string_view s) {
    for (unsigned char c : s) {
      hash_ ^= c;
      hash_ *= 1099511628211ULL;
    }
    add_separator();
  }
  void add(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    add(std::string_view(buf, static_cast<std::size_t>(end - buf)));
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  void add_separator() {
    hash_ ^= 0x1f;
    hash_ *= 1099511628211ULL;
  }
  std::uint64_t hash_ = 14695981039346656037ULL;
};

void require_finite_nonneg(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ModelError(std::string(what) + " must be a finite non-negative number");
  }
}

}  // namespace

Task::Task(std::string id_in, double size_in, std::string source_in)
    : id(std::move(id_in)), size(size_in), source(std::move(source_in)) {
  if (!std::isfinite(size) || size <= 0.0) {
    throw ModelError("task '" + id + "' must have size > 0");
  }
}

double CostModel::transfer_rate(std::string_view source, std::string_view location) const {
  auto row = transfer.find(std::string(source));
  if (row != transfer.end()) {
    auto cell = row->second.find(std::string(location));
    if (cell != row->second.end()) return cell->second;
  }
  throw ModelError("cost model has no transfer rate for source '" + std::string(source) +
                   "' to location '" + std::string(location) + "'");
}

bool vm_id_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      // Compare digit runs numerically, ignoring leading zeros.
      std::string_view da = a.substr(i, ie - i), db = b.substr(j, je - j);
      while (da.size() > 1 && da.front() == '0') da.remove_prefix(1);
      while (db.size() > 1 && db.front() == '0') db.remove_prefix(1);
      if (da.size() != db.size()) return da.size() < db.size();
      if (da != db) return da < db;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  // Equal under natural order (e.g. "A-01" vs "A-1"): fall back to bytes.
  return a < b;
}

Budget::Budget(std::int64_t blocks) : tb_b(blocks) {
  if (blocks < 1) throw InfeasibleBudgetError("budget must allow at least one time block");
}

Scenario::Scenario(std::vector<Location> locations, std::vector<std::string> sources,
                   std::vector<Task> tasks, CostModel cost_model)
    : locations_(std::move(locations)),
      sources_(std::move(sources)),
      tasks_(std::move(tasks)),
      cost_model_(std::move(cost_model)) {
  if (locations_.empty()) throw ModelError("scenario has no locations");
  if (tasks_.empty()) throw ModelError("scenario has no tasks");

  std::sort(locations_.begin(), locations_.end(),
            [](const Location& a, const Location& b) { return a.id < b.id; });
  std::sort(sources_.begin(), sources_.end());
  if (std::adjacent_find(sources_.begin(), sources_.end()) != sources_.end()) {
    throw ModelError("duplicate source id");
  }

  for (std::size_t i = 0; i < locations_.size(); ++i) {
    if (!location_index_.emplace(locations_[i].id, i).second) {
      throw ModelError("duplicate location id '" + locations_[i].id + "'");
    }
  }
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (!task_index_.emplace(tasks_[i].id, i).second) {
      throw ModelError("duplicate task id '" + tasks_[i].id + "'");
    }
    if (!std::binary_search(sources_.begin(), sources_.end(), tasks_[i].source)) {
      throw ModelError("task '" + tasks_[i].id + "' references unknown source '" +
                       tasks_[i].source + "'");
    }
  }

  const CostModel& cm = cost_model_;
  require_finite_nonneg(cm.comp, "comp");
  require_finite_nonneg(cm.startup, "startup");
  if (!std::isfinite(cm.block_seconds) || cm.block_seconds <= 0.0) {
    throw ModelError("block_seconds must be > 0");
  }
  if (!std::isfinite(cm.block_price) || cm.block_price <= 0.0) {
    throw ModelError("block_price must be > 0");
  }
  for (const auto& [source, row] : cm.transfer) {
    if (!std::binary_search(sources_.begin(), sources_.end(), source)) {
      throw ModelError("transfer matrix row for unknown source '" + source + "'");
    }
    for (const auto& [loc, rate] : row) {
      if (!location_index_.contains(loc)) {
        throw ModelError("transfer matrix column for unknown location '" + loc + "'");
      }
      require_finite_nonneg(rate, "transfer rate");
    }
  }
  for (const auto& source : sources_) {
    for (const auto& loc : locations_) cm.transfer_rate(source, loc.id);
  }

  const std::size_t m = locations_.size();
  transfer_.resize(tasks_.size() * m);
  exec_.resize(tasks_.size() * m);
  for (std::size_t t = 0; t < tasks_.size(); ++t) {
    for (std::size_t l = 0; l < m; ++l) {
      transfer_[t * m + l] = cm.transfer_rate(tasks_[t].source, locations_[l].id);
      exec_[t * m + l] = exec_time(tasks_[t], locations_[l], cm);
    }
  }

  Fnv1a h;
  for (const auto& l : locations_) {
    h.add(l.id);
    h.add(l.label);
  }
  for (const auto& s : sources_) h.add(s);
  for (const auto& t : tasks_) {
    h.add(t.id);
    h.add(t.size);
    h.add(t.source);
  }
  h.add(cm.comp);
  h.add(cm.startup);
  h.add(cm.block_seconds);
  h.add(cm.block_price);
  for (const auto& [source, row] : cm.transfer) {
    h.add(source);
    for (const auto& [loc, rate] : row) {
      h.add(loc);
      h.add(rate);
    }
  }
  fingerprint_ = h.hex();
}

std::optional<std::size_t> Scenario::find_location(std::string_view id) const {
  auto it = location_index_.find(std::string(id));
  if (it == location_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Scenario::find_task(std::string_view id) const {
  auto it = task_index_.find(std::string(id));
  if (it == task_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Scenario::location_index(std::string_view id) const {
  if (auto i = find_location(id)) return *i;
  throw ModelError("unknown location '" + std::string(id) + "'");
}

std::size_t Scenario::task_index(std::string_view id) const {
  if (auto i = find_task(id)) return *i;
  throw ModelError("unknown task '" + std::string(id) + "'");
}

Plan::Plan(std::vector<VmAssignment> entries, std::string scenario_ref)
    : scenario_ref_(std::move(scenario_ref)) {
  for (auto& e : entries) {
    if (!e.tasks.empty()) entries_.push_back(std::move(e));
  }
  std::stable_sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    return vm_id_less(a.vm.id, b.vm.id);
  });
}

const VmAssignment* Plan::find(std::string_view vm_id) const {
  for (const auto& e : entries_) {
    if (e.vm.id == vm_id) return &e;
  }
  return nullptr;
}

bool operator==(const Plan& a, const Plan& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    if (a.entries_[i].vm != b.entries_[i].vm || a.entries_[i].tasks != b.entries_[i].tasks) {
      return false;
    }
  }
  return true;
}

std::string PlanViolations::describe() const {
  std::ostringstream os;
  auto list = [&os](const char* what, const std::vector<std::string>& ids) {
    if (ids.empty()) return;
    os << what << ":";
    for (const auto& id : ids) os << ' ' << id;
    os << "; ";
  };
  list("missing tasks", missing);
  list("duplicated tasks", duplicate);
  list("unknown tasks", unknown_tasks);
  list("unknown locations", unknown_locations);
  list("duplicated vms", duplicate_vms);
  if (empty_plan) os << "plan has no VMs; ";
  std::string s = os.str();
  if (s.size() >= 2) s.resize(s.size() - 2);
  return s;
}

PlanValidationError::PlanValidationError(PlanViolations v)
    : ModelError("invalid plan: " + v.describe()), violations_(std::move(v)) {}

double exec_time(const Task& task, const Location& location, const CostModel& cm) {
  return (cm.transfer_rate(task.source, location.id) + cm.comp) * task.size;
}

double vm_exec_time(std::span<const Task> tasks, const VmInstance& vm, const CostModel& cm) {
  if (tasks.empty()) return 0.0;
  const Location loc{vm.location, {}};
  double work = 0.0;
  for (const auto& t : tasks) work += exec_time(t, loc, cm);
  return cm.startup + work;
}

double vm_exec_time(std::span<const std::string> task_ids, const VmInstance& vm,
                    const Scenario& scenario) {
  if (task_ids.empty()) return 0.0;
  const std::size_t l = scenario.location_index(vm.location);
  double work = 0.0;
  for (const auto& id : task_ids) work += scenario.exec_seconds(scenario.task_index(id), l);
  return scenario.cost_model().startup + work;
}

std::int64_t time_blocks(double exec_seconds, const CostModel& cm) {
  if (!(exec_seconds >= 0.0)) {
    throw ModelError("time_blocks: execution time must be non-negative");
  }
  if (exec_seconds == 0.0) return 0;
  const double blocks = std::ceil((exec_seconds - kTimeEpsilon) / cm.block_seconds);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(blocks));
}

PlanViolations validate_plan(const Plan& plan, const Scenario& scenario) {
  PlanViolations v;
  std::vector<int> seen(scenario.task_count(), 0);
  std::set<std::string> dup, vm_ids, dup_vms, unknown_locs;
  for (const auto& e : plan.entries()) {
    if (!vm_ids.insert(e.vm.id).second) dup_vms.insert(e.vm.id);
    if (!scenario.find_location(e.vm.location)) unknown_locs.insert(e.vm.location);
    for (const auto& id : e.tasks) {
      auto idx = scenario.find_task(id);
      if (!idx) {
        v.unknown_tasks.push_back(id);
        continue;
      }
      if (++seen[*idx] == 2) dup.insert(id);
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] == 0) v.missing.push_back(scenario.tasks()[i].id);
  }
  v.duplicate.assign(dup.begin(), dup.end());
  v.duplicate_vms.assign(dup_vms.begin(), dup_vms.end());
  v.unknown_locations.assign(unknown_locs.begin(), unknown_locs.end());
  std::sort(v.missing.begin(), v.missing.end());
  std::sort(v.unknown_tasks.begin(), v.unknown_tasks.end());
  v.empty_plan = plan.empty();
  return v;
}

PlanMetrics plan_metrics(const Plan& plan, const Scenario& scenario) {
  if (auto v = validate_plan(plan, scenario); !v.ok()) throw PlanValidationError(std::move(v));
  PlanMetrics m;
  m.per_vm.reserve(plan.vm_count());
  for (const auto& e : plan.entries()) {
    const double exec = vm_exec_time(e.tasks, e.vm, scenario);
    const std::int64_t blocks = time_blocks(exec, scenario.cost_model());
    m.makespan = std::max(m.makespan, exec);
    m.total_blocks += blocks;
    m.per_vm.push_back({e.vm, exec, blocks});
  }
  return m;
}

Budget budget_to_blocks(double money, const CostModel& cm) {
  if (!std::isfinite(money) || money <= 0.0) {
    throw InfeasibleBudgetError("budget must be a positive amount");
  }
  const double blocks = std::floor(money / cm.block_price);
  if (blocks < 1.0) {
    throw InfeasibleBudgetError("budget is below the price of one time block");
  }
  return Budget(static_cast<std::int64_t>(blocks));
}

}  // namespace bodt
