#include "work_plan.hpp"

#include <algorithm>
#include <tuple>

namespace bodt::detail {

WorkPlan WorkPlan::from_plan(const Plan& plan, const Scenario& scenario) {
  WorkPlan w(scenario);
  for (const auto& e : plan.entries()) {
    const std::size_t v = w.add_vm(e.vm);
    for (const auto& id : e.tasks) w.append(v, scenario.task_index(id));
  }
  return w;
}

Plan WorkPlan::to_plan() const {
  std::vector<VmAssignment> entries;
  entries.reserve(vms.size());
  for (const auto& vm : vms) {
    if (vm.tasks.empty()) continue;
    VmAssignment a{vm.vm, {}};
    a.tasks.reserve(vm.tasks.size());
    for (std::size_t t : vm.tasks) a.tasks.push_back(scenario_->tasks()[t].id);
    entries.push_back(std::move(a));
  }
  return Plan(std::move(entries), scenario_->fingerprint());
}

std::int64_t WorkPlan::total_blocks() const {
  std::int64_t total = 0;
  for (const auto& vm : vms) total += blocks(vm);
  return total;
}

std::size_t WorkPlan::add_vm(const VmInstance& vm) {
  if (find(vm.id)) throw ModelError("duplicate VM id '" + vm.id + "'");
  vms.push_back({vm, scenario_->location_index(vm.location), {}, 0.0});
  return vms.size() - 1;
}

std::optional<std::size_t> WorkPlan::find(std::string_view vm_id) const {
  for (std::size_t i = 0; i < vms.size(); ++i) {
    if (vms[i].vm.id == vm_id) return i;
  }
  return std::nullopt;
}

void WorkPlan::append(std::size_t v, std::size_t task) {
  WorkVm& vm = vms[v];
  vm.tasks.push_back(task);
  vm.work += scenario_->exec_seconds(task, vm.loc);
}

void WorkPlan::remove(std::size_t v, std::size_t task) {
  WorkVm& vm = vms[v];
  vm.tasks.erase(std::find(vm.tasks.begin(), vm.tasks.end(), task));
  // Recompute rather than subtract so the sum matches a fresh evaluation.
  vm.work = 0.0;
  for (std::size_t t : vm.tasks) vm.work += scenario_->exec_seconds(t, vm.loc);
}

void WorkPlan::clear(std::size_t v) {
  vms[v].tasks.clear();
  vms[v].work = 0.0;
}

void WorkPlan::drop_empty() {
  std::erase_if(vms, [](const WorkVm& vm) { return vm.tasks.empty(); });
}

std::size_t nearest_location(const Scenario& scenario, std::size_t task) {
  std::size_t best = 0;
  for (std::size_t l = 1; l < scenario.location_count(); ++l) {
    if (scenario.exec_seconds(task, l) < scenario.exec_seconds(task, best)) best = l;
  }
  return best;
}

std::optional<std::vector<Placement>> assign_into(WorkPlan& plan, std::vector<std::size_t> tasks,
                                                  std::span<const std::size_t> receivers,
                                                  bool one_block_cap, std::size_t* failed_task) {
  const Scenario& sc = plan.scenario();
  const CostModel& cm = sc.cost_model();

  std::vector<double> key(sc.task_count());
  for (std::size_t t : tasks) key[t] = sc.exec_seconds(t, nearest_location(sc, t));
  std::sort(tasks.begin(), tasks.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] != key[b]) return key[a] > key[b];
    return sc.tasks()[a].id < sc.tasks()[b].id;
  });

  WorkPlan trial = plan;
  std::vector<Placement> placed;
  placed.reserve(tasks.size());
  for (std::size_t t : tasks) {
    std::optional<std::size_t> best;
    double best_rate = 0.0, best_load = 0.0;
    for (std::size_t r : receivers) {
      const WorkVm& vm = trial.vms[r];
      const double load = trial.exec(vm);
      if (one_block_cap) {
        const double after = cm.startup + (vm.work + sc.exec_seconds(t, vm.loc));
        if (after > cm.block_seconds + kTimeEpsilon) continue;
      }
      const double rate = sc.transfer_rate(t, vm.loc);
      const bool better =
          !best || std::tie(rate, load) < std::tie(best_rate, best_load) ||
          (rate == best_rate && load == best_load && vm_id_less(vm.vm.id, trial.vms[*best].vm.id));
      if (better) {
        best = r;
        best_rate = rate;
        best_load = load;
      }
    }
    if (!best) {
      if (failed_task) *failed_task = t;
      return std::nullopt;
    }
    trial.append(*best, t);
    placed.push_back({t, *best});
  }
  plan = std::move(trial);
  return placed;
}

TaskHistory to_task_history(const AssignmentHistory& history, const Scenario& scenario) {
  TaskHistory h(scenario.task_count());
  for (const auto& [task, vms] : history) {
    if (auto idx = scenario.find_task(task)) h[*idx].insert(vms.begin(), vms.end());
  }
  return h;
}

AssignmentHistory to_assignment_history(const TaskHistory& history, const Scenario& scenario) {
  AssignmentHistory h;
  for (std::size_t t = 0; t < history.size(); ++t) {
    if (!history[t].empty()) h[scenario.tasks()[t].id] = history[t];
  }
  return h;
}

}  // namespace bodt::detail
