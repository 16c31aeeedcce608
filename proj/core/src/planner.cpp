#include "bodt/planner.hpp"

#include <algorithm>
#include <numeric>

#include "work_plan.hpp"

namespace bodt {

using detail::Placement;
using detail::TaskHistory;
using detail::WorkPlan;
using detail::WorkVm;

namespace {

void record(TaskHistory& history, const WorkPlan& plan, const std::vector<Placement>& placed) {
  for (const auto& p : placed) history[p.task].insert(plan.vms[p.vm].vm.id);
}

void reduce_in_place(WorkPlan& plan, std::set<std::string, VmIdLess>& ignored, Budget budget,
                     bool is_local, TaskHistory& history) {
  for (;;) {
    plan.drop_empty();
    std::int64_t total = plan.total_blocks();
    if (total <= budget.tb_b) return;

    std::optional<std::size_t> victim;
    for (std::size_t i = 0; i < plan.vms.size(); ++i) {
      if (ignored.contains(plan.vms[i].vm.id)) continue;
      if (!victim || plan.exec(plan.vms[i]) < plan.exec(plan.vms[*victim]) ||
          (plan.exec(plan.vms[i]) == plan.exec(plan.vms[*victim]) &&
           vm_id_less(plan.vms[i].vm.id, plan.vms[*victim].vm.id))) {
        victim = i;
      }
    }
    if (!victim) return;  // every VM is irremovable

    const WorkVm& v = plan.vms[*victim];
    std::vector<std::size_t> receivers;
    for (std::size_t i = 0; i < plan.vms.size(); ++i) {
      if (i == *victim) continue;
      if (is_local && plan.vms[i].loc != v.loc) continue;
      receivers.push_back(i);
    }

    WorkPlan trial = plan;
    std::vector<std::size_t> moving = trial.vms[*victim].tasks;
    trial.clear(*victim);
    auto placed = receivers.empty()
                      ? std::nullopt
                      : detail::assign_into(trial, std::move(moving), receivers, true, nullptr);
    if (placed && trial.total_blocks() < total) {
      record(history, trial, *placed);
      plan = std::move(trial);
    } else {
      ignored.insert(v.vm.id);
    }
  }
}

void balance_in_place(WorkPlan& plan, TaskHistory& history) {
  const Scenario& sc = plan.scenario();
  for (;;) {
    plan.drop_empty();
    if (plan.vms.size() < 2) return;

    std::size_t giver = 0;
    for (std::size_t i = 1; i < plan.vms.size(); ++i) {
      const double e = plan.exec(plan.vms[i]), best = plan.exec(plan.vms[giver]);
      if (e > best || (e == best && vm_id_less(plan.vms[i].vm.id, plan.vms[giver].vm.id))) giver = i;
    }
    const WorkVm& g = plan.vms[giver];
    const double giver_exec = plan.exec(g);

    std::vector<std::size_t> tasks = g.tasks;
    std::sort(tasks.begin(), tasks.end(), [&](std::size_t a, std::size_t b) {
      const double ea = sc.exec_seconds(a, g.loc), eb = sc.exec_seconds(b, g.loc);
      if (ea != eb) return ea > eb;
      return sc.tasks()[a].id < sc.tasks()[b].id;
    });

    std::vector<std::size_t> others(plan.vms.size());
    std::iota(others.begin(), others.end(), 0);
    std::erase(others, giver);

    bool moved = false;
    for (std::size_t t : tasks) {
      std::sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
        const double ra = sc.transfer_rate(t, plan.vms[a].loc);
        const double rb = sc.transfer_rate(t, plan.vms[b].loc);
        if (ra != rb) return ra < rb;
        return vm_id_less(plan.vms[a].vm.id, plan.vms[b].vm.id);
      });
      for (std::size_t r : others) {
        const WorkVm& recv = plan.vms[r];
        if (history[t].contains(recv.vm.id)) continue;
        const double recv_after = plan.exec(recv) + sc.exec_seconds(t, recv.loc);
        if (!(recv_after < giver_exec)) continue;

        WorkPlan trial = plan;
        trial.remove(giver, t);
        trial.append(r, t);
        const std::int64_t before = plan.blocks(plan.vms[giver]) + plan.blocks(recv);
        const std::int64_t after = trial.blocks(trial.vms[giver]) + trial.blocks(trial.vms[r]);
        if (after > before) continue;

        history[t].insert(recv.vm.id);
        plan = std::move(trial);
        moved = true;
        break;
      }
      if (moved) break;
    }
    if (!moved) return;
  }
}

}  // namespace

std::string_view to_string(InfeasibleReason reason) {
  switch (reason) {
    case InfeasibleReason::kNone:
      return "none";
    case InfeasibleReason::kNearestLocationOverflow:
      return "nearest_location_overflow";
    case InfeasibleReason::kReductionFloorAboveBudget:
      return "reduction_floor_above_budget";
  }
  return "unknown";
}

NearestPlan nearest_plan(const Scenario& scenario) {
  NearestPlan np;
  for (std::size_t t = 0; t < scenario.task_count(); ++t) {
    const auto& loc = scenario.locations()[detail::nearest_location(scenario, t)];
    np.per_location[loc.id].push_back(scenario.tasks()[t].id);
  }
  return np;
}

std::vector<VmInstance> initial_vms(const Scenario& scenario, Budget budget) {
  std::vector<VmInstance> vms;
  vms.reserve(scenario.location_count() * static_cast<std::size_t>(budget.tb_b));
  for (const auto& loc : scenario.locations()) {
    for (std::int64_t i = 0; i < budget.tb_b; ++i) {
      vms.push_back({loc.id + "-" + std::to_string(i), loc.id});
    }
  }
  return vms;
}

AssignResult assign(std::span<const std::string> tasks, std::span<const VmInstance> receivers,
                    const Plan& current, const Scenario& scenario, bool one_block_cap) {
  if (receivers.empty()) throw ModelError("assign needs at least one receiving VM");
  WorkPlan plan = WorkPlan::from_plan(current, scenario);

  std::vector<std::size_t> recv;
  for (const auto& vm : receivers) {
    auto idx = plan.find(vm.id);
    if (!idx) {
      idx = plan.add_vm(vm);
    } else if (plan.vms[*idx].vm.location != vm.location) {
      throw ModelError("VM '" + vm.id + "' is already placed at another location");
    }
    recv.push_back(*idx);
  }

  std::vector<bool> placed(scenario.task_count(), false);
  for (const auto& vm : plan.vms) {
    for (std::size_t t : vm.tasks) placed[t] = true;
  }
  std::vector<std::size_t> task_idx;
  for (const auto& id : tasks) {
    const std::size_t t = scenario.task_index(id);
    if (placed[t]) throw ModelError("task '" + id + "' is already assigned");
    placed[t] = true;
    task_idx.push_back(t);
  }

  std::size_t failed = 0;
  if (!detail::assign_into(plan, std::move(task_idx), recv, one_block_cap, &failed)) {
    return {std::nullopt, scenario.tasks()[failed].id};
  }
  return {plan.to_plan(), {}};
}

PlannerState reduce(PlannerState state, Budget budget, bool is_local, const Scenario& scenario) {
  WorkPlan plan = WorkPlan::from_plan(state.plan, scenario);
  TaskHistory history = detail::to_task_history(state.history, scenario);
  reduce_in_place(plan, state.ignored, budget, is_local, history);
  std::erase_if(state.ignored, [&](const std::string& id) { return !plan.find(id); });
  state.plan = plan.to_plan();
  state.history = detail::to_assignment_history(history, scenario);
  return state;
}

Plan balance(const Plan& plan, const AssignmentHistory& history, const Scenario& scenario) {
  WorkPlan work = WorkPlan::from_plan(plan, scenario);
  TaskHistory h = detail::to_task_history(history, scenario);
  // A task always counts as having been on the VM it currently occupies.
  for (const auto& vm : work.vms) {
    for (std::size_t t : vm.tasks) h[t].insert(vm.vm.id);
  }
  balance_in_place(work, h);
  return work.to_plan();
}

PlanOutcome find_plan(const Scenario& scenario, Budget budget, const PhaseObserver& observer) {
  PlanOutcome out;
  WorkPlan plan(scenario);
  for (const auto& vm : initial_vms(scenario, budget)) plan.add_vm(vm);
  TaskHistory history(scenario.task_count());

  std::vector<std::vector<std::size_t>> by_location(scenario.location_count());
  for (std::size_t t = 0; t < scenario.task_count(); ++t) {
    by_location[detail::nearest_location(scenario, t)].push_back(t);
  }

  const auto per_loc = static_cast<std::size_t>(budget.tb_b);
  for (std::size_t l = 0; l < scenario.location_count(); ++l) {
    if (by_location[l].empty()) continue;
    std::vector<std::size_t> receivers(per_loc);
    std::iota(receivers.begin(), receivers.end(), l * per_loc);
    std::size_t failed = 0;
    auto placed = detail::assign_into(plan, by_location[l], receivers, true, &failed);
    const std::string& loc_id = scenario.locations()[l].id;
    if (!placed) {
      out.reason = InfeasibleReason::kNearestLocationOverflow;
      out.detail = "task '" + scenario.tasks()[failed].id + "' does not fit into " +
                   std::to_string(budget.tb_b) + " one-block VMs at location '" + loc_id + "'";
      return out;
    }
    record(history, plan, *placed);
    std::int64_t loc_blocks = 0;
    for (std::size_t r : receivers) loc_blocks += plan.blocks(plan.vms[r]);
    if (loc_blocks > budget.tb_b) {
      out.reason = InfeasibleReason::kNearestLocationOverflow;
      out.detail = "location '" + loc_id + "' alone needs " + std::to_string(loc_blocks) + " blocks";
      return out;
    }
  }
  plan.drop_empty();
  if (observer) observer("nearest", plan.to_plan());

  std::set<std::string, VmIdLess> ignored;
  reduce_in_place(plan, ignored, budget, true, history);
  if (observer) observer("reduce_local", plan.to_plan());
  if (plan.total_blocks() > budget.tb_b) {
    ignored.clear();
    reduce_in_place(plan, ignored, budget, false, history);
    if (observer) observer("reduce_global", plan.to_plan());
  }
  if (const auto total = plan.total_blocks(); total > budget.tb_b) {
    out.reason = InfeasibleReason::kReductionFloorAboveBudget;
    out.detail = "reduction stopped at " + std::to_string(total) + " blocks for a budget of " +
                 std::to_string(budget.tb_b);
    return out;
  }

  balance_in_place(plan, history);
  Plan result = plan.to_plan();
  if (observer) observer("balance", result);
  out.metrics = plan_metrics(result, scenario);
  out.plan = std::move(result);
  return out;
}

}  // namespace bodt
