#include "bodt/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "work_plan.hpp"

namespace bodt {

namespace {

BaselinePlan distribute(const Scenario& scenario, const std::vector<VmInstance>& vms) {
  detail::WorkPlan plan(scenario);
  for (const auto& vm : vms) plan.add_vm(vm);
  std::vector<std::size_t> receivers(vms.size());
  std::iota(receivers.begin(), receivers.end(), 0);
  std::vector<std::size_t> tasks(scenario.task_count());
  std::iota(tasks.begin(), tasks.end(), 0);

  BaselinePlan out;
  if (!detail::assign_into(plan, tasks, receivers, true, nullptr)) {
    out.cap_lifted = true;
    detail::assign_into(plan, tasks, receivers, false, nullptr);
  }
  out.plan = plan.to_plan();
  return out;
}

void require_vms(std::int64_t n_vms) {
  if (n_vms < 1) throw ModelError("baseline needs at least one VM");
}

}  // namespace

LocationRanking rank_locations(const Scenario& scenario) {
  const std::size_t m = scenario.location_count();
  std::vector<double> cost(m, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t t = 0; t < scenario.task_count(); ++t) {
      cost[l] += scenario.transfer_rate(t, l) * scenario.tasks()[t].size;
    }
  }
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  // Locations are stored in id order, so a stable sort breaks ties by id.
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
  LocationRanking r;
  for (std::size_t l : idx) r.order.push_back(scenario.locations()[l].id);
  return r;
}

BaselinePlan centralised_plan(const Scenario& scenario, std::int64_t n_vms) {
  require_vms(n_vms);
  const std::string lc = rank_locations(scenario).order.front();
  std::vector<VmInstance> vms;
  for (std::int64_t i = 0; i < n_vms; ++i) vms.push_back({lc + "-" + std::to_string(i), lc});
  return distribute(scenario, vms);
}

BaselinePlan round_robin_plan(const Scenario& scenario, std::int64_t n_vms) {
  require_vms(n_vms);
  const auto order = rank_locations(scenario).order;
  std::vector<int> next(order.size(), 0);
  std::vector<VmInstance> vms;
  for (std::int64_t i = 0; i < n_vms; ++i) {
    const std::size_t k = static_cast<std::size_t>(i) % order.size();
    vms.push_back({order[k] + "-" + std::to_string(next[k]++), order[k]});
  }
  return distribute(scenario, vms);
}

}  // namespace bodt
