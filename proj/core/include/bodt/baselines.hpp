#pragma once

#include <string>
#include <vector>

#include "bodt/model.hpp"

namespace bodt {

// Locations by ascending cost of pulling every task to them
// (sum over tasks of transfer rate * size), ties by location id.
struct LocationRanking {
  std::vector<std::string> order;
};

LocationRanking rank_locations(const Scenario& scenario);

struct BaselinePlan {
  Plan plan;
  bool cap_lifted = false;  // the one-block cap had to be dropped to place every task
};

// n_vms VMs at the top-ranked location.
BaselinePlan centralised_plan(const Scenario& scenario, std::int64_t n_vms);

// n_vms VMs dealt over the ranking in circular order.
BaselinePlan round_robin_plan(const Scenario& scenario, std::int64_t n_vms);

}  // namespace bodt
