#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bodt/model.hpp"

namespace bodt::testing {

struct TaskSpec {
  std::string id;
  double size;
  std::string source;
};

// rates[source][location]; locations and sources are taken from the keys.
inline Scenario make_scenario(const std::map<std::string, std::map<std::string, double>>& rates,
                              const std::vector<TaskSpec>& tasks, double comp, double startup,
                              double block_seconds = 3600.0, double block_price = 1.0) {
  std::set<std::string> locs;
  std::vector<std::string> sources;
  for (const auto& [s, row] : rates) {
    sources.push_back(s);
    for (const auto& [l, _] : row) locs.insert(l);
  }
  std::vector<Location> locations;
  for (const auto& l : locs) locations.push_back({l, "loc " + l});
  std::vector<Task> ts;
  for (const auto& t : tasks) ts.emplace_back(t.id, t.size, t.source);
  CostModel cm;
  cm.transfer = rates;
  cm.comp = comp;
  cm.startup = startup;
  cm.block_seconds = block_seconds;
  cm.block_price = block_price;
  return Scenario(std::move(locations), std::move(sources), std::move(ts), std::move(cm));
}

// Two locations, two sources, four tasks. Source s1 sits next to A, s2 next to B.
inline Scenario canonical_scenario() {
  return make_scenario({{"s1", {{"A", 1.0}, {"B", 4.0}}}, {"s2", {{"A", 3.0}, {"B", 0.5}}}},
                       {{"t1", 10, "s1"}, {"t2", 20, "s1"}, {"t3", 8, "s2"}, {"t4", 30, "s2"}},
                       1.0, 10.0, 3600.0);
}

struct TinyShape {
  std::size_t max_tasks = 6;
  std::size_t max_locations = 3;
  double block_seconds = 100.0;
};

// Small random instance with short blocks so that budgets actually bind.
inline Scenario random_tiny_scenario(std::mt19937_64& rng, const TinyShape& shape = {}) {
  std::uniform_int_distribution<std::size_t> n_tasks(1, shape.max_tasks);
  std::uniform_int_distribution<std::size_t> n_locs(1, shape.max_locations);
  std::uniform_int_distribution<std::size_t> n_srcs(1, 3);
  std::uniform_real_distribution<double> rate(0.0, 4.0);
  std::uniform_real_distribution<double> size(1.0, 15.0);
  std::uniform_real_distribution<double> startup(0.0, 15.0);
  const std::size_t nt = n_tasks(rng), nl = n_locs(rng), ns = n_srcs(rng);
  std::map<std::string, std::map<std::string, double>> rates;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t l = 0; l < nl; ++l) {
      rates["s" + std::to_string(s)][std::string(1, static_cast<char>('A' + l))] = rate(rng);
    }
  }
  std::vector<TaskSpec> tasks;
  std::uniform_int_distribution<std::size_t> pick(0, ns - 1);
  for (std::size_t t = 0; t < nt; ++t) {
    tasks.push_back({"t" + std::to_string(t), size(rng), "s" + std::to_string(pick(rng))});
  }
  return make_scenario(rates, tasks, 0.5, startup(rng), shape.block_seconds);
}

// Every task id of the scenario appears exactly once across the plan.
inline bool conserves_tasks(const std::vector<std::string>& placed, const Scenario& scenario) {
  std::multiset<std::string> got(placed.begin(), placed.end());
  if (got.size() != scenario.task_count()) return false;
  for (const auto& t : scenario.tasks()) {
    if (got.count(t.id) != 1) return false;
  }
  return true;
}

inline std::vector<std::string> placed_tasks(const Plan& plan) {
  std::vector<std::string> out;
  for (const auto& e : plan.entries()) out.insert(out.end(), e.tasks.begin(), e.tasks.end());
  return out;
}

}  // namespace bodt::testing
