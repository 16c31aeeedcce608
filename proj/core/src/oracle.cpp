#include "bodt/oracle.hpp"

#include <algorithm>
#include <vector>

namespace bodt {

namespace {

struct Group {
  std::size_t loc;
  double work = 0.0;
  std::vector<std::size_t> tasks;
};

class Search {
 public:
  Search(const Scenario& scenario, Budget budget) : sc_(scenario), budget_(budget) {}

  OracleResult run() {
    visit(0);
    OracleResult r;
    r.states_visited = states_;
    if (!best_) return r;
    r.feasible = true;
    r.makespan = best_makespan_;
    r.total_blocks = best_blocks_;
    std::vector<int> per_loc(sc_.location_count(), 0);
    std::vector<VmAssignment> entries;
    for (const auto& g : *best_) {
      const auto& loc = sc_.locations()[g.loc].id;
      VmAssignment a{{loc + "-" + std::to_string(per_loc[g.loc]++), loc}, {}};
      for (std::size_t t : g.tasks) a.tasks.push_back(sc_.tasks()[t].id);
      entries.push_back(std::move(a));
    }
    r.plan = Plan(std::move(entries), sc_.fingerprint());
    return r;
  }

 private:
  double exec(const Group& g) const { return sc_.cost_model().startup + g.work; }

  std::int64_t blocks() const {
    std::int64_t b = 0;
    for (const auto& g : groups_) b += time_blocks(exec(g), sc_.cost_model());
    return b;
  }

  double makespan() const {
    double m = 0.0;
    for (const auto& g : groups_) m = std::max(m, exec(g));
    return m;
  }

  // Adding work never lowers blocks or makespan, so a partial assignment
  // that is already over budget or worse than the incumbent is dead.
  bool dead() const {
    if (blocks() > budget_.tb_b) return true;
    return best_ && makespan() > best_makespan_;
  }

  void visit(std::size_t task) {
    ++states_;
    if (dead()) return;
    if (task == sc_.task_count()) {
      const double m = makespan();
      const std::int64_t b = blocks();
      if (!best_ || m < best_makespan_ || (m == best_makespan_ && b < best_blocks_)) {
        best_ = groups_;
        best_makespan_ = m;
        best_blocks_ = b;
      }
      return;
    }
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      place(g, task);
      visit(task + 1);
      unplace(g);
    }
    // Opening a new VM; groups are unlabelled, so only one new slot is tried.
    if (static_cast<std::int64_t>(groups_.size()) < budget_.tb_b) {
      for (std::size_t l = 0; l < sc_.location_count(); ++l) {
        groups_.push_back({l, 0.0, {}});
        place(groups_.size() - 1, task);
        visit(task + 1);
        unplace(groups_.size() - 1);
        groups_.pop_back();
      }
    }
  }

  void place(std::size_t g, std::size_t task) {
    groups_[g].tasks.push_back(task);
    saved_.push_back(groups_[g].work);
    groups_[g].work += sc_.exec_seconds(task, groups_[g].loc);
  }

  void unplace(std::size_t g) {
    groups_[g].tasks.pop_back();
    groups_[g].work = saved_.back();
    saved_.pop_back();
  }

  const Scenario& sc_;
  Budget budget_;
  std::vector<Group> groups_;
  std::vector<double> saved_;
  std::optional<std::vector<Group>> best_;
  double best_makespan_ = 0.0;
  std::int64_t best_blocks_ = 0;
  std::uint64_t states_ = 0;
};

}  // namespace

OracleResult oracle_optimal(const Scenario& scenario, Budget budget) {
  if (scenario.task_count() > kOracleMaxTasks || scenario.location_count() > kOracleMaxLocations ||
      budget.tb_b > kOracleMaxBlocks) {
    throw OracleGuardError("instance too large for exhaustive search (limit: " +
                           std::to_string(kOracleMaxTasks) + " tasks, " +
                           std::to_string(kOracleMaxLocations) + " locations, tb_b <= " +
                           std::to_string(kOracleMaxBlocks) + ")");
  }
  return Search(scenario, budget).run();
}

}  // namespace bodt
