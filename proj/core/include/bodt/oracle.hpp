#pragma once

#include <cstdint>
#include <limits>

#include "bodt/model.hpp"

namespace bodt {

// Exhaustive search is exponential, so the oracle only accepts instances
// with at most this many tasks, locations and budget blocks.
inline constexpr std::size_t kOracleMaxTasks = 6;
inline constexpr std::size_t kOracleMaxLocations = 3;
inline constexpr std::int64_t kOracleMaxBlocks = 3;

class OracleGuardError : public ModelError {
 public:
  using ModelError::ModelError;
};

struct OracleResult {
  bool feasible = false;
  double makespan = std::numeric_limits<double>::infinity();
  std::int64_t total_blocks = 0;
  Plan plan;
  std::uint64_t states_visited = 0;
};

// Minimal makespan over every task-to-VM assignment with VMs at any location
// and total blocks within budget. VMs are not capped at one block. Among
// equal makespans the plan with fewer blocks wins.
OracleResult oracle_optimal(const Scenario& scenario, Budget budget);

}  // namespace bodt
