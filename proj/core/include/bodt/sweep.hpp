#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bodt/model.hpp"
#include "bodt/simulator.hpp"

namespace bodt {

enum class Approach { kHeuristic, kCentralised, kRoundRobin };

std::string_view to_string(Approach a);
Approach parse_approach(std::string_view name);  // throws ModelError

struct SweepRow {
  std::int64_t tb_b = 0;
  Approach approach = Approach::kHeuristic;
  std::uint64_t seed = 0;
  double makespan_s = 0.0;  // simulated; NaN when no plan exists
  std::int64_t blocks = 0;  // simulated
  bool feasible = false;    // static plan exists and fits the budget

  friend bool operator==(const SweepRow& a, const SweepRow& b);
};

struct CellStats {
  std::int64_t tb_b;
  Approach approach;
  std::size_t runs = 0;
  std::size_t feasible_runs = 0;
  double mean_makespan = 0.0;
  double std_makespan = 0.0;  // sample standard deviation
  double mean_blocks = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // sorted by (tb_b, approach, seed)

  std::vector<CellStats> cells() const;
  std::optional<CellStats> cell(std::int64_t tb_b, Approach approach) const;
  // Smallest tb_b at which every run of the approach was feasible.
  std::optional<std::int64_t> min_feasible_tb_b(Approach approach) const;
};

// Plans every (tb_b, approach) once, then simulates it `repetitions` times
// with seeds config.seed, config.seed + 1, ... Baselines get as many VMs as
// the heuristic plan used (tb_b when the heuristic is infeasible).
SweepReport run_sweep(const Scenario& scenario, std::span<const std::int64_t> tb_values,
                      std::span<const Approach> approaches, const SimConfig& config,
                      int repetitions);

enum class ReportFormat { kCsv, kText };

// Header: tb_b,approach,seed,makespan_s,blocks,feasible
std::string report_csv(const SweepReport& report);
SweepReport parse_report_csv(std::string_view csv);
// Per-cell means and deviations, per-tb_b improvement of the heuristic over
// each baseline, and the minimum feasible tb_b of every approach.
std::string report_text(const SweepReport& report);

// (baseline - heuristic) / baseline on mean simulated makespan.
std::optional<double> improvement(const SweepReport& report, std::int64_t tb_b, Approach baseline);

void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace bodt
