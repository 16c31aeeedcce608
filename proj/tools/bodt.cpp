// bodt: plan, simulate and sweep bag-of-distributed-tasks workloads.
//
// Exit codes: 0 success, 2 infeasible budget, 1 any other error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bodt/baselines.hpp"
#include "bodt/generator.hpp"
#include "bodt/io.hpp"
#include "bodt/oracle.hpp"
#include "bodt/planner.hpp"
#include "bodt/simulator.hpp"
#include "bodt/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    bodt::write_file(path, contents);
  }
}

std::vector<std::int64_t> parse_tb_list(const std::string& spec) {
  std::vector<std::int64_t> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string item = spec.substr(start, comma - start);
    if (!item.empty()) {
      // "a:b:step" ranges or single values
      const std::size_t c1 = item.find(':');
      if (c1 == std::string::npos) {
        out.push_back(std::stoll(item));
      } else {
        const std::size_t c2 = item.find(':', c1 + 1);
        const std::int64_t lo = std::stoll(item.substr(0, c1));
        const std::int64_t hi = std::stoll(item.substr(c1 + 1, c2 - c1 - 1));
        const std::int64_t step = c2 == std::string::npos ? 1 : std::stoll(item.substr(c2 + 1));
        if (step <= 0) throw bodt::ModelError("tb_b range step must be positive");
        for (std::int64_t v = lo; v <= hi; v += step) out.push_back(v);
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bodt::SimConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return bodt::parse_sim_config(bodt::read_file(path));
}

int cmd_gen(const std::string& params_path, const std::string& out, std::optional<std::uint64_t> seed) {
  bodt::GenParams p = params_path.empty() ? bodt::GenParams{}
                                          : bodt::parse_gen_params(bodt::read_file(params_path));
  if (seed) p.seed = *seed;
  emit(out, bodt::scenario_to_json(bodt::gen_scenario(p)));
  return kExitOk;
}

int cmd_plan(const std::string& scenario_path, std::optional<std::int64_t> tb_b,
             std::optional<double> money, const std::string& approach_name,
             std::optional<std::int64_t> n_vms, const std::string& out) {
  const bodt::Scenario scenario = bodt::parse_scenario(bodt::read_file(scenario_path));
  if (!tb_b && !money) throw bodt::ModelError("one of --tb-b or --budget is required");
  const bodt::Budget budget =
      tb_b ? bodt::Budget(*tb_b) : bodt::budget_to_blocks(*money, scenario.cost_model());
  const bodt::Approach approach = bodt::parse_approach(approach_name);

  const bodt::PlanOutcome heuristic = bodt::find_plan(scenario, budget);
  if (approach == bodt::Approach::kHeuristic) {
    if (!heuristic.feasible()) {
      emit(out, bodt::infeasible_plan_json(std::string(bodt::to_string(heuristic.reason)) + ": " +
                                           heuristic.detail));
      std::cerr << "infeasible: " << heuristic.detail << '\n';
      return kExitInfeasible;
    }
    emit(out, bodt::plan_to_json(*heuristic.plan, scenario, budget));
    return kExitOk;
  }

  const std::int64_t vms = n_vms ? *n_vms
                                 : heuristic.feasible()
                                       ? static_cast<std::int64_t>(heuristic.plan->vm_count())
                                       : budget.tb_b;
  const bodt::BaselinePlan baseline = approach == bodt::Approach::kCentralised
                                          ? bodt::centralised_plan(scenario, vms)
                                          : bodt::round_robin_plan(scenario, vms);
  emit(out, bodt::plan_to_json(baseline.plan, scenario, budget));
  const auto metrics = bodt::plan_metrics(baseline.plan, scenario);
  if (metrics.total_blocks > budget.tb_b) {
    std::cerr << "over budget: " << metrics.total_blocks << " blocks > tb_b " << budget.tb_b << '\n';
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& plan_path,
                 const std::string& config_path, std::optional<std::uint64_t> seed,
                 bool no_reassign, const std::string& json_out, const std::string& csv_out) {
  const bodt::Scenario scenario = bodt::parse_scenario(bodt::read_file(scenario_path));
  const bodt::Plan plan = bodt::parse_plan(bodt::read_file(plan_path), scenario);
  bodt::SimConfig config = load_config(config_path);
  if (seed) config.seed = *seed;
  if (no_reassign) config.reassignment_enabled = false;
  const bodt::SimResult result = bodt::simulate(plan, scenario, config);
  emit(json_out, bodt::sim_result_to_json(result));
  if (!csv_out.empty()) bodt::write_file(csv_out, bodt::events_to_csv(result));
  return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& tb_spec,
              const std::vector<std::string>& approach_names, const std::string& config_path,
              int repetitions, const std::string& csv_out, const std::string& text_out) {
  const bodt::Scenario scenario = bodt::parse_scenario(bodt::read_file(scenario_path));
  std::vector<bodt::Approach> approaches;
  for (const auto& a : approach_names) approaches.push_back(bodt::parse_approach(a));
  const auto tb_values = parse_tb_list(tb_spec);
  const bodt::SweepReport report =
      bodt::run_sweep(scenario, tb_values, approaches, load_config(config_path), repetitions);
  if (!csv_out.empty()) bodt::emit_report(report, bodt::ReportFormat::kCsv, csv_out);
  if (!text_out.empty()) {
    bodt::emit_report(report, bodt::ReportFormat::kText, text_out);
  } else if (csv_out.empty() || csv_out != "-") {
    std::cout << bodt::report_text(report);
  }
  return kExitOk;
}

int cmd_oracle(const std::string& scenario_path, std::int64_t tb_b, const std::string& out) {
  const bodt::Scenario scenario = bodt::parse_scenario(bodt::read_file(scenario_path));
  const bodt::OracleResult r = bodt::oracle_optimal(scenario, bodt::Budget(tb_b));
  if (!r.feasible) {
    emit(out, bodt::infeasible_plan_json("no plan fits the budget"));
    return kExitInfeasible;
  }
  emit(out, bodt::plan_to_json(r.plan, scenario, bodt::Budget(tb_b)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-constrained planning and simulation for bags of distributed tasks"};
  app.require_subcommand(1);

  std::string params_path, out, scenario_path, plan_path, config_path, approach = "heuristic";
  std::string json_out, csv_out, text_out, tb_spec = "4:20:2";
  std::vector<std::string> approaches{"heuristic", "centralised", "round_robin"};
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> tb_b, n_vms;
  std::optional<double> money;
  std::int64_t oracle_tb = 1;
  int repetitions = 3;
  bool no_reassign = false;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic geo-clustered scenario");
  gen->add_option("--params", params_path, "Generator parameters (JSON); defaults when omitted")
      ->check(CLI::ExistingFile);
  gen->add_option("--seed", seed, "Override the seed in the parameter file");
  gen->add_option("-o,--out", out, "Scenario output file (stdout when omitted)");

  auto* plan = app.add_subcommand("plan", "Build an execution plan for a budget");
  plan->add_option("-s,--scenario", scenario_path, "Scenario file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* tb_opt = plan->add_option("--tb-b", tb_b, "Allowed number of billing blocks");
  plan->add_option("--budget", money, "Budget in currency; converted with the block price")
      ->excludes(tb_opt);
  plan->add_option("-a,--approach", approach, "heuristic | centralised | round_robin")
      ->check(CLI::IsMember({"heuristic", "centralised", "round_robin"}));
  plan->add_option("--n-vms", n_vms, "VM count for baselines (default: the heuristic's count)");
  plan->add_option("-o,--out", out, "Plan output file (stdout when omitted)");

  auto* sim = app.add_subcommand("simulate", "Execute a plan in the discrete-event simulator");
  sim->add_option("-s,--scenario", scenario_path, "Scenario file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("-p,--plan", plan_path, "Plan file (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("-c,--config", config_path, "Simulation config (JSON)")->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "Override the config seed");
  sim->add_flag("--no-reassign", no_reassign, "Disable dynamic reassignment");
  sim->add_option("--json", json_out, "Result JSON (stdout when omitted)");
  sim->add_option("--csv", csv_out, "Event log CSV");

  auto* sweep = app.add_subcommand("sweep", "Compare approaches over a list of budgets");
  sweep->add_option("-s,--scenario", scenario_path, "Scenario file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--tb-b", tb_spec, "Budgets: comma list and/or lo:hi:step ranges")
      ->capture_default_str();
  sweep->add_option("-a,--approaches", approaches, "Approaches to run")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("-c,--config", config_path, "Simulation config (JSON)")->check(CLI::ExistingFile);
  sweep->add_option("-r,--repetitions", repetitions, "Simulation runs per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--csv", csv_out, "Row-level CSV report");
  sweep->add_option("--text", text_out, "Text summary (stdout when omitted)");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimal plan for a tiny scenario");
  oracle->add_option("-s,--scenario", scenario_path, "Scenario file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  oracle->add_option("--tb-b", oracle_tb, "Allowed number of billing blocks")->required();
  oracle->add_option("-o,--out", out, "Plan output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*gen) return cmd_gen(params_path, out, seed);
    if (*plan) return cmd_plan(scenario_path, tb_b, money, approach, n_vms, out);
    if (*sim) return cmd_simulate(scenario_path, plan_path, config_path, seed, no_reassign, json_out,
                                  csv_out);
    if (*sweep) {
      return cmd_sweep(scenario_path, tb_spec, approaches, config_path, repetitions, csv_out,
                       text_out);
    }
    if (*oracle) return cmd_oracle(scenario_path, oracle_tb, out);
  } catch (const bodt::InfeasibleBudgetError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
