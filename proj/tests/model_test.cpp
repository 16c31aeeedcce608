#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bodt/io.hpp"
#include "bodt/model.hpp"
#include "fixtures.hpp"

using namespace bodt;
using bodt::testing::canonical_scenario;
using bodt::testing::make_scenario;

namespace {

CostModel simple_cm(double comp, double startup) {
  CostModel cm;
  cm.transfer = {{"s1", {{"A", 1.0}}}, {"s2", {{"B", 0.0}}}};
  cm.comp = comp;
  cm.startup = startup;
  return cm;
}

}  // namespace

TEST_CASE("exec_time is (trans + comp) * size") {
  CostModel cm = simple_cm(1.0, 0.0);
  CHECK(exec_time(Task("t", 10, "s1"), {"A", ""}, cm) == doctest::Approx(20.0));
  cm.comp = 2.0;
  CHECK(exec_time(Task("t", 7, "s2"), {"B", ""}, cm) == doctest::Approx(14.0));
}

TEST_CASE("task size must be positive") {
  CHECK_THROWS_AS(Task("t", 0, "s1"), ModelError);
  CHECK_THROWS_AS(Task("t", -3, "s1"), ModelError);
}

TEST_CASE("exec_time on a missing matrix entry is an error") {
  CostModel cm = simple_cm(1.0, 0.0);
  CHECK_THROWS_AS(exec_time(Task("t", 1, "s1"), {"B", ""}, cm), ModelError);
}

TEST_CASE("vm_exec_time adds startup only for a used VM") {
  // s1 at A: trans 1 + comp 1 -> 2 s/unit
  CostModel cm = simple_cm(1.0, 10.0);
  const VmInstance vm{"A-0", "A"};
  CHECK(vm_exec_time(std::vector<Task>{}, vm, cm) == 0.0);
  std::vector<Task> one{Task("t1", 10, "s1")};
  CHECK(vm_exec_time(one, vm, cm) == doctest::Approx(30.0));
  std::vector<Task> two{Task("t1", 10, "s1"), Task("t2", 30, "s1")};
  CHECK(vm_exec_time(two, vm, cm) == doctest::Approx(90.0));
}

TEST_CASE("time_blocks rounds up with a tolerance at the boundary") {
  CostModel cm;
  CHECK(time_blocks(0.0, cm) == 0);
  CHECK(time_blocks(3600.0, cm) == 1);
  CHECK(time_blocks(3600.0 + 1e-12, cm) == 1);
  CHECK(time_blocks(3601.0, cm) == 2);
  CHECK(time_blocks(0.5, cm) == 1);
  CHECK(time_blocks(7200.0, cm) == 2);
}

TEST_CASE("time_blocks is monotone and covers its input") {
  CostModel cm;
  cm.block_seconds = 50.0;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 1000.0);
  for (int i = 0; i < 2000; ++i) {
    double a = d(rng), b = d(rng);
    if (a > b) std::swap(a, b);
    CHECK(time_blocks(a, cm) <= time_blocks(b, cm));
    CHECK(static_cast<double>(time_blocks(b, cm)) * cm.block_seconds >= b - kTimeEpsilon);
  }
}

TEST_CASE("plan_metrics on small hand plans") {
  // s1 at A: 1 s/unit with comp 0 and startup 0, so size = seconds.
  const Scenario sc = make_scenario({{"s1", {{"A", 1.0}}}},
                                    {{"a", 90, "s1"}, {"b", 60, "s1"}, {"c", 3700, "s1"}}, 0.0, 0.0);
  const Plan two({{{"vmA", "A"}, {"a"}}, {{"vmB", "A"}, {"b"}}, {{"vmC", "A"}, {"c"}}});
  const auto m = plan_metrics(two, sc);
  CHECK(m.makespan == doctest::Approx(3700.0));
  CHECK(m.total_blocks == 4);

  const Scenario sc2 = make_scenario({{"s1", {{"A", 1.0}}}}, {{"a", 90, "s1"}, {"b", 60, "s1"}},
                                     0.0, 0.0);
  const auto m2 = plan_metrics(Plan({{{"vmA", "A"}, {"a"}}, {{"vmB", "A"}, {"b"}}}), sc2);
  CHECK(m2.makespan == doctest::Approx(90.0));
  CHECK(m2.total_blocks == 2);
}

TEST_CASE("plan_metrics on the canonical fixture matches a hand expansion") {
  const Scenario sc = canonical_scenario();
  // A-0: startup 10 + t1 (1+1)*10 + t2 (1+1)*20 = 70
  // B-0: startup 10 + t3 (0.5+1)*8 + t4 (0.5+1)*30 = 67
  const Plan p({{{"A-0", "A"}, {"t1", "t2"}}, {{"B-0", "B"}, {"t3", "t4"}}});
  const auto m = plan_metrics(p, sc);
  REQUIRE(m.per_vm.size() == 2);
  CHECK(m.per_vm[0].exec_seconds == doctest::Approx(70.0));
  CHECK(m.per_vm[1].exec_seconds == doctest::Approx(67.0));
  CHECK(m.makespan == doctest::Approx(70.0));
  CHECK(m.total_blocks == 2);
}

TEST_CASE("validate_plan reports missing and duplicated tasks") {
  const Scenario sc = canonical_scenario();
  CHECK(validate_plan(Plan({{{"A-0", "A"}, {"t1", "t2"}}, {{"B-0", "B"}, {"t3", "t4"}}}), sc).ok());

  const auto missing = validate_plan(Plan({{{"A-0", "A"}, {"t1", "t2", "t4"}}}), sc);
  CHECK_FALSE(missing.ok());
  CHECK(missing.missing == std::vector<std::string>{"t3"});

  const auto dup =
      validate_plan(Plan({{{"A-0", "A"}, {"t1", "t2"}}, {{"B-0", "B"}, {"t2", "t3", "t4"}}}), sc);
  CHECK(dup.duplicate == std::vector<std::string>{"t2"});

  const auto unknown = validate_plan(Plan({{{"Z-0", "Z"}, {"t1", "t2", "t3", "t4", "t9"}}}), sc);
  CHECK(unknown.unknown_tasks == std::vector<std::string>{"t9"});
  CHECK(unknown.unknown_locations == std::vector<std::string>{"Z"});

  CHECK(validate_plan(Plan(), sc).empty_plan);
  CHECK_THROWS_AS(plan_metrics(Plan(), sc), PlanValidationError);
}

TEST_CASE("validate_plan is ok exactly when every task is placed once") {
  const Scenario sc = canonical_scenario();
  std::mt19937_64 rng(5);
  const std::vector<std::string> ids{"t1", "t2", "t3", "t4", "t5"};  // t5 is unknown
  std::uniform_int_distribution<int> count(0, 2), vm(0, 2), use_unknown(0, 9);
  for (int round = 0; round < 500; ++round) {
    std::vector<VmAssignment> entries{{{"A-0", "A"}, {}}, {{"A-1", "A"}, {}}, {{"B-0", "B"}, {}}};
    std::multiset<std::string> placed;
    for (const auto& id : ids) {
      const int n = id == "t5" ? (use_unknown(rng) == 0) : count(rng);
      for (int k = 0; k < n; ++k) {
        entries[vm(rng)].tasks.push_back(id);
        placed.insert(id);
      }
    }
    const bool expect = placed == std::multiset<std::string>{"t1", "t2", "t3", "t4"};
    CHECK(validate_plan(Plan(entries), sc).ok() == expect);
  }
}

TEST_CASE("vm_exec_time does not depend on task order") {
  const Scenario sc = canonical_scenario();
  std::vector<std::string> ids{"t1", "t2", "t3", "t4"};
  const double base = vm_exec_time(ids, {"A-0", "A"}, sc);
  std::sort(ids.begin(), ids.end());
  do {
    CHECK(vm_exec_time(ids, {"A-0", "A"}, sc) == doctest::Approx(base).epsilon(1e-12));
  } while (std::next_permutation(ids.begin(), ids.end()));
}

TEST_CASE("exec_time never drops below the compute share") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const Scenario sc = bodt::testing::random_tiny_scenario(rng);
    for (std::size_t t = 0; t < sc.task_count(); ++t) {
      for (std::size_t l = 0; l < sc.location_count(); ++l) {
        CHECK(sc.exec_seconds(t, l) >= sc.cost_model().comp * sc.tasks()[t].size);
        CHECK(sc.exec_seconds(t, l) ==
              exec_time(sc.tasks()[t], sc.locations()[l], sc.cost_model()));
      }
    }
  }
}

TEST_CASE("plan_metrics aggregates are max and sum of the per-VM values") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const Scenario sc = bodt::testing::random_tiny_scenario(rng);
    std::vector<VmAssignment> entries;
    std::uniform_int_distribution<std::size_t> loc(0, sc.location_count() - 1), slot(0, 2);
    for (const auto& t : sc.tasks()) {
      const std::string l = sc.locations()[loc(rng)].id;
      const std::string id = l + "-" + std::to_string(slot(rng));
      auto it = std::find_if(entries.begin(), entries.end(), [&](auto& e) { return e.vm.id == id; });
      if (it == entries.end()) {
        entries.push_back({{id, l}, {}});
        it = entries.end() - 1;
      }
      it->tasks.push_back(t.id);
    }
    const Plan p(entries);
    const auto m = plan_metrics(p, sc);
    double mx = 0.0;
    std::int64_t sum = 0;
    for (const auto& e : p.entries()) {
      double x = sc.cost_model().startup;
      for (const auto& t : e.tasks) {
        const auto& task = sc.tasks()[sc.task_index(t)];
        x += (sc.cost_model().transfer.at(task.source).at(e.vm.location) + sc.cost_model().comp) *
             task.size;
      }
      mx = std::max(mx, x);
      sum += static_cast<std::int64_t>(std::ceil(x / sc.cost_model().block_seconds - 1e-12));
    }
    CHECK(m.makespan == doctest::Approx(mx));
    CHECK(m.total_blocks == sum);
    CHECK(plan_metrics(p, sc).makespan == m.makespan);
  }
}

TEST_CASE("budget_to_blocks floors and rejects a sub-block budget") {
  CostModel cm;
  CHECK(budget_to_blocks(4.0, cm).tb_b == 4);
  CHECK(budget_to_blocks(4.5, cm).tb_b == 4);
  CHECK_THROWS_AS(budget_to_blocks(0.5, cm), InfeasibleBudgetError);
  CHECK_THROWS_AS(Budget(0), InfeasibleBudgetError);
  cm.block_price = 0.25;
  CHECK(budget_to_blocks(1.0, cm).tb_b == 4);
}

TEST_CASE("natural VM id order") {
  CHECK(vm_id_less("A-2", "A-10"));
  CHECK_FALSE(vm_id_less("A-10", "A-2"));
  CHECK(vm_id_less("A-9", "B-0"));
  CHECK_FALSE(vm_id_less("A-1", "A-1"));
  CHECK(vm_id_less("L01-3", "L02-0"));
}

TEST_CASE("scenario validation") {
  SUBCASE("source missing from the matrix") {
    CHECK_THROWS_AS(make_scenario({{"s1", {{"A", 1.0}}}}, {{"t1", 1, "s9"}}, 0, 0), ModelError);
  }
  SUBCASE("matrix not total") {
    CHECK_THROWS_AS(make_scenario({{"s1", {{"A", 1.0}}}, {"s2", {{"B", 1.0}}}}, {{"t1", 1, "s1"}},
                                  0, 0),
                    ModelError);
  }
  SUBCASE("negative rate") {
    CHECK_THROWS_AS(make_scenario({{"s1", {{"A", -1.0}}}}, {{"t1", 1, "s1"}}, 0, 0), ModelError);
  }
  SUBCASE("duplicate task id") {
    CHECK_THROWS_AS(make_scenario({{"s1", {{"A", 1.0}}}}, {{"t1", 1, "s1"}, {"t1", 2, "s1"}}, 0, 0),
                    ModelError);
  }
  SUBCASE("no tasks") {
    CHECK_THROWS_AS(make_scenario({{"s1", {{"A", 1.0}}}}, {}, 0, 0), ModelError);
  }
}

TEST_CASE("scenario JSON round-trips and rejects unknown keys") {
  const Scenario sc = canonical_scenario();
  const std::string text = scenario_to_json(sc);
  const Scenario back = parse_scenario(text);
  CHECK(scenario_to_json(back) == text);
  CHECK(back.fingerprint() == sc.fingerprint());

  std::string bad = text;
  bad.insert(bad.find('{') + 1, "\"extra\": 1,");
  CHECK_THROWS_AS(parse_scenario(bad), ModelError);
  CHECK_THROWS_AS(parse_scenario("{not json"), ModelError);
  CHECK_THROWS_AS(
      parse_scenario(R"({"locations":[{"id":"A","colour":"red"}],"sources":[],"tasks":[],)"
                     R"("cost_model":{"comp":0,"startup":0,"transfer":{}}})"),
      ModelError);
}

TEST_CASE("plan JSON round-trips and carries the scenario reference") {
  const Scenario sc = canonical_scenario();
  const Plan p({{{"A-0", "A"}, {"t1", "t2"}}, {{"B-0", "B"}, {"t3", "t4"}}});
  const std::string text = plan_to_json(p, sc, Budget(2));
  CHECK(text.find("\"feasible\": true") != std::string::npos);
  CHECK(parse_plan(text, sc) == p);
  CHECK(plan_to_json(p, sc, Budget(1)).find("\"feasible\": false") != std::string::npos);

  const Scenario other = make_scenario({{"s1", {{"A", 1.0}}}}, {{"t1", 1, "s1"}}, 0, 0);
  CHECK_THROWS_AS(parse_plan(text, other), ModelError);
  CHECK_THROWS_AS(parse_plan(infeasible_plan_json("nope"), sc), ModelError);
  CHECK_THROWS_AS(parse_plan(R"({"vms":{"A-0":{"location":"A","tasks":["t1"]}}})", sc),
                  PlanValidationError);
}

TEST_CASE("plan drops empty VMs and orders entries by natural VM id") {
  const Plan p({{{"A-10", "A"}, {"t1"}}, {{"A-2", "A"}, {"t2"}}, {{"A-3", "A"}, {}}});
  REQUIRE(p.vm_count() == 2);
  CHECK(p.entries()[0].vm.id == "A-2");
  CHECK(p.entries()[1].vm.id == "A-10");
  CHECK(p.find("A-3") == nullptr);
}
