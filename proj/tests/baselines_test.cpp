#include <doctest.h>

#include <algorithm>
#include <random>

#include "bodt/baselines.hpp"
#include "bodt/generator.hpp"
#include "fixtures.hpp"

using namespace bodt;
using bodt::testing::canonical_scenario;
using bodt::testing::make_scenario;

TEST_CASE("centralised picks the location nearest to all data") {
  const Scenario sc = make_scenario({{"s1", {{"A", 0.1}, {"B", 2.0}}}, {"s2", {{"A", 0.2}, {"B", 1.0}}}},
                                    {{"t1", 5, "s1"}, {"t2", 5, "s2"}}, 0.0, 0.0);
  CHECK(rank_locations(sc).order == std::vector<std::string>{"A", "B"});
  const auto bp = centralised_plan(sc, 2);
  for (const auto& e : bp.plan.entries()) CHECK(e.vm.location == "A");
}

TEST_CASE("location ranking ties go to the lowest id") {
  const Scenario sc = make_scenario({{"s1", {{"C", 1.0}, {"B", 1.0}, {"A", 1.0}}}},
                                    {{"t1", 5, "s1"}}, 0.0, 0.0);
  CHECK(rank_locations(sc).order == std::vector<std::string>{"A", "B", "C"});
  CHECK(centralised_plan(sc, 1).plan.entries()[0].vm.location == "A");
}

TEST_CASE("location ranking matches an independent scan") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams p;
    p.seed = seed;
    const Scenario sc = gen_scenario(p);
    std::vector<std::pair<double, std::string>> cost;
    for (const auto& l : sc.locations()) {
      double c = 0.0;
      for (const auto& t : sc.tasks()) c += sc.cost_model().transfer.at(t.source).at(l.id) * t.size;
      cost.emplace_back(c, l.id);
    }
    std::sort(cost.begin(), cost.end());
    std::vector<std::string> expect;
    for (const auto& [_, id] : cost) expect.push_back(id);
    CHECK(rank_locations(sc).order == expect);
  }
}

TEST_CASE("location ranking ignores task order") {
  const Scenario a = canonical_scenario();
  const Scenario b = make_scenario({{"s1", {{"A", 1.0}, {"B", 4.0}}}, {"s2", {{"A", 3.0}, {"B", 0.5}}}},
                                   {{"t4", 30, "s2"}, {"t3", 8, "s2"}, {"t2", 20, "s1"}, {"t1", 10, "s1"}},
                                   1.0, 10.0);
  CHECK(rank_locations(a).order == rank_locations(b).order);
}

TEST_CASE("round robin deals VMs in circular ranking order") {
  const Scenario sc = make_scenario({{"s1", {{"A", 1.0}, {"B", 2.0}, {"C", 3.0}}}},
                                    {{"t1", 5, "s1"}, {"t2", 5, "s1"}, {"t3", 5, "s1"}, {"t4", 5, "s1"},
                                     {"t5", 5, "s1"}},
                                    0.0, 0.0);
  const auto bp = round_robin_plan(sc, 5);
  std::vector<std::string> ids;
  for (const auto& e : bp.plan.entries()) ids.push_back(e.vm.id);
  // With the one-block cap every task prefers A; A-0 and A-1 take them all.
  CHECK(ids == std::vector<std::string>{"A-0", "A-1"});
  CHECK(bp.plan.find("A-0")->tasks.size() == 3);
}

TEST_CASE("round robin on the canonical fixture follows the assign trace") {
  // Ranking: A costs 10+20+24+90 = 144, B costs 40+80+4+15 = 139, so B first.
  // VMs B-0, A-0, B-1, A-1. Tasks by nearest exec desc: t4 45, t2 40, t1 20, t3 12.
  // t4 -> B-0, t2 -> A-0, t1 -> A-1 (A tie, lower load), t3 -> B-1.
  const Scenario sc = canonical_scenario();
  CHECK(rank_locations(sc).order == std::vector<std::string>{"B", "A"});
  const auto bp = round_robin_plan(sc, 4);
  CHECK_FALSE(bp.cap_lifted);
  const Plan expect({{{"A-0", "A"}, {"t2"}}, {{"A-1", "A"}, {"t1"}}, {{"B-0", "B"}, {"t4"}},
                     {{"B-1", "B"}, {"t3"}}});
  CHECK(bp.plan == expect);
}

TEST_CASE("round robin with one VM equals centralised with one VM") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GenParams p;
    p.seed = seed;
    const Scenario sc = gen_scenario(p);
    CHECK(round_robin_plan(sc, 1).plan == centralised_plan(sc, 1).plan);
  }
  CHECK(round_robin_plan(canonical_scenario(), 1).plan ==
        centralised_plan(canonical_scenario(), 1).plan);
}

TEST_CASE("baselines lift the block cap rather than fail") {
  const Scenario sc =
      make_scenario({{"s1", {{"A", 1.0}}}}, {{"t1", 80, "s1"}, {"t2", 80, "s1"}}, 0.0, 0.0, 100.0);
  const auto bp = centralised_plan(sc, 1);
  CHECK(bp.cap_lifted);
  CHECK(validate_plan(bp.plan, sc).ok());
  CHECK(plan_metrics(bp.plan, sc).total_blocks == 2);
  CHECK_THROWS_AS(centralised_plan(sc, 0), ModelError);
  CHECK_THROWS_AS(round_robin_plan(sc, 0), ModelError);
}

TEST_CASE("baseline plans are always valid") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 300; ++i) {
    const Scenario sc = bodt::testing::random_tiny_scenario(rng);
    for (std::int64_t n = 1; n <= 4; ++n) {
      CHECK(validate_plan(centralised_plan(sc, n).plan, sc).ok());
      CHECK(validate_plan(round_robin_plan(sc, n).plan, sc).ok());
    }
  }
}
