#include <gtest/gtest.h>

#include <set>

#include "crewplan/duty_graph.hpp"
#include "crewplan/enumerate.hpp"
#include "test_support.hpp"

using namespace crewplan;
using testing_support::task;

namespace {

// All source-to-sink paths of the network as scenario task sequences.
std::vector<std::vector<int>> network_paths(const DutyNetwork& net) {
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  auto dfs = [&](auto&& self, int node) -> void {
    for (int a : net.out[node]) {
      const int to = net.arcs[a].to;
      if (to == net.sink()) {
        out.push_back(path);
        continue;
      }
      path.push_back(net.tasks[to]);
      self(self, to);
      path.pop_back();
    }
  };
  dfs(dfs, net.source());
  return out;
}

}  // namespace

TEST(BuildNetwork, TwoChainableTasks) {
  Instance inst;
  inst.crew_base = "B";
  inst.stations = {{"B", true, true}, {"X", false, false}};
  inst.templates = {{"T", "B", 300, 1200, false, 1}};
  inst.scenarios = {{"d", {task("A", "B", "X", 480, 540, "S"), task("B", "X", "B", 550, 600, "S")}}};
  auto net = build_network(inst, inst.scenarios[0], 0);
  ASSERT_EQ(net.size(), 2);
  ASSERT_EQ(net.arcs.size(), 3u);
  EXPECT_TRUE(net.has_source_arc(0));
  EXPECT_FALSE(net.has_source_arc(1));
  EXPECT_TRUE(net.has_sink_arc(1));
  EXPECT_EQ(net.connection_arc_count(), 1u);
}

TEST(BuildNetwork, ExcludesTasksOutsideWindow) {
  auto inst = testing_support::golden_instance();
  auto net = build_network(inst, inst.scenarios[0], 0);  // 06:00-15:30
  std::set<int> tasks(net.tasks.begin(), net.tasks.end());
  EXPECT_EQ(tasks, (std::set<int>{0, 1, 2, 3}));
  EXPECT_THROW(build_network(inst, inst.scenarios[0], 9), InputError);
}

TEST(BuildNetwork, ArcCountMatchesPairwiseOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = seed == 1 ? testing_support::golden_instance() : testing_support::random_instance(seed, 12);
    for (std::size_t p = 0; p < inst.templates.size(); ++p) {
      const auto& sc = inst.scenarios[0];
      auto net = build_network(inst, sc, static_cast<int>(p));
      const auto& t = inst.templates[p];
      std::size_t expected = 0;
      for (const auto& a : sc.tasks)
        for (const auto& b : sc.tasks) {
          if (&a == &b || !t.covers(a.start, a.end) || !t.covers(b.start, b.end)) continue;
          Scenario pair{"p", {a, b}};
          // Two-task sequences only violate chain or transition through the arc itself.
          auto r = sequence_feasible(inst, pair, {0, 1});
          if (!r.has(Violation::Chain) && !r.has(Violation::Transition)) ++expected;
        }
      EXPECT_EQ(net.connection_arc_count(), expected) << "seed " << seed << " template " << p;
    }
  }
}

TEST(BuildNetwork, TopologicalOrder) {
  auto inst = testing_support::random_instance(3, 15);
  auto net = build_network(inst, inst.scenarios[0], static_cast<int>(inst.templates.size()) - 1);
  for (const auto& a : net.arcs)
    if (a.from != net.source() && a.to != net.sink()) EXPECT_LT(a.from, a.to);
}

// Network paths that satisfy the resource rules are exactly the enumerated
// duties of the template.
TEST(BuildNetwork, PathDutyBijection) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    auto inst = seed == 1 ? testing_support::golden_instance() : testing_support::random_instance(seed, 10);
    for (const auto& sc : inst.scenarios)
      for (std::size_t p = 0; p < inst.templates.size(); ++p) {
        auto net = build_network(inst, sc, static_cast<int>(p));
        std::set<std::vector<int>> from_paths;
        for (auto& path : network_paths(net)) {
          auto d = make_duty(inst, sc, static_cast<int>(p), path);
          auto r = duty_feasible(inst, sc, d);
          EXPECT_FALSE(r.has(Violation::Chain) || r.has(Violation::Transition) || r.has(Violation::Window) ||
                       r.has(Violation::BaseStart) || r.has(Violation::BaseEnd));
          if (r.feasible) from_paths.insert(path);
        }
        std::set<std::vector<int>> enumerated;
        for (const auto& d : enumerate_template_duties(inst, sc, static_cast<int>(p))) enumerated.insert(d.tasks);
        EXPECT_EQ(from_paths, enumerated) << "seed " << seed << " template " << p;
      }
  }
}

TEST(ArcsActiveAt, HandTrace) {
  auto inst = testing_support::golden_instance();
  auto net = build_relaxed_network(inst, inst.scenarios[0]);
  EXPECT_TRUE(arcs_active_at(net, 100).empty());
  // 10:00 lies inside t1 only.
  auto inside = arcs_active_at(net, 500);
  ASSERT_EQ(inside.task_nodes.size(), 1u);
  EXPECT_EQ(net.tasks[inside.task_nodes[0]], 0);
  EXPECT_TRUE(inside.arcs.empty());
  // During 09:05 the crew waits at X after t1: toward t2 or toward t6.
  auto gap = arcs_active_at(net, 545);
  EXPECT_TRUE(gap.task_nodes.empty());
  std::set<std::pair<int, int>> spans;
  for (int a : gap.arcs) spans.insert({net.tasks[net.arcs[a].from], net.tasks[net.arcs[a].to]});
  EXPECT_EQ(spans, (std::set<std::pair<int, int>>{{0, 1}, {0, 5}}));
  // The two-task day has a single connecting arc.
  Instance two;
  two.crew_base = "B";
  two.stations = {{"B", true, true}, {"X", false, false}};
  two.templates = {{"T", "B", 300, 1200, false, 1}};
  two.scenarios = {{"d", {task("A", "B", "X", 480, 540, "S"), task("B", "X", "B", 550, 600, "S")}}};
  auto small = build_network(two, two.scenarios[0], 0);
  auto only = arcs_active_at(small, 545);
  ASSERT_EQ(only.arcs.size(), 1u);
  EXPECT_EQ(small.arcs[only.arcs[0]].from, 0);
  EXPECT_EQ(small.arcs[only.arcs[0]].to, 1);
}
