#pragma once

// Lower bound V_t on the crew members on duty during [t, t+1]: a minimum cost
// flow on the relaxed duty network (no template window, length or break
// rules) that covers every task, charging one unit for each flow unit that
// occupies the interval.

#include <cmath>
#include <map>
#include <vector>

#include "crewplan/duty_graph.hpp"
#include "crewplan/lp.hpp"

namespace crewplan {

inline double compute_flow_bound(const DutyNetwork& relaxed, Minutes t) {
  const auto active = arcs_active_at(relaxed, t);
  if (active.empty()) return 0.0;
  const int n = relaxed.size();
  lp::LinearProgram m;
  std::vector<double> cost(relaxed.arcs.size(), 0.0);
  for (int a : active.arcs) cost[a] += 1.0;
  // A task in progress charges the flow leaving its node.
  for (int v : active.task_nodes)
    for (int a : relaxed.out[v]) cost[a] += 1.0;
  for (std::size_t a = 0; a < relaxed.arcs.size(); ++a) m.add_variable(0.0, lp::kInf, cost[a]);
  for (int v = 0; v < n; ++v) {
    std::vector<int> idx;
    std::vector<double> val;
    for (int a : relaxed.in[v]) {
      idx.push_back(a);
      val.push_back(1.0);
    }
    for (int a : relaxed.out[v]) {
      idx.push_back(a);
      val.push_back(-1.0);
    }
    m.add_constraint(idx, val, lp::Sense::Equal, 0.0);
    std::vector<int> in(relaxed.in[v].begin(), relaxed.in[v].end());
    m.add_constraint(in, std::vector<double>(in.size(), 1.0), lp::Sense::GreaterEqual, 1.0);
  }
  const auto sol = lp::solve_lp(m);
  if (sol.status != lp::Status::Optimal)
    throw SolveError("flow bound: relaxed network cannot cover every task (LP " + std::string(lp::to_string(sol.status)) +
                     ")");
  return sol.objective;
}

inline double compute_flow_bound(const Instance& inst, const Scenario& scenario, Minutes t) {
  return compute_flow_bound(build_relaxed_network(inst, scenario), t);
}

struct FlowBoundPoint {
  Minutes t = 0;
  int value = 0;
};

// V_t on a grid of `step` minutes over the scenario's working span; zero
// entries are omitted. Network LPs are integral, so values are rounded.
inline std::vector<FlowBoundPoint> flow_bound_sweep(const Instance& inst, const Scenario& scenario, Minutes step = 5) {
  std::vector<FlowBoundPoint> out;
  if (scenario.tasks.empty()) return out;
  Minutes lo = scenario.tasks.front().start, hi = scenario.tasks.front().end;
  for (const auto& k : scenario.tasks) {
    lo = std::min(lo, k.start);
    hi = std::max(hi, k.end);
  }
  const auto net = build_relaxed_network(inst, scenario);
  for (Minutes t = lo - ((lo % step) + step) % step; t < hi; t += step) {
    const double v = compute_flow_bound(net, t);
    const int r = static_cast<int>(std::ceil(v - 1e-6));
    if (r > 0) out.push_back({t, r});
  }
  return out;
}

struct ValidInequality {
  int scenario = 0;
  Minutes t = 0;
  std::vector<int> templates;  // P(t)
  double rhs = 0.0;            // V_t
};

inline std::vector<int> templates_covering(const Instance& inst, Minutes t) {
  std::vector<int> out;
  for (std::size_t p = 0; p < inst.templates.size(); ++p)
    if (inst.templates[p].earliest_start <= t && inst.templates[p].latest_end >= t + 1) out.push_back(static_cast<int>(p));
  return out;
}

// Rows sum_{p in P(t)} y_p + eta / c_E >= V_t for every scenario and grid
// time with V_t > 0.
inline std::vector<ValidInequality> valid_inequalities(const Instance& inst, Minutes step = 5) {
  std::vector<ValidInequality> rows;
  for (std::size_t s = 0; s < inst.scenarios.size(); ++s)
    for (const auto& pt : flow_bound_sweep(inst, inst.scenarios[s], step))
      rows.push_back({static_cast<int>(s), pt.t, templates_covering(inst, pt.t), static_cast<double>(pt.value)});
  return rows;
}

// Rows with the same template support keep only the largest right-hand side;
// the dropped rows are implied.
inline std::vector<ValidInequality> merge_valid_inequalities(std::vector<ValidInequality> rows) {
  std::map<std::vector<int>, std::size_t> best;
  std::vector<ValidInequality> out;
  for (auto& r : rows) {
    auto it = best.find(r.templates);
    if (it == best.end()) {
      best.emplace(r.templates, out.size());
      out.push_back(std::move(r));
    } else if (r.rhs > out[it->second].rhs) {
      out[it->second] = std::move(r);
    }
  }
  return out;
}

}  // namespace crewplan
