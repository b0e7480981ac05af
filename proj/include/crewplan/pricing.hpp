#pragma once

// Resource-constrained shortest path pricing on a duty network.
//
// Reduced cost of a duty d of template p:
//   cost_per_minute * length(d) - theta_p - sum_{k in d} lambda_k
// The exact labeller fixes the first task, which pins duty start and the
// length limit, and keeps labels (cost, stretch start) under dominance. The
// heuristic labeller runs all starts at once with a per-node label cap.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "crewplan/duty_graph.hpp"

namespace crewplan {

struct PricingOptions {
  int limit = 50;               // columns returned after filtering
  int pool_limit = 500;         // heuristic candidates kept before filtering
  int labels_per_node = 8;      // heuristic label cap
  double tol_rc = 1e-6;
  double cost_per_minute = 0.0;  // 60 in evaluation mode
  double disjointness = 0.5;
  bool dominance = true;  // exact labeller only; off gives plain enumeration
};

struct PricedColumn {
  Duty duty;
  double cost = 0.0;  // duty cost term (length cost, 0 in planning)
  double reduced_cost = 0.0;
};

namespace detail {

struct Label {
  double cost;  // -sum lambda so far
  Minutes stretch_start;
  Minutes duty_start;
  Minutes deadline;
  int node;
  int pred;
};

inline std::vector<int> label_path(const std::vector<Label>& pool, int id, const DutyNetwork& net) {
  std::vector<int> nodes;
  for (int l = id; l >= 0; l = pool[l].pred) nodes.push_back(pool[l].node);
  std::reverse(nodes.begin(), nodes.end());
  std::vector<int> tasks;
  tasks.reserve(nodes.size());
  for (int v : nodes) tasks.push_back(net.tasks[v]);
  return tasks;
}

inline bool better_column(double rc, const std::vector<int>& tasks, double best_rc, const std::vector<int>& best_tasks) {
  if (rc < best_rc - 1e-12) return true;
  if (rc > best_rc + 1e-12) return false;
  return best_tasks.empty() || tasks < best_tasks;
}

}  // namespace detail

// Minimum reduced-cost duty of the network, whatever its sign. Empty when the
// network admits no feasible duty.
inline std::optional<PricedColumn> price_exact(const Instance& inst, const Scenario& scenario, const DutyNetwork& net,
                                               double theta, const std::vector<double>& lambda,
                                               const PricingOptions& opt = {}) {
  using detail::Label;
  const int n = net.size();
  const Minutes stretch = inst.max_stretch_without_break;
  double best_rc = std::numeric_limits<double>::infinity();
  std::vector<int> best_tasks;
  std::vector<Label> pool;
  std::vector<std::vector<int>> at;

  auto insert = [&](int node, Label cand) {
    auto& list = at[node];
    if (!opt.dominance) {
      list.push_back(static_cast<int>(pool.size()));
      pool.push_back(cand);
      return;
    }
    for (int id : list)
      if (pool[id].cost <= cand.cost && pool[id].stretch_start >= cand.stretch_start) return;
    std::erase_if(list, [&](int id) {
      return cand.cost <= pool[id].cost && cand.stretch_start >= pool[id].stretch_start;
    });
    list.push_back(static_cast<int>(pool.size()));
    pool.push_back(cand);
  };

  for (int f = 0; f < n; ++f) {
    if (!net.has_source_arc(f)) continue;
    const Minutes ds = net.start[f] - inst.check_in;
    const Minutes deadline = ds + inst.max_duty_length(ds);
    if (net.end[f] + inst.check_out > deadline || net.end[f] - ds > stretch) continue;
    pool.clear();
    at.assign(n, {});
    insert(f, {-lambda[net.tasks[f]], ds, ds, deadline, f, -1});
    for (int j = f; j < n; ++j) {
      const std::vector<int> labels = at[j];
      for (int lid : labels) {
        const Label lab = pool[lid];
        for (int a : net.out[j]) {
          const NetworkArc& arc = net.arcs[a];
          if (arc.to == net.sink()) {
            const Minutes e = net.end[j] + inst.check_out;
            if (e > deadline || e - lab.stretch_start > stretch) continue;
            const double rc = opt.cost_per_minute * (e - ds) - theta + lab.cost;
            if (rc < best_rc + 1e-12) {
              auto tasks = detail::label_path(pool, lid, net);
              if (detail::better_column(rc, tasks, best_rc, best_tasks)) {
                best_rc = rc;
                best_tasks = std::move(tasks);
              }
            }
            continue;
          }
          const int l = arc.to;
          const Minutes ss = arc.break_eligible ? net.start[l] : lab.stretch_start;
          if (net.end[l] + inst.check_out > deadline || net.end[l] - ss > stretch) continue;
          insert(l, {lab.cost - lambda[net.tasks[l]], ss, ds, deadline, l, lid});
        }
      }
    }
  }
  if (best_tasks.empty()) return std::nullopt;
  PricedColumn col;
  col.duty = make_duty(inst, scenario, net.template_index, best_tasks);
  col.cost = opt.cost_per_minute * col.duty.length();
  col.reduced_cost = best_rc;
  return col;
}

// Negative reduced-cost duties found by a capped multi-start labeller, sorted
// by (reduced cost, task sequence). Not guaranteed to find the optimum.
inline std::vector<PricedColumn> price_heuristic(const Instance& inst, const Scenario& scenario, const DutyNetwork& net,
                                                 double theta, const std::vector<double>& lambda,
                                                 const PricingOptions& opt = {}) {
  using detail::Label;
  const int n = net.size();
  const Minutes stretch = inst.max_stretch_without_break;
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Completion bounds: cheapest remaining -lambda and earliest finish to sink.
  std::vector<double> completion(n, inf);
  std::vector<Minutes> finish(n, std::numeric_limits<Minutes>::max());
  for (int j = n - 1; j >= 0; --j)
    for (int a : net.out[j]) {
      const int to = net.arcs[a].to;
      if (to == net.sink()) {
        completion[j] = std::min(completion[j], 0.0);
        finish[j] = std::min(finish[j], net.end[j] + inst.check_out);
      } else if (completion[to] < inf) {
        completion[j] = std::min(completion[j], completion[to] - lambda[net.tasks[to]]);
        finish[j] = std::min(finish[j], finish[to]);
      }
    }

  std::vector<Label> pool;
  std::vector<std::vector<int>> at(n);
  const bool length_cost = opt.cost_per_minute != 0.0;
  auto dominates = [&](const Label& a, const Label& b) {
    return a.cost <= b.cost && a.stretch_start >= b.stretch_start && a.deadline >= b.deadline &&
           (!length_cost || a.duty_start >= b.duty_start);
  };
  auto promising = [&](const Label& lab) {
    return completion[lab.node] < inf && finish[lab.node] <= lab.deadline &&
           lab.cost + completion[lab.node] - theta < -opt.tol_rc;
  };
  auto insert = [&](int node, Label cand) {
    if (!promising(cand)) return;
    auto& list = at[node];
    for (int id : list)
      if (dominates(pool[id], cand)) return;
    std::erase_if(list, [&](int id) { return dominates(cand, pool[id]); });
    list.push_back(static_cast<int>(pool.size()));
    pool.push_back(cand);
  };

  for (int f = 0; f < n; ++f) {
    if (!net.has_source_arc(f)) continue;
    const Minutes ds = net.start[f] - inst.check_in;
    const Minutes deadline = ds + inst.max_duty_length(ds);
    if (net.end[f] + inst.check_out > deadline || net.end[f] - ds > stretch) continue;
    insert(f, {-lambda[net.tasks[f]], ds, ds, deadline, f, -1});
  }

  struct Found {
    double rc;
    std::vector<int> tasks;
  };
  std::vector<Found> found;
  for (int j = 0; j < n; ++j) {
    auto& list = at[j];
    std::stable_sort(list.begin(), list.end(), [&](int a, int b) { return pool[a].cost < pool[b].cost; });
    if (static_cast<int>(list.size()) > opt.labels_per_node) list.resize(opt.labels_per_node);
    const std::vector<int> labels = list;
    for (int lid : labels) {
      const Label lab = pool[lid];
      for (int a : net.out[j]) {
        const NetworkArc& arc = net.arcs[a];
        if (arc.to == net.sink()) {
          const Minutes e = net.end[j] + inst.check_out;
          if (e > lab.deadline || e - lab.stretch_start > stretch) continue;
          const double rc = opt.cost_per_minute * (e - lab.duty_start) - theta + lab.cost;
          if (rc < -opt.tol_rc) found.push_back({rc, detail::label_path(pool, lid, net)});
          continue;
        }
        const int l = arc.to;
        const Minutes ss = arc.break_eligible ? net.start[l] : lab.stretch_start;
        if (net.end[l] + inst.check_out > lab.deadline || net.end[l] - ss > stretch) continue;
        insert(l, {lab.cost - lambda[net.tasks[l]], ss, lab.duty_start, lab.deadline, l, lid});
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
    if (a.rc != b.rc) return a.rc < b.rc;
    return a.tasks < b.tasks;
  });
  std::vector<PricedColumn> out;
  for (auto& f : found) {
    if (!out.empty() && out.back().duty.tasks == f.tasks) continue;
    if (static_cast<int>(out.size()) >= opt.pool_limit) break;
    PricedColumn col;
    col.duty = make_duty(inst, scenario, net.template_index, std::move(f.tasks));
    col.cost = opt.cost_per_minute * col.duty.length();
    col.reduced_cost = f.rc;
    out.push_back(std::move(col));
  }
  return out;
}

// Greedy diversity filter: walks columns by increasing reduced cost and keeps
// one when it shares at most (1 - disjointness) of its tasks with every column
// kept so far.
inline std::vector<PricedColumn> filter_columns(std::vector<PricedColumn> columns, double disjointness, int limit) {
  std::stable_sort(columns.begin(), columns.end(), [](const PricedColumn& a, const PricedColumn& b) {
    if (a.reduced_cost != b.reduced_cost) return a.reduced_cost < b.reduced_cost;
    return a.duty < b.duty;
  });
  std::vector<PricedColumn> kept;
  std::vector<std::vector<int>> sorted_tasks;
  for (auto& c : columns) {
    if (static_cast<int>(kept.size()) >= limit) break;
    std::vector<int> mine = c.duty.tasks;
    std::sort(mine.begin(), mine.end());
    const double allowed = (1.0 - disjointness) * static_cast<double>(mine.size());
    bool ok = true;
    for (const auto& other : sorted_tasks) {
      std::vector<int> common;
      std::set_intersection(mine.begin(), mine.end(), other.begin(), other.end(), std::back_inserter(common));
      if (static_cast<double>(common.size()) > allowed + 1e-9) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    sorted_tasks.push_back(std::move(mine));
    kept.push_back(std::move(c));
  }
  return kept;
}

}  // namespace crewplan
