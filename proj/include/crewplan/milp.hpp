#pragma once

// Best-first branch and bound with plunging over the simplex in lp.hpp.
// Branches on the most fractional integer variable (ties: lowest index). After
// a branching the up child is solved next; the down child waits in the queue.
// Node LPs warm start from the parent basis through the dual simplex.

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "crewplan/lp.hpp"

namespace crewplan::lp {

struct MilpOptions {
  double time_limit = 1e30;     // seconds
  double gap_tolerance = 1e-9;  // relative
  long node_limit = -1;         // negative: unlimited
  Tolerances tol;
  std::optional<std::vector<double>> initial_solution;
  // Per-variable branching priority; fractional variables of the highest
  // priority are branched on first. Empty means all equal.
  std::vector<int> priority;
  // Optional branching rule over a node LP solution; returns a fractional
  // integer variable, or -1 to fall back to priority and fractionality.
  std::function<int(const std::vector<double>&)> select_branch;
  // Optional primal heuristic called on node LP solutions; returned points are
  // checked for feasibility before they are accepted.
  std::function<std::optional<std::vector<double>>(const std::vector<double>&)> heuristic;
};

inline LpSolution solve_milp(const LinearProgram& lp, const MilpOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - started).count(); };

  const bool maximize = lp.objective_sense == ObjectiveSense::Maximize;
  const double sense = maximize ? -1.0 : 1.0;  // internal minimisation

  if (!lp.has_integers()) {
    LpSolution s = solve_lp(lp);
    s.nodes = 1;
    return s;
  }

  SimplexSolver solver(lp);
  const int n = static_cast<int>(lp.variables.size());
  std::vector<int> int_vars;
  for (int j = 0; j < n; ++j)
    if (lp.variables[j].integer) int_vars.push_back(j);

  struct BoundChange {
    int var;
    double lower;
    double upper;
  };
  struct Node {
    long id;
    double bound;  // internal minimisation value of parent LP
    std::vector<BoundChange> changes;
    SimplexSolver::Basis basis;
  };
  struct Worse {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id < b.id;  // newer first on ties
    }
  };

  LpSolution best;
  best.status = Status::Infeasible;
  double incumbent = kInf;  // internal
  std::vector<double> incumbent_x;

  auto try_incumbent = [&](const std::vector<double>& x) {
    if (x.size() != static_cast<std::size_t>(n) || !lp.is_feasible(x, opt.tol)) return false;
    std::vector<double> xr = x;
    for (int j : int_vars) xr[j] = std::round(xr[j]);
    const double val = sense * lp.objective_value(xr);
    if (val < incumbent - 1e-12 * (1.0 + std::abs(val))) {
      incumbent = val;
      incumbent_x = std::move(xr);
      return true;
    }
    return false;
  };
  if (opt.initial_solution) try_incumbent(*opt.initial_solution);

  auto prune_threshold = [&]() {
    if (!std::isfinite(incumbent)) return kInf;
    return incumbent - std::max(1e-9, opt.gap_tolerance) * std::max(1.0, std::abs(incumbent));
  };

  std::priority_queue<Node, std::vector<Node>, Worse> open;
  open.push({0, -kInf, {}, {}});
  long next_id = 1;
  long nodes = 0;
  long iterations = 0;
  bool hit_limit = false;
  bool unbounded = false;
  std::vector<BoundChange> applied;

  std::optional<Node> plunge;

  while (plunge || !open.empty()) {
    if (elapsed() > opt.time_limit || (opt.node_limit >= 0 && nodes >= opt.node_limit)) {
      hit_limit = true;
      if (plunge) open.push(std::move(*plunge));
      break;
    }
    Node node;
    if (plunge) {
      node = std::move(*plunge);
      plunge.reset();
    } else {
      node = open.top();
      open.pop();
    }
    if (node.bound >= prune_threshold()) continue;
    ++nodes;

    for (const auto& c : applied) solver.set_column_bounds(c.var, lp.variables[c.var].lower, lp.variables[c.var].upper);
    for (const auto& c : node.changes) solver.set_column_bounds(c.var, c.lower, c.upper);
    applied = node.changes;
    if (!node.basis.head.empty()) solver.set_basis(node.basis);

    LpSolution rel = solver.solve();
    iterations += rel.iterations;
    if (rel.status == Status::Infeasible) continue;
    if (rel.status == Status::Unbounded) {
      unbounded = true;
      break;
    }
    const double value = sense * rel.objective;
    if (value >= prune_threshold()) continue;

    int branch = -1;
    double best_score = -1.0;
    int best_priority = 0;
    bool fractional = false;
    for (int j : int_vars) {
      const double f = rel.primal[j] - std::floor(rel.primal[j]);
      if (f > opt.tol.integrality && f < 1.0 - opt.tol.integrality) {
        fractional = true;
        break;
      }
    }
    if (fractional && opt.select_branch) branch = opt.select_branch(rel.primal);
    for (int j : int_vars) {
      if (!fractional || branch >= 0) break;
      const double f = rel.primal[j] - std::floor(rel.primal[j]);
      if (f <= opt.tol.integrality || f >= 1.0 - opt.tol.integrality) continue;
      const double score = 0.5 - std::abs(f - 0.5);
      const int pr = opt.priority.empty() ? 0 : opt.priority[j];
      if (branch < 0 || pr > best_priority || (pr == best_priority && score > best_score + 1e-12)) {
        best_score = score;
        best_priority = pr;
        branch = j;
      }
    }
    if (branch < 0) {
      try_incumbent(rel.primal);
      continue;
    }
    if (opt.heuristic) {
      if (auto cand = opt.heuristic(rel.primal)) try_incumbent(*cand);
    }
    const double xv = rel.primal[branch];
    auto basis = solver.basis();
    double cur_lo = lp.variables[branch].lower, cur_hi = lp.variables[branch].upper;
    for (const auto& c : node.changes)
      if (c.var == branch) {
        cur_lo = c.lower;
        cur_hi = c.upper;
      }
    auto child = [&](double lo, double hi) {
      Node ch{next_id++, value, node.changes, basis};
      bool merged = false;
      for (auto& c : ch.changes)
        if (c.var == branch) {
          c.lower = lo;
          c.upper = hi;
          merged = true;
        }
      if (!merged) ch.changes.push_back({branch, lo, hi});
      return ch;
    };
    open.push(child(cur_lo, std::floor(xv)));
    plunge = child(std::ceil(xv), cur_hi);
  }

  best.nodes = nodes;
  best.iterations = iterations;
  if (unbounded) {
    best.status = Status::Unbounded;
    return best;
  }
  double open_bound = kInf;
  if (hit_limit) {
    auto copy = open;
    while (!copy.empty()) {
      open_bound = std::min(open_bound, copy.top().bound);
      copy.pop();
    }
  }
  if (incumbent_x.empty()) {
    best.status = hit_limit ? Status::TimeLimitNoSolution : Status::Infeasible;
    best.bound = sense * open_bound;
    return best;
  }
  const double bound = std::min(incumbent, open_bound);
  best.primal = incumbent_x;
  best.objective = sense * incumbent;
  best.bound = sense * bound;
  best.gap = (incumbent - bound) / std::max(1e-9, std::abs(incumbent));
  if (best.gap < 0) best.gap = 0;
  best.status = (hit_limit && best.gap > opt.gap_tolerance) ? Status::TimeLimitFeasible : Status::Optimal;
  return best;
}

}  // namespace crewplan::lp
