#pragma once

// Extensive form of the template selection model over all enumerated duties.
//
//   min  sum_p c_p y_p + eta
//   y_p <= C z_p,  sum_p z_p <= Gamma,  rostering rows on y
//   per scenario s:  c_E sum_p v_p^s <= eta
//                    sum_{d in p} x_d^s <= y_p + v_p^s
//                    sum_{d ni k} x_d^s >= 1
//
// Exponential in instance size; an oracle for small instances.

#include <vector>

#include "crewplan/enumerate.hpp"
#include "crewplan/flow_bound.hpp"
#include "crewplan/branching.hpp"
#include "crewplan/milp.hpp"
#include "crewplan/report.hpp"

namespace crewplan {

struct ExtensiveOptions {
  bool integer_templates = true;  // y, z
  bool integer_duties = true;     // x
  bool valid_inequalities = false;
  Minutes vi_step = 5;
  double time_limit = 1e30;
};

struct ExtensiveModel {
  lp::LinearProgram lp;
  std::vector<int> y, z;
  int eta = -1;
  int total = -1;  // sum of y, branched on first
  std::vector<std::vector<Duty>> duties;   // per scenario
  std::vector<std::vector<int>> x;         // per scenario, per duty
  std::vector<std::vector<int>> v;         // per scenario, per template
};

inline ExtensiveModel build_extensive(const Instance& inst, const ExtensiveOptions& opt = {}) {
  inst.validate();
  ExtensiveModel em;
  auto& m = em.lp;
  const int P = static_cast<int>(inst.templates.size());
  for (int p = 0; p < P; ++p)
    em.y.push_back(m.add_variable(0, inst.capacity_bound, inst.templates[p].cost, opt.integer_templates,
                                  "y_" + inst.templates[p].id));
  for (int p = 0; p < P; ++p)
    em.z.push_back(m.add_variable(0, 1, 0.0, opt.integer_templates, "z_" + inst.templates[p].id));
  em.eta = m.add_variable(0, lp::kInf, 1.0, false, "eta");
  em.total = m.add_variable(0, static_cast<double>(inst.capacity_bound) * P, 0.0, opt.integer_templates, "total");
  {
    std::vector<int> idx = em.y;
    std::vector<double> val(P, 1.0);
    idx.push_back(em.total);
    val.push_back(-1.0);
    m.add_constraint(idx, val, lp::Sense::Equal, 0.0, "total");
  }
  for (int p = 0; p < P; ++p)
    m.add_constraint({em.y[p], em.z[p]}, {1.0, -static_cast<double>(inst.capacity_bound)}, lp::Sense::LessEqual, 0.0);
  m.add_constraint(em.z, std::vector<double>(P, 1.0), lp::Sense::LessEqual, inst.gamma, "gamma");
  for (const auto& r : inst.rostering_constraints) m.add_constraint(em.y, r.coefficients, lp::Sense::LessEqual, r.rhs, r.label);

  for (std::size_t s = 0; s < inst.scenarios.size(); ++s) {
    const auto& sc = inst.scenarios[s];
    em.duties.push_back(enumerate_duties(inst, sc));
    const auto& ds = em.duties.back();
    std::vector<int> xs, vs;
    for (std::size_t d = 0; d < ds.size(); ++d) xs.push_back(m.add_variable(0, lp::kInf, 0.0, opt.integer_duties));
    for (int p = 0; p < P; ++p) vs.push_back(m.add_variable(0, lp::kInf, 0.0));
    std::vector<int> idx = vs;
    std::vector<double> val(P, inst.excess_cost);
    idx.push_back(em.eta);
    val.push_back(-1.0);
    m.add_constraint(idx, val, lp::Sense::LessEqual, 0.0);
    std::vector<std::vector<int>> by_template(P), by_task(sc.tasks.size());
    for (std::size_t d = 0; d < ds.size(); ++d) {
      by_template[ds[d].template_index].push_back(xs[d]);
      for (int k : ds[d].tasks) by_task[k].push_back(xs[d]);
    }
    for (int p = 0; p < P; ++p) {
      std::vector<int> i = by_template[p];
      std::vector<double> c(i.size(), 1.0);
      i.push_back(em.y[p]);
      c.push_back(-1.0);
      i.push_back(vs[p]);
      c.push_back(-1.0);
      m.add_constraint(i, c, lp::Sense::LessEqual, 0.0);
    }
    for (std::size_t k = 0; k < sc.tasks.size(); ++k) {
      if (by_task[k].empty())
        throw InputError("task " + sc.tasks[k].id + " in scenario " + sc.id + " is not covered by any feasible duty");
      m.add_constraint(by_task[k], std::vector<double>(by_task[k].size(), 1.0), lp::Sense::GreaterEqual, 1.0);
    }
    em.x.push_back(std::move(xs));
    em.v.push_back(std::move(vs));
  }
  if (opt.valid_inequalities) {
    for (const auto& vi : merge_valid_inequalities(valid_inequalities(inst, opt.vi_step))) {
      std::vector<int> idx;
      for (int p : vi.templates) idx.push_back(em.y[p]);
      std::vector<double> val(idx.size(), 1.0);
      idx.push_back(em.eta);
      val.push_back(1.0 / inst.excess_cost);
      m.add_constraint(idx, val, lp::Sense::GreaterEqual, vi.rhs, "vi");
    }
  }
  return em;
}

struct ExtensiveResult {
  lp::LpSolution solution;
  SolveReport report;
};

inline ExtensiveResult solve_extensive(const Instance& inst, const ExtensiveOptions& opt = {}) {
  auto em = build_extensive(inst, opt);
  lp::MilpOptions mo;
  mo.time_limit = opt.time_limit;
  mo.select_branch = template_branch_rule(em.total, em.y, em.z, inst.gamma);
  ExtensiveResult out;
  out.solution = lp::solve_milp(em.lp, mo);
  const auto& sol = out.solution;
  auto& r = out.report;
  r.method = "extensive";
  r.instance = inst.name;
  r.status = lp::to_string(sol.status);
  if (!sol.has_solution()) {
    if (sol.status == lp::Status::Infeasible) throw SolveError("extensive model infeasible (check rostering rows and gamma)");
    throw SolveError(std::string("extensive model: ") + lp::to_string(sol.status));
  }
  r.upper_bound = sol.objective;
  r.lower_bound = sol.bound;
  r.gap = sol.gap;
  for (std::size_t p = 0; p < inst.templates.size(); ++p) {
    const double y = sol.primal[em.y[p]];
    r.template_cost += inst.templates[p].cost * y;
    const int yi = static_cast<int>(std::lround(y));
    if (yi > 0) r.portfolio[inst.templates[p].id] = yi;
  }
  r.recovery_cost = sol.primal[em.eta];
  for (std::size_t s = 0; s < inst.scenarios.size(); ++s) {
    const auto& sc = inst.scenarios[s];
    ScenarioOutcome o{sc.id, 0.0, {}};
    for (int vv : em.v[s]) o.excess += sol.primal[vv];
    for (std::size_t d = 0; d < em.duties[s].size(); ++d) {
      const double x = sol.primal[em.x[s][d]];
      if (x <= 1e-9) continue;
      const Duty& du = em.duties[s][d];
      ScheduledDuty sd{inst.templates[du.template_index].id, {}, du.start, du.end, x, false};
      for (int k : du.tasks) sd.task_ids.push_back(sc.tasks[k].id);
      o.duties.push_back(std::move(sd));
    }
    r.scenarios.push_back(std::move(o));
  }
  r.counters["nodes"] = sol.nodes;
  r.counters["variables"] = static_cast<long>(em.lp.variables.size());
  return out;
}

}  // namespace crewplan
