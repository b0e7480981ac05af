#pragma once

// Independent re-check of a reported integral solution against the instance.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "crewplan/core_model.hpp"
#include "crewplan/report.hpp"

namespace crewplan {

// Returns one message per violated condition; empty means feasible and the
// reported costs are consistent.
inline std::vector<std::string> verify_solution(const Instance& inst, const SolveReport& r, double tol = 1e-6) {
  std::vector<std::string> bad;
  const int P = static_cast<int>(inst.templates.size());
  std::vector<double> y(P, 0.0);
  for (const auto& [id, n] : r.portfolio) {
    const int p = inst.template_index(id);
    if (p < 0) {
      bad.push_back("unknown template " + id);
      continue;
    }
    if (n < 0 || n > inst.capacity_bound) bad.push_back("template " + id + " count outside [0, C]");
    y[p] = n;
  }
  int types = 0;
  double template_cost = 0.0;
  for (int p = 0; p < P; ++p) {
    types += y[p] > 0;
    template_cost += inst.templates[p].cost * y[p];
  }
  if (types > inst.gamma) bad.push_back("more than gamma template types");
  for (const auto& row : inst.rostering_constraints) {
    double lhs = 0.0;
    for (int p = 0; p < P; ++p) lhs += row.coefficients[p] * y[p];
    if (lhs > row.rhs + tol) bad.push_back("rostering row " + row.label + " violated");
  }
  if (std::abs(template_cost - r.template_cost) > tol * std::max(1.0, template_cost))
    bad.push_back("template cost mismatch");

  double recovery = 0.0;
  if (r.scenarios.size() != inst.scenarios.size()) bad.push_back("scenario count mismatch");
  for (std::size_t s = 0; s < std::min(r.scenarios.size(), inst.scenarios.size()); ++s) {
    const auto& sc = inst.scenarios[s];
    const auto& out = r.scenarios[s];
    std::map<std::string, int> task_index;
    for (std::size_t k = 0; k < sc.tasks.size(); ++k) task_index[sc.tasks[k].id] = static_cast<int>(k);
    std::vector<int> covered(sc.tasks.size(), 0);
    std::vector<int> used(P, 0);
    for (const auto& d : out.duties) {
      if (std::abs(d.value - std::round(d.value)) > tol) {
        bad.push_back("fractional duty in scenario " + sc.id);
        continue;
      }
      const int p = inst.template_index(d.template_id);
      std::vector<int> ks;
      for (const auto& id : d.task_ids) {
        auto it = task_index.find(id);
        if (it == task_index.end()) bad.push_back("unknown task " + id + " in scenario " + sc.id);
        else ks.push_back(it->second);
      }
      if (p < 0 || ks.size() != d.task_ids.size()) continue;
      const Duty duty = make_duty(inst, sc, p, ks);
      if (!duty_feasible(inst, sc, duty).feasible)
        bad.push_back("infeasible duty on " + d.template_id + " in scenario " + sc.id);
      for (int k : ks) covered[k] += static_cast<int>(std::lround(d.value));
      used[p] += static_cast<int>(std::lround(d.value));
    }
    for (std::size_t k = 0; k < sc.tasks.size(); ++k)
      if (covered[k] < 1) bad.push_back("task " + sc.tasks[k].id + " uncovered in scenario " + sc.id);
    double excess = 0.0;
    for (int p = 0; p < P; ++p) excess += std::max(0.0, used[p] - y[p]);
    if (std::abs(excess - out.excess) > tol) bad.push_back("excess count mismatch in scenario " + sc.id);
    recovery = std::max(recovery, inst.excess_cost * excess);
  }
  if (std::abs(recovery - r.recovery_cost) > tol * std::max(1.0, recovery)) bad.push_back("recovery cost mismatch");
  if (std::abs(template_cost + recovery - r.upper_bound) > tol * std::max(1.0, r.upper_bound))
    bad.push_back("objective mismatch");
  return bad;
}

}  // namespace crewplan
