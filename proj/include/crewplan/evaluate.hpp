#pragma once

// Operational evaluation of a fixed portfolio on realised days:
//
//   min  sum_d l_d x_d + c_E sum_p v_p
//   s.t. sum_{d in p} x_d <= ybar_p + v_p,   sum_{d ni k} x_d >= 1,   x binary
//
// solved by column generation on the LP, then a MILP over the generated
// columns.

#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "crewplan/colgen.hpp"
#include "crewplan/io.hpp"
#include "crewplan/milp.hpp"
#include "crewplan/parallel.hpp"
#include "crewplan/report.hpp"

namespace crewplan {

struct EvaluationOptions {
  ColgenOptions colgen;
  double milp_time_limit = 30.0;
  int threads = 1;
};

struct EvaluationResult {
  std::string day;
  std::vector<ScheduledDuty> duties;
  int templates = 0;  // sum of ybar
  int excess = 0;
  int empty_templates = 0;
  double workload_hours = 0.0;  // mean duty span
  double objective = 0.0;
  double lp_bound = 0.0;
  double gap = 0.0;
  bool proven = false;

  int duty_count() const { return static_cast<int>(duties.size()); }
};

inline std::vector<double> portfolio_vector(const Instance& inst, const std::map<std::string, int>& portfolio) {
  std::vector<double> y(inst.templates.size(), 0.0);
  for (const auto& [id, n] : portfolio) {
    const int p = inst.template_index(id);
    if (p < 0) throw InputError("portfolio names unknown template " + id);
    y[p] = n;
  }
  return y;
}

inline EvaluationResult evaluate_day(const Instance& inst, const Scenario& day, const std::vector<double>& ybar,
                                     const EvaluationOptions& opt = {}) {
  EvaluationResult out;
  out.day = day.id;
  for (double y : ybar) out.templates += static_cast<int>(std::lround(y));
  const int P = static_cast<int>(inst.templates.size());
  if (day.tasks.empty()) {
    out.empty_templates = out.templates;
    out.proven = true;
    return out;
  }
  Instance one = inst;
  one.scenarios = {day};
  ScenarioColgen cg(one, 0, BspObjective::Workload, opt.colgen);
  const auto lp_res = cg.solve(ybar);
  out.lp_bound = lp_res.objective;

  const auto& pool = cg.pool();
  const int K = static_cast<int>(day.tasks.size());
  lp::LinearProgram m;
  std::vector<int> v;
  for (int p = 0; p < P; ++p) v.push_back(m.add_variable(0, lp::kInf, inst.excess_cost, false));
  std::vector<std::vector<int>> cap(P), cover(K);
  for (const auto& c : pool) {
    const int j = m.add_variable(0, 1, c.cost, true);
    cap[c.duty.template_index].push_back(j);
    for (int k : c.duty.tasks) cover[k].push_back(j);
  }
  for (int p = 0; p < P; ++p) {
    auto idx = cap[p];
    std::vector<double> val(idx.size(), 1.0);
    idx.push_back(v[p]);
    val.push_back(-1.0);
    m.add_constraint(idx, val, lp::Sense::LessEqual, ybar[p]);
  }
  for (int k = 0; k < K; ++k) m.add_constraint(cover[k], std::vector<double>(cover[k].size(), 1.0), lp::Sense::GreaterEqual, 1.0);

  // Incumbent: columns with LP value one, then greedy cover of the rest.
  std::vector<double> x0(m.variables.size(), 0.0);
  std::vector<char> covered(K, 0);
  auto take = [&](int i) {
    x0[P + i] = 1.0;
    for (int k : pool[i].duty.tasks) covered[k] = 1;
  };
  for (const auto& [i, x] : lp_res.columns)
    if (x >= 1.0 - 1e-6) take(i);
  for (int k = 0; k < K; ++k) {
    if (covered[k]) continue;
    int best = -1;
    double best_ratio = 0.0;
    for (int j : cover[k]) {
      const int i = j - P;
      int fresh = 0;
      for (int t : pool[i].duty.tasks) fresh += !covered[t];
      const double ratio = fresh / (pool[i].cost + 1.0);
      if (best < 0 || ratio > best_ratio) {
        best = i;
        best_ratio = ratio;
      }
    }
    take(best);
  }
  std::vector<int> used(P, 0);
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (x0[P + i] > 0.5) ++used[pool[i].duty.template_index];
  for (int p = 0; p < P; ++p) x0[v[p]] = std::max(0.0, used[p] - ybar[p]);

  lp::MilpOptions mo;
  mo.time_limit = opt.milp_time_limit;
  mo.initial_solution = x0;
  const auto sol = lp::solve_milp(m, mo);
  if (!sol.has_solution()) throw SolveError(std::string("evaluation MILP: ") + lp::to_string(sol.status));
  out.objective = sol.objective;
  out.proven = sol.status == lp::Status::Optimal;
  out.gap = out.objective > 0 ? std::max(0.0, (out.objective - out.lp_bound) / out.objective) : 0.0;

  std::vector<int> count(P, 0);
  double minutes = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (sol.primal[P + i] < 0.5) continue;
    const Duty& d = pool[i].duty;
    const int p = d.template_index;
    ScheduledDuty sd{inst.templates[p].id, {}, d.start, d.end, 1.0, ++count[p] > std::lround(ybar[p])};
    for (int k : d.tasks) sd.task_ids.push_back(day.tasks[k].id);
    out.excess += sd.excess;
    minutes += d.length();
    out.duties.push_back(std::move(sd));
  }
  for (int p = 0; p < P; ++p) out.empty_templates += std::max(0, static_cast<int>(std::lround(ybar[p])) - count[p]);
  out.workload_hours = out.duties.empty() ? 0.0 : minutes / 60.0 / static_cast<double>(out.duties.size());
  return out;
}

struct PeriodEvaluation {
  std::vector<EvaluationResult> days;

  // Means over days; empty when there are none.
  std::map<std::string, double> average() const {
    std::map<std::string, double> a;
    if (days.empty()) return a;
    for (const auto& d : days) {
      a["templates"] += d.templates;
      a["duties"] += d.duty_count();
      a["excess"] += d.excess;
      a["empty"] += d.empty_templates;
      a["workload_hours"] += d.workload_hours;
      a["objective"] += d.objective;
      a["lp_bound"] += d.lp_bound;
      a["gap"] += d.gap;
    }
    for (auto& [k, v] : a) v /= static_cast<double>(days.size());
    return a;
  }
};

inline PeriodEvaluation evaluate_period(const Instance& inst, const std::vector<double>& ybar,
                                        const std::vector<Scenario>& days, const EvaluationOptions& opt = {}) {
  PeriodEvaluation out;
  out.days.resize(days.size());
  EvaluationOptions inner = opt;
  if (days.size() > 1 && opt.threads > 1) inner.colgen.threads = 1;
  // Time limits make MILP results timing dependent; with the default limit the
  // desk-scale instances finish long before it.
  parallel_for(static_cast<int>(days.size()), opt.threads,
               [&](int i) { out.days[i] = evaluate_day(inst, days[i], ybar, inner); });
  return out;
}

inline void write_evaluation_csv(const PeriodEvaluation& ev, std::ostream& os) {
  os << "day,templates,duties,excess,empty,workload_hours,objective,lp_bound,gap\n";
  for (const auto& d : ev.days)
    os << d.day << ',' << d.templates << ',' << d.duty_count() << ',' << d.excess << ',' << d.empty_templates << ','
       << format_number(d.workload_hours) << ',' << format_number(d.objective) << ',' << format_number(d.lp_bound) << ','
       << format_number(d.gap) << '\n';
  if (ev.days.empty()) return;
  auto a = ev.average();
  os << "average," << format_number(a["templates"]) << ',' << format_number(a["duties"]) << ','
     << format_number(a["excess"]) << ',' << format_number(a["empty"]) << ',' << format_number(a["workload_hours"]) << ','
     << format_number(a["objective"]) << ',' << format_number(a["lp_bound"]) << ',' << format_number(a["gap"]) << '\n';
}

}  // namespace crewplan
