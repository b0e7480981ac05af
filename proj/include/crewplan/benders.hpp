#pragma once

// Two-phase Benders decomposition for template selection.
//
// Master: min sum_p c_p y_p + eta subject to template restrictions, one
// optimality cut theta . y + kappa <= eta per (scenario, round), flow-bound
// rows and, in phase II, fixing-support rows. Subproblems are the per-scenario
// duty LPs solved by ScenarioColgen. Phase I keeps duties fractional; phase II
// fixes one fractional duty per scenario, re-solves a few rounds, and repeats
// until every scenario is integral.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crewplan/colgen.hpp"
#include "crewplan/flow_bound.hpp"
#include "crewplan/branching.hpp"
#include "crewplan/milp.hpp"
#include "crewplan/parallel.hpp"
#include "crewplan/report.hpp"

namespace crewplan {

struct OptimalityCut {
  int scenario = 0;
  std::vector<double> theta;  // per template, in [-c_E, 0]
  double constant = 0.0;      // kappa
  bool pareto = false;

  double value(const std::vector<double>& y) const {
    double s = constant;
    for (std::size_t p = 0; p < theta.size(); ++p) s += theta[p] * y[p];
    return s;
  }
};

struct CorePoint {
  std::vector<double> w;
  double mix = 0.5;

  static CorePoint constant(int templates, double value) { return {std::vector<double>(templates, value), 0.5}; }
  void update(const std::vector<double>& y) {
    for (std::size_t p = 0; p < w.size(); ++p) w[p] = mix * y[p] + (1.0 - mix) * w[p];
  }
};

struct MasterSolution {
  lp::Status status = lp::Status::Infeasible;
  std::vector<double> y, z;
  double eta = 0.0;
  double objective = 0.0;
  double bound = 0.0;  // proven lower bound on the master optimum
  bool proven = false;
  long nodes = 0;
};

// Thrown when the master has no feasible template selection.
class InfeasibleMasterError : public SolveError {
 public:
  InfeasibleMasterError(const std::string& what, std::vector<std::string> families)
      : SolveError(what), families_(std::move(families)) {}
  const std::vector<std::string>& families() const { return families_; }

 private:
  std::vector<std::string> families_;
};

// Thrown when phase II hits its fixing cap; carries what was computed so far.
class PartialSolveError : public SolveError {
 public:
  PartialSolveError(const std::string& what, SolveReport partial) : SolveError(what), partial_(std::move(partial)) {}
  const SolveReport& partial() const { return partial_; }

 private:
  SolveReport partial_;
};

class BendersMaster {
 public:
  explicit BendersMaster(const Instance& inst, bool relax = false) : inst_(&inst) {
    const int P = static_cast<int>(inst.templates.size());
    const double C = inst.capacity_bound;
    for (int p = 0; p < P; ++p) y_.push_back(lp_.add_variable(0, C, inst.templates[p].cost, !relax, "y_" + inst.templates[p].id));
    for (int p = 0; p < P; ++p) z_.push_back(lp_.add_variable(0, 1, 0.0, !relax, "z_" + inst.templates[p].id));
    eta_ = lp_.add_variable(0, lp::kInf, 1.0, false, "eta");
    // Integer total N = sum_p y_p; branching on it first lifts bounds that
    // fractional share rows spread thinly over many templates.
    total_ = lp_.add_variable(0, C * P, 0.0, !relax, "total");
    {
      std::vector<int> idx = y_;
      std::vector<double> val(P, 1.0);
      idx.push_back(total_);
      val.push_back(-1.0);
      lp_.add_constraint(idx, val, lp::Sense::Equal, 0.0, "total");
    }
    for (int p = 0; p < P; ++p) lp_.add_constraint({y_[p], z_[p]}, {1.0, -C}, lp::Sense::LessEqual, 0.0, "link");
    lp_.add_constraint(z_, std::vector<double>(P, 1.0), lp::Sense::LessEqual, inst.gamma, "gamma");
    for (const auto& r : inst.rostering_constraints)
      lp_.add_constraint(y_, r.coefficients, lp::Sense::LessEqual, r.rhs, "rostering:" + r.label);
    fixing_row_.assign(inst.scenarios.size(), std::vector<int>(P, -1));
  }

  int num_templates() const { return static_cast<int>(y_.size()); }
  const lp::LinearProgram& model() const { return lp_; }
  const std::vector<OptimalityCut>& cuts() const { return cuts_; }
  int valid_inequality_rows() const { return vi_rows_; }

  // Rows sum_{p in P(t)} y_p + eta / c_E >= V_t. Returns the number added.
  int add_valid_inequalities(Minutes step = 5, bool merge = false) {
    auto rows = valid_inequalities(*inst_, step);
    if (merge) rows = merge_valid_inequalities(std::move(rows));
    for (const auto& vi : rows) add_eta_row(vi.templates, vi.rhs, "vi");
    vi_rows_ += static_cast<int>(rows.size());
    return static_cast<int>(rows.size());
  }

  // eta - theta . y >= kappa
  void add_cut(OptimalityCut cut) {
    std::vector<int> idx{eta_};
    std::vector<double> val{1.0};
    for (int p = 0; p < num_templates(); ++p)
      if (cut.theta[p] != 0.0) {
        idx.push_back(y_[p]);
        val.push_back(-cut.theta[p]);
      }
    lp_.add_constraint(idx, val, lp::Sense::GreaterEqual, cut.constant, "cut");
    cuts_.push_back(std::move(cut));
  }

  // Selected templates must hold the fixed duties, up to excess:
  // y_p + eta / c_E >= fixed_p for the given scenario.
  void set_fixing_support(int scenario, int p, double fixed) {
    int& row = fixing_row_.at(scenario).at(p);
    if (row < 0) {
      row = static_cast<int>(lp_.constraints.size());
      add_eta_row({p}, fixed, "fixing");
    } else {
      lp_.constraints[row].rhs = fixed;
    }
  }

  // Smallest eta compatible with every row that involves it.
  double required_eta(const std::vector<double>& y) const {
    double eta = 0.0;
    for (const auto& c : lp_.constraints) {
      double a = 0.0, rest = 0.0;
      for (std::size_t e = 0; e < c.index.size(); ++e) {
        if (c.index[e] == eta_) a += c.value[e];
        else if (c.index[e] < num_templates()) rest += c.value[e] * y[c.index[e]];
      }
      if (a > 0.0 && c.sense == lp::Sense::GreaterEqual) eta = std::max(eta, (c.rhs - rest) / a);
    }
    return eta;
  }

  std::vector<double> point(const std::vector<double>& y) const {
    std::vector<double> x(lp_.variables.size(), 0.0);
    for (int p = 0; p < num_templates(); ++p) {
      x[y_[p]] = y[p];
      x[z_[p]] = y[p] > 1e-9 ? 1.0 : 0.0;
      x[total_] += y[p];
    }
    x[eta_] = required_eta(y);
    return x;
  }

  MasterSolution solve(double time_limit, const std::vector<double>* incumbent = nullptr) const {
    lp::MilpOptions mo;
    mo.time_limit = time_limit;
    if (incumbent != nullptr) {
      auto x = point(*incumbent);
      if (lp_.is_feasible(x)) mo.initial_solution = std::move(x);
    }
    // Round template counts up and charge the cuts.
    mo.heuristic = [this](const std::vector<double>& x) -> std::optional<std::vector<double>> {
      std::vector<double> y(num_templates());
      for (int p = 0; p < num_templates(); ++p) y[p] = std::ceil(x[y_[p]] - 1e-9);
      return point(y);
    };
    mo.select_branch = template_branch_rule(total_, y_, z_, inst_->gamma);
    const auto sol = lp::solve_milp(lp_, mo);
    MasterSolution out;
    out.status = sol.status;
    out.nodes = sol.nodes;
    if (sol.status == lp::Status::Infeasible) throw infeasibility();
    if (!sol.has_solution()) throw SolveError(std::string("master: ") + lp::to_string(sol.status));
    for (int p = 0; p < num_templates(); ++p) {
      out.y.push_back(sol.primal[y_[p]]);
      out.z.push_back(sol.primal[z_[p]]);
    }
    out.eta = sol.primal[eta_];
    out.objective = sol.objective;
    out.bound = sol.status == lp::Status::Optimal ? sol.objective : sol.bound;
    out.proven = sol.status == lp::Status::Optimal;
    return out;
  }

 private:
  void add_eta_row(const std::vector<int>& templates, double rhs, const std::string& name) {
    std::vector<int> idx;
    for (int p : templates) idx.push_back(y_[p]);
    std::vector<double> val(idx.size(), 1.0);
    idx.push_back(eta_);
    val.push_back(1.0 / inst_->excess_cost);
    lp_.add_constraint(idx, val, lp::Sense::GreaterEqual, rhs, name);
  }

  // Deletion filter over the y-side rows: the surviving families form an
  // irreducible infeasible subset.
  InfeasibleMasterError infeasibility() const {
    std::vector<int> keep;
    for (std::size_t i = 0; i < lp_.constraints.size(); ++i) {
      const auto& n = lp_.constraints[i].name;
      if (n == "link" || n == "gamma" || n.rfind("rostering:", 0) == 0) keep.push_back(static_cast<int>(i));
    }
    auto feasible_without = [&](const std::vector<int>& rows) {
      lp::LinearProgram m;
      m.variables = lp_.variables;
      for (int i : rows) m.constraints.push_back(lp_.constraints[i]);
      return lp::solve_milp(m).status != lp::Status::Infeasible;
    };
    for (std::size_t i = 0; i < keep.size();) {
      auto trial = keep;
      trial.erase(trial.begin() + static_cast<long>(i));
      if (!feasible_without(trial)) keep = std::move(trial);
      else ++i;
    }
    std::vector<std::string> families;
    for (int i : keep) {
      const auto& n = lp_.constraints[i].name;
      if (std::find(families.begin(), families.end(), n) == families.end()) families.push_back(n);
    }
    std::string msg = "master infeasible; conflicting constraints:";
    for (const auto& f : families) msg += " " + f;
    return InfeasibleMasterError(msg, families);
  }

  const Instance* inst_;
  lp::LinearProgram lp_;
  std::vector<int> y_, z_;
  int eta_ = -1;
  int total_ = -1;
  std::vector<OptimalityCut> cuts_;
  std::vector<std::vector<int>> fixing_row_;
  int vi_rows_ = 0;
};

struct BendersOptions {
  double phase_one_time_limit = 3600.0;  // seconds
  double time_limit = 1e30;              // overall; phase II stops resolving once exceeded
  double master_time_limit = 10.0;
  double max_escalation = 16.0;  // master limit grows up to this factor
  double tol_cut = 1e-6;
  int max_phase_one_iterations = 100000;
  int resolve_rounds = 5;
  int max_fixing_rounds = 100000;
  bool valid_inequalities = true;
  bool merge_valid_inequalities = false;
  Minutes vi_step = 5;
  bool pareto = true;
  double core_point_value = 1.0;
  bool relax_master = false;  // continuous y and z; phase I only
  bool phase_two = true;
  ColgenOptions colgen;
  int threads = 1;
  std::function<void(const IterationRecord&)> on_iteration;
};

// Outcome of separating one scenario at a master solution.
struct Separation {
  double objective = 0.0;  // regular BSP value at yhat
  std::optional<OptimalityCut> cut;
  std::vector<std::pair<Duty, double>> solution;  // positive duty values
};

inline Separation separate(ScenarioColgen& cg, const std::vector<double>& yhat, double eta_hat, const CorePoint* core,
                           double tol_cut = 1e-6) {
  Separation out;
  const auto reg = cg.solve(yhat);
  out.objective = reg.objective;
  for (const auto& [j, x] : reg.columns) out.solution.emplace_back(cg.pool()[j].duty, x);
  if (reg.objective <= eta_hat + tol_cut) return out;
  OptimalityCut cut{cg.scenario_index(), reg.theta, reg.cut_constant, false};
  if (core != nullptr) {
    ParetoSpec spec{core->w, reg.objective};
    const auto par = cg.solve(yhat, &spec);
    OptimalityCut pc{cg.scenario_index(), par.theta, par.cut_constant, true};
    // Accept the auxiliary cut only if it is tight at yhat.
    if (std::abs(pc.value(yhat) - reg.objective) <= 1e-6 * std::max(1.0, reg.objective) &&
        pc.value(yhat) > eta_hat + tol_cut)
      cut = std::move(pc);
  }
  out.cut = std::move(cut);
  return out;
}

struct BoundsTracker {
  double lower = 0.0;
  double upper = lp::kInf;
  std::string phase = "I";
  std::vector<IterationRecord> history;

  void offer_lower(double lb) {
    if (phase == "I") lower = std::max(lower, lb);
  }
  void offer_upper(double ub) { upper = std::min(upper, ub); }
};

namespace detail {

// Duties forming an integral schedule of the residual problem, or nullopt if
// some uncovered task is only served fractionally.
inline std::optional<std::vector<Duty>> integral_part(const ScenarioColgen& cg,
                                                      const std::vector<std::pair<Duty, double>>& sol) {
  const auto& rhs = cg.cover_rhs();
  std::vector<char> covered(rhs.size(), 0);
  for (std::size_t k = 0; k < rhs.size(); ++k) covered[k] = rhs[k] <= 0.0;
  std::vector<Duty> chosen;
  for (const auto& [d, x] : sol) {
    if (x < 1.0 - 1e-6) continue;
    bool useful = false;
    for (int k : d.tasks) useful = useful || rhs[k] > 0.0;
    if (!useful) continue;
    for (int k : d.tasks) covered[k] = 1;
    chosen.push_back(d);
  }
  for (char c : covered)
    if (!c) return std::nullopt;
  return chosen;
}

// Highest fractional value among duties that serve an uncovered task; ties
// by canonical duty order.
inline std::optional<Duty> fixing_candidate(const ScenarioColgen& cg, const std::vector<std::pair<Duty, double>>& sol) {
  const auto& rhs = cg.cover_rhs();
  const std::pair<Duty, double>* best = nullptr;
  for (const auto& c : sol) {
    if (c.second <= 1e-6 || c.second >= 1.0 - 1e-6) continue;
    bool useful = false;
    for (int k : c.first.tasks) useful = useful || rhs[k] > 0.0;
    if (!useful) continue;
    if (best == nullptr || c.second > best->second + 1e-9 ||
        (std::abs(c.second - best->second) <= 1e-9 && c.first < best->first))
      best = &c;
  }
  if (best == nullptr) return std::nullopt;
  return best->first;
}

inline ScenarioOutcome integer_outcome(const Instance& inst, const Scenario& sc, const std::vector<Duty>& duties,
                                       const std::vector<double>& y) {
  ScenarioOutcome o{sc.id, 0.0, {}};
  std::vector<int> used(inst.templates.size(), 0);
  auto sorted = duties;
  std::sort(sorted.begin(), sorted.end(), [](const Duty& a, const Duty& b) {
    return std::tie(a.template_index, a.start, a.tasks) < std::tie(b.template_index, b.start, b.tasks);
  });
  for (const auto& d : sorted) {
    const int p = d.template_index;
    ScheduledDuty sd{inst.templates[p].id, {}, d.start, d.end, 1.0, ++used[p] > std::lround(y[p])};
    for (int k : d.tasks) sd.task_ids.push_back(sc.tasks[k].id);
    o.duties.push_back(std::move(sd));
  }
  for (std::size_t p = 0; p < used.size(); ++p) o.excess += std::max(0.0, used[p] - std::round(y[p]));
  return o;
}

}  // namespace detail

inline SolveReport run_two_phase(const Instance& inst, const BendersOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - started).count(); };
  inst.validate();
  const int P = static_cast<int>(inst.templates.size());
  const int S = static_cast<int>(inst.scenarios.size());
  const bool run_phase_two = opt.phase_two && !opt.relax_master;

  SolveReport report;
  report.method = "benders";
  report.instance = inst.name;

  BendersMaster master(inst, opt.relax_master);
  if (opt.valid_inequalities) report.counters["vi_rows"] = master.add_valid_inequalities(opt.vi_step, opt.merge_valid_inequalities);
  report.timing["valid_inequalities"] = elapsed();

  // Scenario parallelism replaces pricing parallelism.
  ColgenOptions cg_opt = opt.colgen;
  const int threads = std::max(1, opt.threads);
  cg_opt.threads = S > 1 && threads > 1 ? 1 : threads;
  std::vector<std::unique_ptr<ScenarioColgen>> bsp;
  for (int s = 0; s < S; ++s) bsp.push_back(std::make_unique<ScenarioColgen>(inst, s, BspObjective::Recovery, cg_opt));

  CorePoint core = CorePoint::constant(P, opt.core_point_value);
  BoundsTracker bounds;
  std::vector<double> yhat(P, 0.0);
  std::vector<Separation> last(S);
  double master_time = 0.0, separation_time = 0.0;
  long cuts_total = 0, pareto_cuts = 0, escalations = 0;
  int iteration = 0;

  auto template_cost = [&](const std::vector<double>& y) {
    double c = 0.0;
    for (int p = 0; p < P; ++p) c += inst.templates[p].cost * y[p];
    return c;
  };
  auto columns = [&] {
    int n = 0;
    for (const auto& b : bsp) n += static_cast<int>(b->pool().size());
    return n;
  };
  auto solve_master = [&](double limit, const std::vector<double>& incumbent) {
    const double t0 = elapsed();
    auto m = master.solve(limit, &incumbent);
    master_time += elapsed() - t0;
    return m;
  };
  // Separates every scenario at yhat and adds the cuts in scenario order.
  auto separate_all = [&](const MasterSolution& m) {
    const double t0 = elapsed();
    const CorePoint* cp = opt.pareto ? &core : nullptr;
    parallel_for(S, S > 1 ? threads : 1, [&](int s) { last[s] = separate(*bsp[s], m.y, m.eta, cp, opt.tol_cut); });
    separation_time += elapsed() - t0;
    int added = 0;
    for (int s = 0; s < S; ++s)
      if (last[s].cut) {
        pareto_cuts += last[s].cut->pareto;
        master.add_cut(*last[s].cut);
        ++added;
      }
    cuts_total += added;
    return added;
  };
  auto recovery_value = [&] {
    double r = 0.0;
    for (const auto& l : last) r = std::max(r, l.objective);
    return r;
  };
  auto record = [&](const MasterSolution& m, int cuts) {
    IterationRecord rec{bounds.phase, ++iteration, bounds.lower, bounds.upper, m.objective, cuts, columns(), elapsed()};
    bounds.history.push_back(rec);
    if (opt.on_iteration) opt.on_iteration(rec);
  };

  // Phase I: fractional duties.
  double limit = opt.master_time_limit;
  bool proven_done = false;
  int phase_one_iterations = 0;
  while (phase_one_iterations < opt.max_phase_one_iterations) {
    ++phase_one_iterations;
    const double left = std::min(opt.phase_one_time_limit, opt.time_limit) - elapsed();
    const auto m = solve_master(std::max(1.0, std::min(limit, left)), yhat);
    bounds.offer_lower(m.bound);
    const int added = separate_all(m);
    yhat = m.y;
    core.update(yhat);
    bounds.offer_upper(template_cost(yhat) + recovery_value());
    record(m, added);
    if (added > 0) {
      limit = opt.master_time_limit;
    } else if (m.proven) {
      proven_done = true;
      break;
    } else if (limit < opt.master_time_limit * opt.max_escalation) {
      limit *= 2.0;
      ++escalations;
    } else {
      break;
    }
    if (elapsed() > std::min(opt.phase_one_time_limit, opt.time_limit)) break;
  }
  report.lp_bound = bounds.lower;
  report.timing["phase_one"] = elapsed();
  report.counters["phase_one_iterations"] = phase_one_iterations;
  const double phase_one_upper = bounds.upper;

  auto finish = [&](SolveReport& r) {
    r.lower_bound = bounds.lower;
    r.gap = r.upper_bound > 0 && std::isfinite(r.upper_bound) ? std::max(0.0, (r.upper_bound - r.lower_bound) / r.upper_bound)
                                                                : 0.0;
    r.iterations = bounds.history;
    r.counters["cuts"] = cuts_total;
    r.counters["pareto_cuts"] = pareto_cuts;
    r.counters["master_escalations"] = escalations;
    r.counters["columns"] = columns();
    r.timing["master"] = master_time;
    r.timing["separation"] = separation_time;
    r.timing["total"] = elapsed();
  };
  auto fill_portfolio = [&](SolveReport& r, const std::vector<double>& y) {
    r.portfolio.clear();
    for (int p = 0; p < P; ++p) {
      const int n = static_cast<int>(std::lround(y[p]));
      if (n > 0) r.portfolio[inst.templates[p].id] = n;
    }
  };

  if (!run_phase_two) {
    report.status = opt.relax_master ? "lp" : (proven_done ? "phase-one" : "phase-one-limit");
    report.upper_bound = phase_one_upper;
    report.template_cost = template_cost(yhat);
    report.recovery_cost = recovery_value();
    if (!opt.relax_master) fill_portfolio(report, yhat);
    for (int s = 0; s < S; ++s) {
      ScenarioOutcome o{inst.scenarios[s].id, 0.0, {}};
      for (const auto& [d, x] : last[s].solution) {
        ScheduledDuty sd{inst.templates[d.template_index].id, {}, d.start, d.end, x, false};
        for (int k : d.tasks) sd.task_ids.push_back(inst.scenarios[s].tasks[k].id);
        o.duties.push_back(std::move(sd));
      }
      o.excess = last[s].objective / inst.excess_cost;
      report.scenarios.push_back(std::move(o));
    }
    finish(report);
    return report;
  }

  // Phase II: fix and resolve until every scenario is integral.
  bounds.phase = "II";
  bounds.upper = lp::kInf;
  int fixing_rounds = 0;
  std::vector<std::optional<std::vector<Duty>>> integral(S);
  auto check_integral = [&] {
    bool all = true;
    for (int s = 0; s < S; ++s) {
      integral[s] = detail::integral_part(*bsp[s], last[s].solution);
      all = all && integral[s].has_value();
    }
    return all;
  };
  MasterSolution current;
  current.y = yhat;
  current.eta = master.required_eta(yhat);
  while (!check_integral()) {
    if (fixing_rounds >= opt.max_fixing_rounds) {
      SolveReport partial = report;
      partial.status = "fixing-limit";
      partial.upper_bound = lp::kInf;
      finish(partial);
      throw PartialSolveError("phase II: no integral solution after " + std::to_string(fixing_rounds) + " fixing rounds",
                              partial);
    }
    ++fixing_rounds;
    for (int s = 0; s < S; ++s) {
      if (integral[s]) continue;
      auto d = detail::fixing_candidate(*bsp[s], last[s].solution);
      if (!d) continue;
      bsp[s]->fix(*d);
      master.set_fixing_support(s, d->template_index, bsp[s]->fixed_per_template()[d->template_index]);
    }
    const bool may_resolve = elapsed() < opt.time_limit;
    const int rounds = may_resolve ? std::max(1, opt.resolve_rounds) : 1;
    for (int r = 0; r < rounds; ++r) {
      int added = 0;
      if (may_resolve) {
        current = solve_master(std::max(1.0, std::min(opt.master_time_limit, opt.time_limit - elapsed())), yhat);
        added = separate_all(current);
      } else {
        // Out of time: keep the templates and only repair the duties.
        current.eta = master.required_eta(yhat);
        separate_all(current);
      }
      yhat = current.y;
      core.update(yhat);
      record(current, added);
      if (added == 0) break;
    }
  }

  // Assemble the integral schedule.
  std::vector<double> y(P);
  for (int p = 0; p < P; ++p) y[p] = std::round(yhat[p]);
  report.template_cost = template_cost(y);
  report.recovery_cost = 0.0;
  for (int s = 0; s < S; ++s) {
    auto duties = bsp[s]->fixed_duties();
    duties.insert(duties.end(), integral[s]->begin(), integral[s]->end());
    auto o = detail::integer_outcome(inst, inst.scenarios[s], duties, y);
    report.recovery_cost = std::max(report.recovery_cost, inst.excess_cost * o.excess);
    report.scenarios.push_back(std::move(o));
  }
  fill_portfolio(report, y);
  report.upper_bound = report.template_cost + report.recovery_cost;
  bounds.offer_upper(report.upper_bound);
  report.counters["fixing_rounds"] = fixing_rounds;
  report.timing["phase_two"] = elapsed() - report.timing["phase_one"];
  finish(report);
  report.status = report.gap <= 1e-9 ? "optimal" : "feasible";
  return report;
}

}  // namespace crewplan
