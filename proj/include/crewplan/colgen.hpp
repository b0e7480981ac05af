#pragma once

// Column generation for one scenario's capacitated crew scheduling LP.
//
//   min  c_E sum_p v_p (+ sum l_d x_d in workload mode) (+ gamma u, Pareto)
//   cap_p:   sum_{d in p} x_d - v_p (+ r_p u)  <= rhs_p        dual theta_p <= 0
//   cover_k: sum_{d ni k} x_d      (+ h_k u)  >= h_k           dual lambda_k >= 0
//
// Regular: rhs_p = yhat_p - f_p. Pareto: rhs_p = w_p - f_p, r_p = yhat_p - f_p.
// f_p counts duties fixed to template p and h_k is 0 for tasks they cover
// (both zero/one before any fixing). Columns persist across solves, shared by
// the regular and the Pareto master.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "crewplan/lp.hpp"
#include "crewplan/parallel.hpp"
#include "crewplan/pricing.hpp"

namespace crewplan {

enum class BspObjective { Recovery, Workload };

struct ColgenOptions {
  PricingOptions pricing;
  int max_iterations = 10000;
  int removal_streak = 15;  // consecutive positive reduced costs before removal
  bool manage_columns = true;
  bool use_heuristic = true;
  int threads = 1;
};

struct ParetoSpec {
  std::vector<double> core_point;  // w
  double target = 0.0;             // gamma: regular optimum at yhat
};

struct ColgenResult {
  double objective = 0.0;
  std::vector<double> theta;   // per template
  std::vector<double> lambda;  // per scenario task
  double cut_constant = 0.0;   // kappa: cut reads theta . y + kappa <= eta
  std::vector<double> excess;  // v_p
  std::vector<std::pair<int, double>> columns;  // (pool index, x) for x > 0
  double pareto_u = 0.0;
  bool optimal = false;
  int iterations = 0;
  int columns_added = 0;
  int columns_removed = 0;
  std::vector<double> trace;  // RMP objective per iteration

  double total_excess() const {
    double s = 0;
    for (double v : excess) s += v;
    return s;
  }
  double cut_value(const std::vector<double>& y) const {
    double s = cut_constant;
    for (std::size_t p = 0; p < theta.size(); ++p) s += theta[p] * y[p];
    return s;
  }
};

struct PoolColumn {
  Duty duty;
  double cost = 0.0;
  int positive_streak = 0;
};

// Column management rule: a column goes once its reduced cost has been
// positive for `threshold` consecutive master solves, unless it is basic.
inline std::vector<int> select_removals(const std::vector<int>& positive_streak, const std::vector<char>& basic,
                                        int threshold) {
  std::vector<int> out;
  for (std::size_t i = 0; i < positive_streak.size(); ++i)
    if (positive_streak[i] >= threshold && !basic[i]) out.push_back(static_cast<int>(i));
  return out;
}

inline int next_streak(int streak, double reduced_cost, double tol) { return reduced_cost > tol ? streak + 1 : 0; }

class ScenarioColgen {
 public:
  ScenarioColgen(const Instance& inst, int scenario, BspObjective objective = BspObjective::Recovery,
                 ColgenOptions opt = {})
      : inst_(&inst), scenario_(scenario), objective_(objective), opt_(std::move(opt)) {
    if (objective_ == BspObjective::Workload && opt_.pricing.cost_per_minute == 0.0) opt_.pricing.cost_per_minute = 60.0;
    if (objective_ == BspObjective::Recovery) opt_.pricing.cost_per_minute = 0.0;
    const auto& sc = this->scenario();
    P_ = static_cast<int>(inst.templates.size());
    K_ = static_cast<int>(sc.tasks.size());
    fixed_per_template_.assign(P_, 0);
    cover_rhs_.assign(K_, 1.0);
    // One network per distinct window.
    std::map<std::pair<Minutes, Minutes>, int> by_window;
    for (int p = 0; p < P_; ++p) {
      const auto& t = inst.templates[p];
      auto key = std::pair(t.earliest_start, t.latest_end);
      auto it = by_window.find(key);
      if (it == by_window.end()) {
        it = by_window.emplace(key, static_cast<int>(networks_.size())).first;
        networks_.push_back(build_network(inst, sc, p));
      }
      network_of_.push_back(it->second);
    }
    regular_ = std::make_unique<lp::SimplexSolver>(base_model(false));
  }

  const Instance& instance() const { return *inst_; }
  const Scenario& scenario() const { return inst_->scenarios[scenario_]; }
  int scenario_index() const { return scenario_; }
  const std::vector<PoolColumn>& pool() const { return pool_; }
  const DutyNetwork& network(int template_index) const { return networks_[network_of_[template_index]]; }
  const std::vector<int>& fixed_per_template() const { return fixed_per_template_; }
  const std::vector<Duty>& fixed_duties() const { return fixed_; }
  const std::vector<double>& cover_rhs() const { return cover_rhs_; }
  const ColgenOptions& options() const { return opt_; }

  // Solves at capacities yhat; Pareto mode when `pareto` is given.
  ColgenResult solve(const std::vector<double>& yhat, const ParetoSpec* pareto = nullptr) {
    if (static_cast<int>(yhat.size()) != P_) throw InputError("solve_bsp: capacity vector size mismatch");
    seed_columns();
    lp::SimplexSolver& rmp = pareto ? pareto_solver() : *regular_;
    const int offset = pareto ? P_ + 1 : P_;
    for (int p = 0; p < P_; ++p) {
      const double residual = yhat[p] - fixed_per_template_[p];
      rmp.set_rhs(p, pareto ? pareto->core_point.at(p) - fixed_per_template_[p] : residual);
    }
    for (int k = 0; k < K_; ++k) rmp.set_rhs(P_ + k, cover_rhs_[k]);
    if (pareto) {
      std::vector<std::pair<int, double>> u;
      for (int p = 0; p < P_; ++p) u.emplace_back(p, yhat[p] - fixed_per_template_[p]);
      for (int k = 0; k < K_; ++k) u.emplace_back(P_ + k, cover_rhs_[k]);
      rmp.set_column(P_, u);
      rmp.set_cost(P_, pareto->target);
    }

    ColgenResult res;
    std::vector<double> theta(P_), lambda(K_);
    lp::LpSolution sol;
    for (;;) {
      if (res.iterations >= opt_.max_iterations) {
        std::ostringstream msg;
        msg << "colgen: no convergence after " << res.iterations << " iterations on scenario " << scenario().id
            << " (pool " << pool_.size() << ", last objective "
            << (res.trace.empty() ? 0.0 : res.trace.back()) << ")";
        throw SolveError(msg.str());
      }
      ++res.iterations;
      sol = rmp.solve();
      if (sol.status != lp::Status::Optimal)
        throw SolveError(std::string("colgen: restricted master ") + lp::to_string(sol.status) + " on scenario " +
                         scenario().id);
      res.trace.push_back(sol.objective);
      for (int p = 0; p < P_; ++p) theta[p] = std::clamp(sol.dual[p], -inst_->excess_cost, 0.0);
      for (int k = 0; k < K_; ++k) lambda[k] = std::max(0.0, sol.dual[P_ + k]);

      auto found = price(theta, lambda);
      if (found.empty()) break;
      // Removal only happens before new columns arrive, so `sol` stays aligned
      // with the pool once the loop exits.
      if (opt_.manage_columns) res.columns_removed += manage(theta, lambda, rmp, offset);
      for (auto& c : found) add_column(std::move(c.duty), c.cost);
      res.columns_added += static_cast<int>(found.size());
    }

    res.optimal = true;
    res.objective = sol.objective;
    res.theta = theta;
    res.lambda = lambda;
    res.cut_constant = 0.0;
    for (int k = 0; k < K_; ++k) res.cut_constant += cover_rhs_[k] * lambda[k];
    for (int p = 0; p < P_; ++p) res.cut_constant -= theta[p] * fixed_per_template_[p];
    res.excess.resize(P_);
    for (int p = 0; p < P_; ++p) res.excess[p] = std::max(0.0, sol.primal[p]);
    if (pareto) res.pareto_u = sol.primal[P_];
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      const double x = sol.primal[offset + i];
      if (x > 1e-9) res.columns.emplace_back(static_cast<int>(i), x);
    }
    return res;
  }

  // Phase-II fixing: removes the duty from the residual problem.
  void fix(const Duty& duty) {
    fixed_.push_back(duty);
    fixed_per_template_.at(duty.template_index) += 1;
    for (int k : duty.tasks) cover_rhs_.at(k) = 0.0;
  }

  // Sum of l_d over fixed duties (workload objective only).
  double fixed_cost() const {
    double s = 0;
    if (objective_ == BspObjective::Workload)
      for (const auto& d : fixed_) s += opt_.pricing.cost_per_minute * d.length();
    return s;
  }

  // Adds a known duty to the pool (no-op when present). Returns its index.
  int add_column(Duty duty, double cost) {
    if (auto it = index_.find(duty.key_string()); it != index_.end()) return it->second;
    const int id = static_cast<int>(pool_.size());
    index_.emplace(duty.key_string(), id);
    std::vector<std::pair<int, double>> entries{{duty.template_index, 1.0}};
    for (int k : duty.tasks) entries.emplace_back(P_ + k, 1.0);
    regular_->add_column(0.0, lp::kInf, cost, entries);
    if (pareto_) pareto_->add_column(0.0, lp::kInf, cost, entries);
    pool_.push_back({std::move(duty), cost, 0});
    return id;
  }

 private:
  lp::LinearProgram base_model(bool pareto) const {
    lp::LinearProgram m;
    for (int p = 0; p < P_; ++p) m.add_variable(0.0, lp::kInf, inst_->excess_cost, false, "v_" + inst_->templates[p].id);
    if (pareto) m.add_variable(-lp::kInf, lp::kInf, 0.0, false, "u");
    for (int p = 0; p < P_; ++p) {
      std::vector<int> idx{p};
      std::vector<double> val{-1.0};
      if (pareto) {
        idx.push_back(P_);
        val.push_back(0.0);
      }
      m.add_constraint(idx, val, lp::Sense::LessEqual, 0.0, "cap_" + inst_->templates[p].id);
    }
    for (int k = 0; k < K_; ++k) m.add_constraint({}, {}, lp::Sense::GreaterEqual, 1.0, "cover_" + scenario().tasks[k].id);
    for (const auto& c : pool_) {
      const int j = m.add_variable(0.0, lp::kInf, c.cost);
      m.constraints[c.duty.template_index].index.push_back(j);
      m.constraints[c.duty.template_index].value.push_back(1.0);
      for (int k : c.duty.tasks) {
        m.constraints[P_ + k].index.push_back(j);
        m.constraints[P_ + k].value.push_back(1.0);
      }
    }
    return m;
  }

  lp::SimplexSolver& pareto_solver() {
    if (!pareto_) pareto_ = std::make_unique<lp::SimplexSolver>(base_model(true));
    return *pareto_;
  }

  // Prices until every task with positive demand lies in some pool column.
  // Afterwards the excess variables keep the master feasible for any rhs.
  void seed_columns() {
    std::vector<char> covered(K_, 0);
    for (const auto& c : pool_)
      for (int k : c.duty.tasks) covered[k] = 1;
    for (;;) {
      std::vector<double> lambda(K_, 0.0);
      bool open = false;
      for (int k = 0; k < K_; ++k)
        if (!covered[k] && cover_rhs_[k] > 0) {
          lambda[k] = inst_->excess_cost;
          open = true;
        }
      if (!open) return;
      bool progress = false;
      for (int p = 0; p < P_; ++p) {
        PricingOptions o = opt_.pricing;
        o.cost_per_minute = 0.0;
        auto col = price_exact(*inst_, scenario(), network(p), 0.0, lambda, o);
        if (!col || col->reduced_cost >= -opt_.pricing.tol_rc) continue;
        col->duty.template_index = p;
        const double cost = opt_.pricing.cost_per_minute * col->duty.length();
        for (int k : col->duty.tasks) covered[k] = 1;
        add_column(std::move(col->duty), cost);
        progress = true;
        break;
      }
      if (!progress) {
        for (int k = 0; k < K_; ++k)
          if (!covered[k] && cover_rhs_[k] > 0)
            throw InputError("task " + scenario().tasks[k].id + " in scenario " + scenario().id +
                             " is not covered by any feasible duty");
      }
    }
  }

  std::vector<PricedColumn> price(const std::vector<double>& theta, const std::vector<double>& lambda) {
    std::vector<std::vector<PricedColumn>> found(P_);
    auto run = [&](bool exact) {
      parallel_for(P_, opt_.threads, [&](int p) {
        found[p].clear();
        const auto& net = network(p);
        if (exact) {
          auto c = price_exact(*inst_, scenario(), net, theta[p], lambda, opt_.pricing);
          if (c && c->reduced_cost < -opt_.pricing.tol_rc) found[p].push_back(std::move(*c));
        } else {
          found[p] = price_heuristic(*inst_, scenario(), net, theta[p], lambda, opt_.pricing);
        }
        for (auto& c : found[p]) c.duty.template_index = p;
      });
      std::vector<PricedColumn> all;
      for (auto& f : found)
        for (auto& c : f)
          if (!index_.contains(c.duty.key_string())) all.push_back(std::move(c));
      return filter_columns(std::move(all), opt_.pricing.disjointness, opt_.pricing.limit);
    };
    if (opt_.use_heuristic) {
      auto cols = run(false);
      if (!cols.empty()) return cols;
    }
    return run(true);
  }

  // Drops nonbasic columns whose reduced cost stayed positive for
  // `removal_streak` consecutive solves.
  int manage(const std::vector<double>& theta, const std::vector<double>& lambda, lp::SimplexSolver& rmp, int offset) {
    const bool on_regular = &rmp == regular_.get();
    const int other_offset = on_regular ? P_ + 1 : P_;
    lp::SimplexSolver* other = on_regular ? pareto_.get() : regular_.get();
    std::vector<int> streaks(pool_.size());
    std::vector<char> basic(pool_.size());
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      auto& c = pool_[i];
      double rc = c.cost - theta[c.duty.template_index];
      for (int k : c.duty.tasks) rc -= lambda[k];
      c.positive_streak = next_streak(c.positive_streak, rc, opt_.pricing.tol_rc);
      streaks[i] = c.positive_streak;
      const int j = static_cast<int>(i);
      basic[i] = rmp.is_basic(offset + j) || (other != nullptr && other->is_basic(other_offset + j));
    }
    const auto drop = select_removals(streaks, basic, opt_.removal_streak);
    if (drop.empty()) return 0;
    std::vector<int> a, b;
    for (int j : drop) {
      a.push_back(P_ + j);
      b.push_back(P_ + 1 + j);
    }
    regular_->remove_columns(a);
    if (pareto_) pareto_->remove_columns(b);
    std::vector<PoolColumn> kept;
    std::size_t d = 0;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      if (d < drop.size() && drop[d] == static_cast<int>(i)) {
        ++d;
        continue;
      }
      kept.push_back(std::move(pool_[i]));
    }
    pool_ = std::move(kept);
    index_.clear();
    for (std::size_t i = 0; i < pool_.size(); ++i) index_.emplace(pool_[i].duty.key_string(), static_cast<int>(i));
    return static_cast<int>(drop.size());
  }

  const Instance* inst_;
  int scenario_;
  BspObjective objective_;
  ColgenOptions opt_;
  int P_ = 0, K_ = 0;
  std::vector<DutyNetwork> networks_;
  std::vector<int> network_of_;
  std::vector<PoolColumn> pool_;
  std::map<std::string, int> index_;
  std::unique_ptr<lp::SimplexSolver> regular_, pareto_;
  std::vector<Duty> fixed_;
  std::vector<int> fixed_per_template_;
  std::vector<double> cover_rhs_;
};

// One-shot convenience wrapper.
inline ColgenResult solve_bsp(const Instance& inst, int scenario, const std::vector<double>& yhat,
                              BspObjective objective = BspObjective::Recovery, const ColgenOptions& opt = {}) {
  ScenarioColgen cg(inst, scenario, objective, opt);
  return cg.solve(yhat);
}

}  // namespace crewplan
