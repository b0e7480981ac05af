#pragma once

// Linear programming contract and a reference bounded revised simplex.
//
// The solver keeps an explicit dense basis inverse, which is adequate for the
// desk-scale models in this library (a few hundred rows). It supports warm
// starts across modifications: after adding columns the previous basis stays
// primal feasible (primal simplex resumes); after changing right-hand sides,
// bounds, or adding rows it stays dual feasible (dual simplex resumes).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "crewplan/errors.hpp"

namespace crewplan::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tolerances {
  double feasibility = 1e-6;
  double integrality = 1e-6;
  double duality = 1e-6;
};

enum class Sense { LessEqual, GreaterEqual, Equal };
enum class ObjectiveSense { Minimize, Maximize };

struct Variable {
  double lower = 0.0;
  double upper = kInf;
  double cost = 0.0;
  bool integer = false;
  std::string name;
};

struct Constraint {
  std::vector<int> index;
  std::vector<double> value;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string name;
};

struct LinearProgram {
  ObjectiveSense objective_sense = ObjectiveSense::Minimize;
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;

  int add_variable(double lower, double upper, double cost, bool integer = false, std::string name = {}) {
    variables.push_back({lower, upper, cost, integer, std::move(name)});
    return static_cast<int>(variables.size()) - 1;
  }

  int add_constraint(std::vector<int> index, std::vector<double> value, Sense sense, double rhs, std::string name = {}) {
    constraints.push_back({std::move(index), std::move(value), sense, rhs, std::move(name)});
    return static_cast<int>(constraints.size()) - 1;
  }

  bool has_integers() const {
    return std::any_of(variables.begin(), variables.end(), [](const Variable& v) { return v.integer; });
  }

  void validate() const {
    const int n = static_cast<int>(variables.size());
    for (const auto& v : variables) {
      if (std::isnan(v.lower) || std::isnan(v.upper) || !std::isfinite(v.cost))
        throw InputError("lp: non-finite variable data (" + v.name + ")");
      if (v.lower > v.upper) throw InputError("lp: variable bounds crossed (" + v.name + ")");
    }
    for (const auto& c : constraints) {
      if (c.index.size() != c.value.size()) throw InputError("lp: row index/value size mismatch (" + c.name + ")");
      if (!std::isfinite(c.rhs)) throw InputError("lp: non-finite rhs (" + c.name + ")");
      for (std::size_t e = 0; e < c.index.size(); ++e) {
        if (c.index[e] < 0 || c.index[e] >= n) throw InputError("lp: row references unknown column (" + c.name + ")");
        if (!std::isfinite(c.value[e])) throw InputError("lp: non-finite coefficient (" + c.name + ")");
      }
    }
  }

  // Activity of every row at x.
  std::vector<double> row_activity(const std::vector<double>& x) const {
    std::vector<double> act(constraints.size(), 0.0);
    for (std::size_t i = 0; i < constraints.size(); ++i)
      for (std::size_t e = 0; e < constraints[i].index.size(); ++e)
        act[i] += constraints[i].value[e] * x[constraints[i].index[e]];
    return act;
  }

  double objective_value(const std::vector<double>& x) const {
    double z = 0.0;
    for (std::size_t j = 0; j < variables.size(); ++j) z += variables[j].cost * x[j];
    return z;
  }

  // Largest bound or row violation of x (absolute).
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < variables.size(); ++j) {
      worst = std::max(worst, variables[j].lower - x[j]);
      worst = std::max(worst, x[j] - variables[j].upper);
    }
    const auto act = row_activity(x);
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      const auto& c = constraints[i];
      const double scale = 1.0 + std::abs(c.rhs);
      double v = 0.0;
      if (c.sense != Sense::GreaterEqual) v = std::max(v, act[i] - c.rhs);
      if (c.sense != Sense::LessEqual) v = std::max(v, c.rhs - act[i]);
      worst = std::max(worst, v / scale);
    }
    return worst;
  }

  bool is_feasible(const std::vector<double>& x, const Tolerances& tol = {}) const {
    if (x.size() != variables.size()) return false;
    if (max_violation(x) > tol.feasibility) return false;
    for (std::size_t j = 0; j < variables.size(); ++j)
      if (variables[j].integer && std::abs(x[j] - std::round(x[j])) > tol.integrality) return false;
    return true;
  }
};

enum class Status { Optimal, TimeLimitFeasible, TimeLimitNoSolution, Infeasible, Unbounded };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::TimeLimitFeasible: return "time-limit-feasible";
    case Status::TimeLimitNoSolution: return "time-limit-no-solution";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

struct LpSolution {
  Status status = Status::Infeasible;
  std::vector<double> primal;
  std::vector<double> dual;          // one per row: d objective / d rhs
  std::vector<double> reduced_cost;  // one per column
  double objective = 0.0;
  double bound = 0.0;  // proven bound (LP: equals objective when optimal)
  double gap = 0.0;
  long iterations = 0;
  long nodes = 0;

  bool has_solution() const { return status == Status::Optimal || status == Status::TimeLimitFeasible; }
};

// Dual objective b.y plus the bound terms of nonbasic columns; equals the
// primal objective at an optimal basis.
inline double dual_objective(const LinearProgram& lp, const LpSolution& sol) {
  const double sign = lp.objective_sense == ObjectiveSense::Minimize ? 1.0 : -1.0;
  double z = 0.0;
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) z += lp.constraints[i].rhs * sol.dual[i];
  for (std::size_t j = 0; j < lp.variables.size(); ++j) {
    const double d = sol.reduced_cost[j];
    if (sign * d > 0 && std::isfinite(lp.variables[j].lower)) z += d * lp.variables[j].lower;
    else if (sign * d < 0 && std::isfinite(lp.variables[j].upper)) z += d * lp.variables[j].upper;
  }
  return z;
}

// Dual sign feasibility of the reported multipliers (minimisation form).
inline double max_dual_infeasibility(const LinearProgram& lp, const LpSolution& sol) {
  const double sign = lp.objective_sense == ObjectiveSense::Minimize ? 1.0 : -1.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const double y = sign * sol.dual[i];
    if (lp.constraints[i].sense == Sense::LessEqual) worst = std::max(worst, y);
    if (lp.constraints[i].sense == Sense::GreaterEqual) worst = std::max(worst, -y);
  }
  for (std::size_t j = 0; j < lp.variables.size(); ++j) {
    const double d = sign * sol.reduced_cost[j];
    const auto& v = lp.variables[j];
    if (!std::isfinite(v.lower) && d > 0) worst = std::max(worst, d);
    if (!std::isfinite(v.upper) && d < 0) worst = std::max(worst, -d);
  }
  return worst;
}

class SimplexSolver {
 public:
  struct Entry {
    int row;
    double value;
  };

  struct Basis {
    std::vector<int> head;
    std::vector<std::int8_t> status;
  };

  SimplexSolver() = default;

  explicit SimplexSolver(const LinearProgram& lp) {
    lp.validate();
    maximize_ = lp.objective_sense == ObjectiveSense::Maximize;
    std::vector<std::vector<Entry>> cols(lp.variables.size());
    std::vector<double> row_max(lp.constraints.size(), 0.0);
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
      const auto& c = lp.constraints[i];
      for (std::size_t e = 0; e < c.index.size(); ++e) row_max[i] = std::max(row_max[i], std::abs(c.value[e]));
    }
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
      const auto& c = lp.constraints[i];
      const double s = row_max[i] > 0 ? 1.0 / row_max[i] : 1.0;
      row_scale_.push_back(s);
      sense_.push_back(c.sense);
      rhs_.push_back(c.rhs * s);
      for (std::size_t e = 0; e < c.index.size(); ++e)
        if (c.value[e] != 0.0) cols[c.index[e]].push_back({static_cast<int>(i), c.value[e] * s});
    }
    m_ = static_cast<int>(lp.constraints.size());
    for (std::size_t j = 0; j < lp.variables.size(); ++j) {
      const auto& v = lp.variables[j];
      append_var(Kind::Structural, v.lower, v.upper, maximize_ ? -v.cost : v.cost, std::move(cols[j]));
    }
    for (int i = 0; i < m_; ++i) add_logicals(i);
  }

  int num_rows() const { return m_; }
  int num_columns() const { return static_cast<int>(structural_.size()); }

  void set_column_bounds(int j, double lower, double upper) {
    const int v = structural_.at(j);
    lower_[v] = lower;
    upper_[v] = upper;
    reset_nonbasic_value(v);
  }
  std::pair<double, double> column_bounds(int j) const { return {lower_[structural_[j]], upper_[structural_[j]]}; }

  void set_cost(int j, double cost) { cost_[structural_.at(j)] = maximize_ ? -cost : cost; }

  void set_rhs(int i, double rhs) { rhs_.at(i) = rhs * row_scale_[i]; }
  double rhs(int i) const { return rhs_[i] / row_scale_[i]; }

  // Appends a column; the current basis remains valid with it nonbasic.
  int add_column(double lower, double upper, double cost, const std::vector<std::pair<int, double>>& entries) {
    std::vector<Entry> col;
    for (const auto& [row, value] : entries) {
      if (row < 0 || row >= m_) throw InputError("lp: column references unknown row");
      if (value != 0.0) col.push_back({row, value * row_scale_[row]});
    }
    const int v = append_var(Kind::Structural, lower, upper, maximize_ ? -cost : cost, std::move(col));
    if (has_basis_) {
      status_.push_back(initial_status(v));
      x_.push_back(nonbasic_value(v));
    }
    return num_columns() - 1;
  }

  // Replaces the coefficients of column j (forces a refactorisation when basic).
  void set_column(int j, const std::vector<std::pair<int, double>>& entries) {
    const int v = structural_.at(j);
    cols_[v].clear();
    for (const auto& [row, value] : entries)
      if (value != 0.0) cols_[v].push_back({row, value * row_scale_[row]});
    if (has_basis_ && status_[v] == kBasic) needs_refactor_ = true;
  }

  // Appends a row; its slack enters the basis.
  int add_row(const std::vector<std::pair<int, double>>& entries, Sense sense, double rhs) {
    double mx = 0.0;
    for (const auto& e : entries) mx = std::max(mx, std::abs(e.second));
    const double s = mx > 0 ? 1.0 / mx : 1.0;
    const int i = m_++;
    row_scale_.push_back(s);
    sense_.push_back(sense);
    rhs_.push_back(rhs * s);
    for (const auto& [j, value] : entries) {
      if (j < 0 || j >= num_columns()) throw InputError("lp: row references unknown column");
      if (value != 0.0) cols_[structural_[j]].push_back({i, value * s});
    }
    add_logicals(i);
    if (has_basis_) {
      const int sv = slack_[i];
      status_.push_back(kBasic);
      x_.push_back(0.0);
      status_.push_back(kAtLower);
      x_.push_back(0.0);
      head_.push_back(sv);
      needs_refactor_ = true;
    }
    return i;
  }

  bool is_basic(int j) const { return has_basis_ && status_[structural_.at(j)] == kBasic; }

  // Removes the given structural columns, which must be nonbasic.
  void remove_columns(std::vector<int> columns) {
    if (columns.empty()) return;
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
    std::vector<char> drop(kind_.size(), 0);
    for (int j : columns) {
      const int v = structural_.at(j);
      if (has_basis_ && status_[v] == kBasic) throw InputError("lp: cannot remove a basic column");
      drop[v] = 1;
    }
    std::vector<int> remap(kind_.size(), -1);
    int next = 0;
    for (std::size_t v = 0; v < kind_.size(); ++v)
      if (!drop[v]) remap[v] = next++;
    auto compact = [&](auto& vec) {
      std::size_t w = 0;
      for (std::size_t v = 0; v < vec.size(); ++v)
        if (!drop[v]) {
          if (w != v) vec[w] = std::move(vec[v]);  // self-move would clear inner vectors
          ++w;
        }
      vec.resize(w);
    };
    compact(kind_);
    compact(lower_);
    compact(upper_);
    compact(cost_);
    compact(cols_);
    if (has_basis_) {
      compact(status_);
      compact(x_);
      for (int& h : head_) h = remap[h];
    }
    std::vector<int> new_struct;
    for (int v : structural_)
      if (remap[v] >= 0) new_struct.push_back(remap[v]);
    structural_ = std::move(new_struct);
    for (int& s : slack_) s = remap[s];
    for (int& a : artificial_) a = remap[a];
  }

  Basis basis() const { return {head_, status_}; }

  void set_basis(const Basis& b) {
    if (b.head.size() != static_cast<std::size_t>(m_) || b.status.size() != kind_.size()) {
      has_basis_ = false;
      return;
    }
    head_ = b.head;
    status_ = b.status;
    x_.assign(kind_.size(), 0.0);
    for (std::size_t v = 0; v < kind_.size(); ++v)
      if (status_[v] != kBasic) {
        if (status_[v] == kAtLower && !std::isfinite(lower_[v])) status_[v] = initial_status(static_cast<int>(v));
        if (status_[v] == kAtUpper && !std::isfinite(upper_[v])) status_[v] = initial_status(static_cast<int>(v));
        x_[v] = nonbasic_value(static_cast<int>(v));
      }
    has_basis_ = true;
    needs_refactor_ = true;
  }

  void reset_basis() { has_basis_ = false; }

  LpSolution solve() {
    LpSolution sol;
    iterations_ = 0;
    Outcome outcome = Outcome::Optimal;
    bool done = false;
    if (has_basis_ && (!needs_refactor_ || refactor())) {
      recompute_primal();
      if (primal_feasible()) {
        outcome = primal(false);
        done = outcome != Outcome::Failed;
      } else if (dual_feasible()) {
        outcome = dual();
        if (outcome == Outcome::Optimal) outcome = primal(false);
        done = outcome != Outcome::Failed;
      }
    }
    if (!done) outcome = cold_solve();
    if (outcome == Outcome::Failed) throw SolveError("lp: simplex failed to converge (iteration limit or numerical breakdown)");
    if (outcome == Outcome::Optimal && !final_check()) {
      // One cold retry before reporting a numerical failure.
      outcome = cold_solve();
      if (outcome == Outcome::Failed || (outcome == Outcome::Optimal && !final_check()))
        throw SolveError("lp: numerical failure, solution violates feasibility after refactorisation");
    }
    sol.iterations = iterations_;
    if (outcome == Outcome::Infeasible) {
      sol.status = Status::Infeasible;
      return sol;
    }
    if (outcome == Outcome::Unbounded) {
      sol.status = Status::Unbounded;
      return sol;
    }
    sol.status = Status::Optimal;
    extract(sol);
    return sol;
  }

  long last_iterations() const { return iterations_; }

 private:
  enum class Kind : std::uint8_t { Structural, Slack, Artificial };
  enum class Outcome { Optimal, Infeasible, Unbounded, Failed };
  static constexpr std::int8_t kBasic = 0, kAtLower = 1, kAtUpper = 2, kFree = 3;

  static constexpr double kPivotTol = 1e-9;
  static constexpr double kPrimalTol = 1e-9;
  static constexpr double kDualTol = 1e-9;
  static constexpr int kRefactorInterval = 64;

  int append_var(Kind kind, double lower, double upper, double cost, std::vector<Entry> col) {
    kind_.push_back(kind);
    lower_.push_back(lower);
    upper_.push_back(upper);
    cost_.push_back(cost);
    cols_.push_back(std::move(col));
    const int v = static_cast<int>(kind_.size()) - 1;
    if (kind == Kind::Structural) structural_.push_back(v);
    return v;
  }

  void add_logicals(int i) {
    double lo = 0.0, hi = 0.0;
    switch (sense_[i]) {
      case Sense::LessEqual: lo = 0.0; hi = kInf; break;
      case Sense::GreaterEqual: lo = -kInf; hi = 0.0; break;
      case Sense::Equal: lo = 0.0; hi = 0.0; break;
    }
    slack_.push_back(append_var(Kind::Slack, lo, hi, 0.0, {{i, 1.0}}));
    artificial_.push_back(append_var(Kind::Artificial, 0.0, 0.0, 0.0, {{i, 1.0}}));
  }

  std::int8_t initial_status(int v) const {
    if (std::isfinite(lower_[v])) return kAtLower;
    if (std::isfinite(upper_[v])) return kAtUpper;
    return kFree;
  }

  double nonbasic_value(int v) const {
    switch (status_[v]) {
      case kAtLower: return lower_[v];
      case kAtUpper: return upper_[v];
      default: return 0.0;
    }
  }

  void reset_nonbasic_value(int v) {
    if (!has_basis_ || status_[v] == kBasic) return;
    if (status_[v] == kAtLower && !std::isfinite(lower_[v])) status_[v] = initial_status(v);
    if (status_[v] == kAtUpper && !std::isfinite(upper_[v])) status_[v] = initial_status(v);
    if (status_[v] == kFree && (std::isfinite(lower_[v]) || std::isfinite(upper_[v]))) status_[v] = initial_status(v);
    x_[v] = nonbasic_value(v);
  }

  double tol_primal(double bound) const { return kPrimalTol * std::max(1.0, std::abs(bound)); }

  double dual_tol() const {
    double mx = 1.0;
    for (double c : cost_) mx = std::max(mx, std::abs(c));
    return kDualTol * mx;
  }

  // Explicit basis inverse. Singleton basic columns (slacks, artificials) are
  // eliminated directly, so only the kernel of the remaining columns on the
  // remaining rows goes through Gauss-Jordan. Returns false when singular.
  bool refactor() {
    const int m = m_;
    std::vector<int> owner(m, -1);  // row -> singleton basis position
    std::vector<int> kpos, krow;    // kernel positions and rows
    for (int r = 0; r < m; ++r) {
      const auto& col = cols_[head_[r]];
      if (col.size() == 1 && std::abs(col[0].value) > 1e-11 && owner[col[0].row] < 0) owner[col[0].row] = r;
      else kpos.push_back(r);
    }
    std::vector<int> kindex(m, -1);  // row -> kernel row index
    for (int i = 0; i < m; ++i)
      if (owner[i] < 0) {
        kindex[i] = static_cast<int>(krow.size());
        krow.push_back(i);
      }
    const int t = static_cast<int>(kpos.size());
    if (static_cast<int>(krow.size()) != t) return false;

    // Kernel K (rows krow, columns kpos) and its inverse, rows by position.
    std::vector<double> a(static_cast<std::size_t>(t) * t, 0.0), kinv(static_cast<std::size_t>(t) * t, 0.0);
    std::vector<std::vector<std::pair<int, double>>> outside(m);  // row -> (kernel column, value) on singleton rows
    for (int j = 0; j < t; ++j)
      for (const auto& e : cols_[head_[kpos[j]]]) {
        if (kindex[e.row] >= 0) a[static_cast<std::size_t>(kindex[e.row]) * t + j] = e.value;
        else outside[e.row].emplace_back(j, e.value);
      }
    for (int i = 0; i < t; ++i) kinv[static_cast<std::size_t>(i) * t + i] = 1.0;
    for (int c = 0; c < t; ++c) {
      int piv = -1;
      double best = 1e-11;
      for (int r = c; r < t; ++r) {
        const double v = std::abs(a[static_cast<std::size_t>(r) * t + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (piv < 0) return false;
      if (piv != c)
        for (int k = 0; k < t; ++k) {
          std::swap(a[static_cast<std::size_t>(piv) * t + k], a[static_cast<std::size_t>(c) * t + k]);
          std::swap(kinv[static_cast<std::size_t>(piv) * t + k], kinv[static_cast<std::size_t>(c) * t + k]);
        }
      const double inv = 1.0 / a[static_cast<std::size_t>(c) * t + c];
      for (int k = 0; k < t; ++k) {
        a[static_cast<std::size_t>(c) * t + k] *= inv;
        kinv[static_cast<std::size_t>(c) * t + k] *= inv;
      }
      for (int r = 0; r < t; ++r) {
        if (r == c) continue;
        const double f = a[static_cast<std::size_t>(r) * t + c];
        if (f == 0.0) continue;
        double* ar = &a[static_cast<std::size_t>(r) * t];
        const double* ac = &a[static_cast<std::size_t>(c) * t];
        double* br = &kinv[static_cast<std::size_t>(r) * t];
        const double* bc = &kinv[static_cast<std::size_t>(c) * t];
        for (int k = 0; k < t; ++k) {
          ar[k] -= f * ac[k];
          br[k] -= f * bc[k];
        }
      }
    }
    // Row j of kinv gives kernel variable j; row r of binv_ belongs to basis
    // position r.
    binv_.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int j = 0; j < t; ++j) {
      double* dst = &binv_[static_cast<std::size_t>(kpos[j]) * m];
      const double* src = &kinv[static_cast<std::size_t>(j) * t];
      for (int i = 0; i < t; ++i) dst[krow[i]] = src[i];
    }
    // Singleton on row i0 with value v: x = (b_i0 - sum_j a_i0j x_j) / v.
    for (int i0 = 0; i0 < m; ++i0) {
      const int r = owner[i0];
      if (r < 0) continue;
      const double v = cols_[head_[r]][0].value;
      double* dst = &binv_[static_cast<std::size_t>(r) * m];
      dst[i0] = 1.0 / v;
      for (const auto& [j, val] : outside[i0]) {
        const double f = val / v;
        const double* src = &kinv[static_cast<std::size_t>(j) * t];
        for (int i = 0; i < t; ++i) dst[krow[i]] -= f * src[i];
      }
    }
    updates_since_refactor_ = 0;
    needs_refactor_ = false;
    return true;
  }

  // B^-1 * column(v)
  void ftran(int v, std::vector<double>& out) const {
    const int m = m_;
    out.assign(m, 0.0);
    for (const auto& e : cols_[v]) {
      const double val = e.value;
      for (int r = 0; r < m; ++r) out[r] += binv_[static_cast<std::size_t>(r) * m + e.row] * val;
    }
  }

  void compute_duals(const std::vector<double>& cost, std::vector<double>& y) const {
    const int m = m_;
    y.assign(m, 0.0);
    for (int r = 0; r < m; ++r) {
      const double cb = cost[head_[r]];
      if (cb == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(r) * m];
      for (int i = 0; i < m; ++i) y[i] += cb * row[i];
    }
  }

  double reduced(int v, const std::vector<double>& cost, const std::vector<double>& y) const {
    double d = cost[v];
    for (const auto& e : cols_[v]) d -= y[e.row] * e.value;
    return d;
  }

  void recompute_primal() {
    const int m = m_;
    std::vector<double> r(rhs_);
    for (std::size_t v = 0; v < kind_.size(); ++v) {
      if (status_[v] == kBasic) continue;
      x_[v] = nonbasic_value(static_cast<int>(v));
      if (x_[v] != 0.0)
        for (const auto& e : cols_[v]) r[e.row] -= e.value * x_[v];
    }
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      const double* row = &binv_[static_cast<std::size_t>(i) * m];
      for (int k = 0; k < m; ++k) s += row[k] * r[k];
      x_[head_[i]] = s;
    }
  }

  bool primal_feasible() const {
    for (int r = 0; r < m_; ++r) {
      const int v = head_[r];
      if (x_[v] < lower_[v] - tol_primal(lower_[v]) || x_[v] > upper_[v] + tol_primal(upper_[v])) return false;
    }
    return true;
  }

  bool dual_feasible() const {
    std::vector<double> y;
    compute_duals(cost_, y);
    const double tol = dual_tol();
    for (std::size_t v = 0; v < kind_.size(); ++v) {
      if (status_[v] == kBasic || lower_[v] == upper_[v]) continue;
      const double d = reduced(static_cast<int>(v), cost_, y);
      if (status_[v] == kAtLower && d < -tol) return false;
      if (status_[v] == kAtUpper && d > tol) return false;
      if (status_[v] == kFree && std::abs(d) > tol) return false;
    }
    return true;
  }

  void pivot_update(int r, const std::vector<double>& alpha) {
    const int m = m_;
    double* prow = &binv_[static_cast<std::size_t>(r) * m];
    const double inv = 1.0 / alpha[r];
    for (int k = 0; k < m; ++k) prow[k] *= inv;
    for (int i = 0; i < m; ++i) {
      if (i == r || alpha[i] == 0.0) continue;
      const double f = alpha[i];
      double* row = &binv_[static_cast<std::size_t>(i) * m];
      for (int k = 0; k < m; ++k) row[k] -= f * prow[k];
    }
    ++updates_since_refactor_;
  }

  bool maybe_refactor() {
    if (updates_since_refactor_ >= kRefactorInterval || needs_refactor_) {
      if (!refactor()) return false;
      recompute_primal();
    }
    return true;
  }

  long iteration_cap() const { return 20000 + 50L * (m_ + static_cast<long>(kind_.size())); }

  Outcome primal(bool phase_one) {
    const std::vector<double>* cost = &cost_;
    std::vector<double> phase_cost;
    if (phase_one) {
      phase_cost.assign(kind_.size(), 0.0);
      for (std::size_t v = 0; v < kind_.size(); ++v)
        if (kind_[v] == Kind::Artificial) phase_cost[v] = 1.0;
      cost = &phase_cost;
    }
    const double tol_d = phase_one ? kDualTol : dual_tol();
    std::vector<double> y, alpha;
    int degenerate_run = 0;
    bool bland = false;
    const long cap = iteration_cap();
    while (true) {
      if (iterations_ > cap) return Outcome::Failed;
      if (!maybe_refactor()) return Outcome::Failed;
      compute_duals(*cost, y);
      int q = -1;
      double best = 0.0;
      double dq = 0.0;
      for (std::size_t vv = 0; vv < kind_.size(); ++vv) {
        const int v = static_cast<int>(vv);
        if (status_[v] == kBasic || lower_[v] == upper_[v]) continue;
        const double d = reduced(v, *cost, y);
        double score = 0.0;
        if (status_[v] == kAtLower && d < -tol_d) score = -d;
        else if (status_[v] == kAtUpper && d > tol_d) score = d;
        else if (status_[v] == kFree && std::abs(d) > tol_d) score = std::abs(d);
        if (score <= 0.0) continue;
        if (bland) {
          q = v;
          dq = d;
          break;
        }
        if (score > best) {
          best = score;
          q = v;
          dq = d;
        }
      }
      if (q < 0) return Outcome::Optimal;
      const double dir = dq < 0 ? 1.0 : -1.0;
      ftran(q, alpha);
      // Harris two-pass ratio test.
      double t_relaxed = kInf;
      for (int r = 0; r < m_; ++r) {
        const double a = alpha[r] * dir;
        const int b = head_[r];
        if (a > kPivotTol && std::isfinite(lower_[b]))
          t_relaxed = std::min(t_relaxed, (x_[b] - lower_[b] + tol_primal(lower_[b])) / a);
        else if (a < -kPivotTol && std::isfinite(upper_[b]))
          t_relaxed = std::min(t_relaxed, (upper_[b] - x_[b] + tol_primal(upper_[b])) / -a);
      }
      const double flip = upper_[q] - lower_[q];
      int leave = -1;
      double t = kInf;
      if (std::isfinite(t_relaxed)) {
        double best_alpha = 0.0;
        for (int r = 0; r < m_; ++r) {
          const double a = alpha[r] * dir;
          const int b = head_[r];
          double tr = kInf;
          if (a > kPivotTol && std::isfinite(lower_[b])) tr = (x_[b] - lower_[b]) / a;
          else if (a < -kPivotTol && std::isfinite(upper_[b])) tr = (upper_[b] - x_[b]) / -a;
          else continue;
          if (tr > t_relaxed) continue;
          const bool better = bland ? (leave < 0 || head_[r] < head_[leave]) : std::abs(a) > best_alpha;
          if (better) {
            best_alpha = std::abs(a);
            leave = r;
            t = std::max(tr, 0.0);
          }
        }
      }
      ++iterations_;
      if (std::isfinite(flip) && flip <= t) {
        // Entering variable moves to its opposite bound.
        for (int r = 0; r < m_; ++r) x_[head_[r]] -= dir * flip * alpha[r];
        status_[q] = status_[q] == kAtLower ? kAtUpper : kAtLower;
        x_[q] = nonbasic_value(q);
        degenerate_run = 0;
        bland = false;
        continue;
      }
      if (leave < 0) return phase_one ? Outcome::Failed : Outcome::Unbounded;
      if (std::abs(alpha[leave]) < kPivotTol) return Outcome::Failed;
      for (int r = 0; r < m_; ++r) x_[head_[r]] -= dir * t * alpha[r];
      x_[q] += dir * t;
      const int out = head_[leave];
      const double a = alpha[leave] * dir;
      status_[out] = a > 0 ? kAtLower : kAtUpper;
      if (lower_[out] == upper_[out]) status_[out] = kAtLower;
      x_[out] = nonbasic_value(out);
      status_[q] = kBasic;
      head_[leave] = q;
      pivot_update(leave, alpha);
      if (t * std::abs(dq) <= 1e-12) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  Outcome dual() {
    const double tol_d = dual_tol();
    std::vector<double> y, alpha, rho(m_);
    int stall = 0;
    bool bland = false;
    const long cap = iteration_cap();
    while (true) {
      if (iterations_ > cap) return Outcome::Failed;
      if (!maybe_refactor()) return Outcome::Failed;
      int r = -1;
      double worst = 0.0;
      for (int i = 0; i < m_; ++i) {
        const int b = head_[i];
        double viol = 0.0;
        if (x_[b] < lower_[b] - tol_primal(lower_[b])) viol = lower_[b] - x_[b];
        else if (x_[b] > upper_[b] + tol_primal(upper_[b])) viol = x_[b] - upper_[b];
        if (viol <= 0.0) continue;
        if (bland) {
          if (r < 0 || head_[i] < head_[r]) r = i;
        } else if (viol > worst) {
          worst = viol;
          r = i;
        }
      }
      if (r < 0) return Outcome::Optimal;
      const int out = head_[r];
      const bool to_lower = x_[out] < lower_[out];
      for (int k = 0; k < m_; ++k) rho[k] = binv_[static_cast<std::size_t>(r) * m_ + k];
      compute_duals(cost_, y);
      // Two-pass dual ratio test.
      struct Cand {
        int v;
        double alpha;
        double d;
      };
      std::vector<Cand> cands;
      double relaxed = kInf;
      for (std::size_t vv = 0; vv < kind_.size(); ++vv) {
        const int v = static_cast<int>(vv);
        if (status_[v] == kBasic || lower_[v] == upper_[v]) continue;
        double a = 0.0;
        for (const auto& e : cols_[v]) a += rho[e.row] * e.value;
        if (std::abs(a) <= kPivotTol) continue;
        const std::int8_t st = status_[v];
        bool ok = false;
        if (to_lower) ok = (st == kAtLower && a < 0) || (st == kAtUpper && a > 0) || st == kFree;
        else ok = (st == kAtLower && a > 0) || (st == kAtUpper && a < 0) || st == kFree;
        if (!ok) continue;
        const double d = reduced(v, cost_, y);
        cands.push_back({v, a, d});
        relaxed = std::min(relaxed, (std::abs(d) + tol_d) / std::abs(a));
      }
      if (cands.empty()) return Outcome::Infeasible;
      int q = -1;
      double best_alpha = 0.0;
      for (const auto& c : cands) {
        if (std::abs(c.d) / std::abs(c.alpha) > relaxed) continue;
        const bool better = bland ? (q < 0 || c.v < q) : std::abs(c.alpha) > best_alpha;
        if (better) {
          best_alpha = std::abs(c.alpha);
          q = c.v;
        }
      }
      ftran(q, alpha);
      if (std::abs(alpha[r]) < kPivotTol) return Outcome::Failed;
      const double target = to_lower ? lower_[out] : upper_[out];
      const double delta = (x_[out] - target) / alpha[r];
      for (int i = 0; i < m_; ++i) x_[head_[i]] -= delta * alpha[i];
      x_[q] += delta;
      status_[out] = to_lower ? kAtLower : kAtUpper;
      x_[out] = target;
      status_[q] = kBasic;
      head_[r] = q;
      pivot_update(r, alpha);
      ++iterations_;
      if (std::abs(delta) <= 1e-12) {
        if (++stall > 50) bland = true;
      } else {
        stall = 0;
        bland = false;
      }
    }
  }

  Outcome cold_solve() {
    status_.assign(kind_.size(), kAtLower);
    x_.assign(kind_.size(), 0.0);
    head_.assign(m_, -1);
    for (std::size_t v = 0; v < kind_.size(); ++v) {
      if (kind_[v] == Kind::Artificial) {
        lower_[v] = 0.0;
        upper_[v] = 0.0;
      }
      status_[v] = initial_status(static_cast<int>(v));
      x_[v] = nonbasic_value(static_cast<int>(v));
    }
    std::vector<double> r(rhs_);
    for (int v : structural_)
      if (x_[v] != 0.0)
        for (const auto& e : cols_[v]) r[e.row] -= e.value * x_[v];
    bool need_phase_one = false;
    for (int i = 0; i < m_; ++i) {
      const int s = slack_[i];
      const int a = artificial_[i];
      cols_[a] = {{i, 1.0}};
      if (r[i] >= lower_[s] - tol_primal(lower_[s]) && r[i] <= upper_[s] + tol_primal(upper_[s])) {
        status_[s] = kBasic;
        x_[s] = r[i];
        head_[i] = s;
        continue;
      }
      const double bound = r[i] < lower_[s] ? lower_[s] : upper_[s];
      status_[s] = bound == lower_[s] ? kAtLower : kAtUpper;
      x_[s] = bound;
      const double residual = r[i] - bound;
      cols_[a] = {{i, residual > 0 ? 1.0 : -1.0}};
      upper_[a] = kInf;
      status_[a] = kBasic;
      x_[a] = std::abs(residual);
      head_[i] = a;
      need_phase_one = true;
    }
    has_basis_ = true;
    if (!refactor()) return Outcome::Failed;
    recompute_primal();
    if (need_phase_one) {
      const Outcome p1 = primal(true);
      if (p1 == Outcome::Failed) return p1;
      double infeas = 0.0;
      for (std::size_t v = 0; v < kind_.size(); ++v)
        if (kind_[v] == Kind::Artificial) infeas += x_[v];
      for (std::size_t v = 0; v < kind_.size(); ++v)
        if (kind_[v] == Kind::Artificial) {
          upper_[v] = 0.0;
          if (status_[v] != kBasic) {
            status_[v] = kAtLower;
            x_[v] = 0.0;
          }
        }
      if (infeas > 1e-7 * (1.0 + max_abs_rhs())) return Outcome::Infeasible;
      recompute_primal();
      if (!primal_feasible()) {
        // Basic artificials left slightly off zero; let the dual simplex clean up.
        if (dual_feasible()) {
          const Outcome d = dual();
          if (d != Outcome::Optimal) return d == Outcome::Infeasible ? Outcome::Infeasible : Outcome::Failed;
        } else {
          for (std::size_t v = 0; v < kind_.size(); ++v)
            if (kind_[v] == Kind::Artificial && status_[v] == kBasic) {
              lower_[v] = std::min(0.0, x_[v]);
              upper_[v] = std::max(0.0, x_[v]);
            }
        }
      }
    }
    const Outcome p2 = primal(false);
    for (std::size_t v = 0; v < kind_.size(); ++v)
      if (kind_[v] == Kind::Artificial) {
        lower_[v] = 0.0;
        upper_[v] = 0.0;
      }
    return p2;
  }

  double max_abs_rhs() const {
    double mx = 0.0;
    for (double b : rhs_) mx = std::max(mx, std::abs(b));
    return mx;
  }

  bool final_check() {
    if (!refactor()) return false;
    recompute_primal();
    if (primal_feasible() && dual_feasible()) return true;
    // Polish: resume from the refactored basis.
    Outcome o = Outcome::Optimal;
    if (primal_feasible()) o = primal(false);
    else if (dual_feasible()) {
      o = dual();
      if (o == Outcome::Optimal) o = primal(false);
    } else return false;
    if (o != Outcome::Optimal) return false;
    if (!refactor()) return false;
    recompute_primal();
    return primal_feasible();
  }

  void extract(LpSolution& sol) const {
    const double sign = maximize_ ? -1.0 : 1.0;
    std::vector<double> y;
    compute_duals(cost_, y);
    sol.primal.resize(structural_.size());
    sol.reduced_cost.resize(structural_.size());
    double z = 0.0;
    for (std::size_t j = 0; j < structural_.size(); ++j) {
      const int v = structural_[j];
      double xv = x_[v];
      if (status_[v] != kBasic) xv = nonbasic_value(v);
      sol.primal[j] = xv;
      sol.reduced_cost[j] = sign * (status_[v] == kBasic ? 0.0 : reduced(v, cost_, y));
      z += cost_[v] * xv;
    }
    sol.dual.resize(m_);
    for (int i = 0; i < m_; ++i) sol.dual[i] = sign * y[i] * row_scale_[i];
    sol.objective = sign * z;
    sol.bound = sol.objective;
    sol.gap = 0.0;
  }

  bool maximize_ = false;
  int m_ = 0;
  std::vector<Kind> kind_;
  std::vector<double> lower_, upper_, cost_;
  std::vector<std::vector<Entry>> cols_;
  std::vector<int> structural_, slack_, artificial_;
  std::vector<double> row_scale_, rhs_;
  std::vector<Sense> sense_;

  bool has_basis_ = false;
  bool needs_refactor_ = false;
  std::vector<int> head_;
  std::vector<std::int8_t> status_;
  std::vector<double> x_;
  std::vector<double> binv_;
  int updates_since_refactor_ = 0;
  long iterations_ = 0;
};

// Solves a pure LP (integrality flags must be absent).
inline LpSolution solve_lp(const LinearProgram& lp) {
  if (lp.has_integers()) throw InputError("solve_lp: model has integer variables; use solve_milp");
  SimplexSolver solver(lp);
  return solver.solve();
}

// Writes the model in CPLEX LP text format for cross-checking with external
// solvers.
inline void write_lp_text(const LinearProgram& lp, std::ostream& out) {
  auto name = [&](int j) {
    const auto& n = lp.variables[j].name;
    return n.empty() ? "x" + std::to_string(j) : n;
  };
  auto term = [&](std::ostream& os, double c, int j, bool first) {
    if (c < 0) os << " - " << -c << ' ' << name(j);
    else if (!first) os << " + " << c << ' ' << name(j);
    else os << ' ' << c << ' ' << name(j);
  };
  out.precision(17);
  out << (lp.objective_sense == ObjectiveSense::Minimize ? "Minimize\n" : "Maximize\n") << " obj:";
  bool first = true;
  for (std::size_t j = 0; j < lp.variables.size(); ++j)
    if (lp.variables[j].cost != 0.0) {
      term(out, lp.variables[j].cost, static_cast<int>(j), first);
      first = false;
    }
  if (first) out << " 0 " << name(0);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& c = lp.constraints[i];
    out << ' ' << (c.name.empty() ? "c" + std::to_string(i) : c.name) << ':';
    bool f = true;
    for (std::size_t e = 0; e < c.index.size(); ++e) {
      term(out, c.value[e], c.index[e], f);
      f = false;
    }
    if (f) out << " 0 " << name(0);
    out << (c.sense == Sense::LessEqual ? " <= " : c.sense == Sense::GreaterEqual ? " >= " : " = ") << c.rhs << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < lp.variables.size(); ++j) {
    const auto& v = lp.variables[j];
    out << ' ';
    if (std::isfinite(v.lower)) out << v.lower;
    else out << "-inf";
    out << " <= " << name(static_cast<int>(j)) << " <= ";
    if (std::isfinite(v.upper)) out << v.upper;
    else out << "+inf";
    out << '\n';
  }
  bool any_int = false;
  for (std::size_t j = 0; j < lp.variables.size(); ++j)
    if (lp.variables[j].integer) {
      if (!any_int) out << "General\n";
      any_int = true;
      out << ' ' << name(static_cast<int>(j)) << '\n';
    }
  out << "End\n";
}

}  // namespace crewplan::lp
