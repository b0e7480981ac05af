#pragma once

// Benchmark column generation over cross-scenario template columns.
//
// A template column picks one template window and one duty per scenario (or
// an idle slot). The restricted master is
//
//   min  sum_w c_p(w) t_w + eta
//   s.t. sum_w a_kw t_w + sum_d a_kd u_d >= 1      per scenario task k
//        c_E sum_{d in s} u_d - eta <= 0           per scenario s
//
// with u_d excess copies of pool duties. First-layer pricing runs a labelling
// pass per template window over the layered network of pool duties; when it
// finds nothing, second-layer pricing generates new duties whose aggregated
// reduced cost is negative. Integer solutions come from repeatedly rounding up
// the largest fractional variable and re-solving.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crewplan/benders.hpp"
#include "crewplan/colgen.hpp"
#include "crewplan/lp.hpp"
#include "crewplan/parallel.hpp"
#include "crewplan/pricing.hpp"
#include "crewplan/report.hpp"

namespace crewplan {

struct BenchmarkOptions {
  int node_budget = 5000;
  bool source_all_partitions = false;  // variant: paths may start in any partition
  PricingOptions pricing;
  int template_limit = 50;  // template columns added per round
  int max_iterations = 100000;
  int max_fixings = 100000;
  double time_limit = 1e30;
  bool integerize = true;
  Minutes start_grid = 30;
  int threads = 1;
};

// Rejects instances outside the benchmark's problem class.
inline void check_benchmark_supported(const Instance& inst, Minutes grid = 30) {
  auto fail = [](const std::string& what) { throw InputError("unsupported by benchmark: " + what); };
  if (!inst.rostering_constraints.empty()) fail("rostering constraints");
  int regular = 0;
  for (const auto& t : inst.templates) {
    if (t.is_reserve) fail("reserve template " + t.id);
    if (grid > 0 && ((t.earliest_start % grid) + grid) % grid != 0) fail("template " + t.id + " starts off the grid");
    ++regular;
  }
  if (inst.gamma < regular) fail("gamma restriction");
}

struct TemplateColumn {
  int template_index = -1;
  std::vector<std::optional<Duty>> duties;  // per scenario; nullopt = idle
  Minutes window_start = 0;                 // span of the duties
  Minutes window_end = 0;

  std::string key() const {
    std::string s = std::to_string(template_index);
    for (const auto& d : duties) s += "|" + (d ? d->key_string() : std::string("-"));
    return s;
  }
};

// Layered network: partition s holds the pool duties of scenario s plus an
// idle node. Arcs join consecutive partitions; the source reaches partition 0
// only unless `source_all` is set.
struct TailoredNetwork {
  std::vector<std::vector<Duty>> partitions;
  bool source_all = false;

  int node_count() const {
    int n = 0;
    for (const auto& p : partitions) n += static_cast<int>(p.size());
    return n;
  }
};

// True when some template window holds every listed duty.
inline bool windows_compatible(const Instance& inst, const Scenario* const* scenarios, const Duty* const* duties, int n) {
  for (const auto& t : inst.templates) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = duty_fits_template(inst, *scenarios[i], *duties[i], t);
    if (ok) return true;
  }
  return false;
}

inline bool duties_compatible(const Instance& inst, int sa, const Duty& a, int sb, const Duty& b) {
  const Scenario* sc[2] = {&inst.scenarios[sa], &inst.scenarios[sb]};
  const Duty* du[2] = {&a, &b};
  return windows_compatible(inst, sc, du, 2);
}

// Arcs between consecutive partitions, idle nodes excluded.
inline long count_arcs(const Instance& inst, const TailoredNetwork& net) {
  long arcs = 0;
  for (std::size_t s = 0; s + 1 < net.partitions.size(); ++s)
    for (const auto& a : net.partitions[s])
      for (const auto& b : net.partitions[s + 1])
        arcs += duties_compatible(inst, static_cast<int>(s), a, static_cast<int>(s + 1), b);
  return arcs;
}

struct PricedTemplate {
  TemplateColumn column;
  double reduced_cost = 0.0;
};

// First-layer pricing. For each template window, a labelling pass over the
// network restricted to duties fitting it keeps one best label per partition;
// every arc of the restricted network is feasible, so that label is exact.
// lambda[s][k] are cover duals.
inline std::vector<PricedTemplate> price_templates(const Instance& inst, const TailoredNetwork& net,
                                                   const std::vector<std::vector<double>>& lambda, double tol = 1e-6,
                                                   int limit = 50) {
  const int S = static_cast<int>(net.partitions.size());
  std::vector<PricedTemplate> out;
  for (std::size_t p = 0; p < inst.templates.size(); ++p) {
    const auto& tmpl = inst.templates[p];
    double value = 0.0;
    TemplateColumn col;
    col.template_index = static_cast<int>(p);
    col.duties.assign(S, std::nullopt);
    for (int s = 0; s < S; ++s) {
      const auto& sc = inst.scenarios[s];
      int best = -1;
      double best_v = 0.0;
      for (std::size_t i = 0; i < net.partitions[s].size(); ++i) {
        const Duty& d = net.partitions[s][i];
        if (!duty_fits_template(inst, sc, d, tmpl)) continue;
        double v = 0.0;
        for (int k : d.tasks) v += lambda[s][k];
        if (v > best_v + 1e-12 || (best >= 0 && std::abs(v - best_v) <= 1e-12 && d < net.partitions[s][best])) {
          best_v = v;
          best = static_cast<int>(i);
        }
      }
      // Partition 0 has an idle node too, so restricting source arcs to it
      // loses nothing; the variant reaches the same labels.
      if (best >= 0) {
        col.duties[s] = net.partitions[s][best];
        value += best_v;
      }
    }
    const double rc = tmpl.cost - value;
    if (rc >= -tol) continue;
    Minutes lo = tmpl.latest_end, hi = tmpl.earliest_start;
    for (const auto& d : col.duties)
      if (d) {
        lo = std::min(lo, d->start);
        hi = std::max(hi, d->end);
      }
    col.window_start = lo;
    col.window_end = hi;
    out.push_back({std::move(col), rc});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PricedTemplate& a, const PricedTemplate& b) { return a.reduced_cost < b.reduced_cost; });
  if (static_cast<int>(out.size()) > limit) out.resize(limit);
  return out;
}

// Indices of the `budget` lowest reduced costs plus every protected entry.
inline std::vector<int> prune_to_budget(const std::vector<double>& reduced_cost, const std::vector<char>& protect,
                                        int budget) {
  std::vector<int> keep, free;
  for (std::size_t i = 0; i < reduced_cost.size(); ++i) (protect[i] ? keep : free).push_back(static_cast<int>(i));
  std::stable_sort(free.begin(), free.end(), [&](int a, int b) { return reduced_cost[a] < reduced_cost[b]; });
  for (int i : free)
    if (static_cast<int>(keep.size()) < budget) keep.push_back(i);
  std::sort(keep.begin(), keep.end());
  return keep;
}

class BenchmarkColgen {
 public:
  BenchmarkColgen(const Instance& inst, BenchmarkOptions opt = {}) : inst_(&inst), opt_(std::move(opt)) {
    check_benchmark_supported(inst, opt_.start_grid);
    S_ = static_cast<int>(inst.scenarios.size());
    net_.source_all = opt_.source_all_partitions;
    net_.partitions.assign(S_, {});
    lp::LinearProgram m;
    m.add_variable(0.0, lp::kInf, 1.0, false, "eta");
    for (int s = 0; s < S_; ++s) {
      cover_row_.push_back(static_cast<int>(m.constraints.size()));
      for (const auto& k : inst.scenarios[s].tasks) m.add_constraint({}, {}, lp::Sense::GreaterEqual, 1.0, "cover_" + k.id);
    }
    for (int s = 0; s < S_; ++s) {
      recovery_row_.push_back(static_cast<int>(m.constraints.size()));
      m.add_constraint({0}, {-1.0}, lp::Sense::LessEqual, 0.0, "recovery");
    }
    rmp_ = std::make_unique<lp::SimplexSolver>(m);
    cols_.push_back({Kind::Eta, -1, -1});
    networks_.resize(S_);
    for (int s = 0; s < S_; ++s) {
      std::map<std::pair<Minutes, Minutes>, int> by_window;
      for (std::size_t p = 0; p < inst.templates.size(); ++p) {
        const auto& t = inst.templates[p];
        auto [it, fresh] = by_window.emplace(std::pair(t.earliest_start, t.latest_end), static_cast<int>(networks_[s].nets.size()));
        if (fresh) networks_[s].nets.push_back(build_network(inst, inst.scenarios[s], static_cast<int>(p)));
        networks_[s].of.push_back(it->second);
      }
    }
    seed();
  }

  const TailoredNetwork& network() const { return net_; }
  const std::vector<TemplateColumn>& template_columns() const { return templates_; }
  int iterations() const { return iterations_; }
  int duties_pruned() const { return pruned_; }

  // Column generation to LP optimality under the current fixings.
  double solve_lp() {
    for (;;) {
      if (iterations_ >= opt_.max_iterations) throw SolveError("benchmark: column generation iteration cap reached");
      ++iterations_;
      sol_ = rmp_->solve();
      if (sol_.status != lp::Status::Optimal)
        throw SolveError(std::string("benchmark: restricted master ") + lp::to_string(sol_.status));
      read_duals();
      if (!pricing_) return sol_.objective;
      if (add_templates(price_templates(*inst_, net_, lambda_, opt_.pricing.tol_rc, opt_.template_limit)) > 0) continue;
      if (add_duties(price_duties()) > 0) {
        prune();
        continue;
      }
      return sol_.objective;
    }
  }

  // Rounds up the largest fractional variable; false when already integral.
  bool fix_one() {
    int best = -1;
    double best_x = 0.0;
    for (std::size_t j = 1; j < cols_.size(); ++j) {
      const double x = sol_.primal[j];
      const double f = x - std::floor(x);
      if (f <= 1e-6 || f >= 1.0 - 1e-6) continue;
      if (x > best_x + 1e-12) {
        best_x = x;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) return false;
    rmp_->set_column_bounds(best, std::ceil(best_x - 1e-9), lp::kInf);
    ++fixings_;
    return true;
  }
  int fixings() const { return fixings_; }
  void stop_pricing() { pricing_ = false; }

  // Integral schedule from the current RMP solution.
  SolveReport extract(const std::string& status) const {
    const int P = static_cast<int>(inst_->templates.size());
    std::vector<double> y(P, 0.0);
    std::vector<std::vector<Duty>> duties(S_);
    for (std::size_t j = 1; j < cols_.size(); ++j) {
      const long n = std::lround(sol_.primal[j]);
      if (n <= 0) continue;
      const auto& c = cols_[j];
      if (c.kind == Kind::Template) {
        const auto& tc = templates_[c.index];
        y[tc.template_index] += static_cast<double>(n);
        for (int s = 0; s < S_; ++s)
          if (tc.duties[s]) {
            Duty d = *tc.duties[s];
            d.template_index = tc.template_index;
            for (long r = 0; r < n; ++r) duties[s].push_back(d);
          }
      }
    }
    // Excess copies go to a fitting template with spare capacity when one
    // exists, otherwise to the first fitting template.
    for (std::size_t j = 1; j < cols_.size(); ++j) {
      const long n = std::lround(sol_.primal[j]);
      const auto& c = cols_[j];
      if (n <= 0 || c.kind != Kind::Excess) continue;
      const auto& sc = inst_->scenarios[c.scenario];
      for (long r = 0; r < n; ++r) {
        std::vector<int> used(P, 0);
        for (const auto& d : duties[c.scenario]) ++used[d.template_index];
        Duty d = net_.partitions[c.scenario][c.index];
        int target = -1;
        for (int p = 0; p < P; ++p) {
          if (!duty_fits_template(*inst_, sc, d, inst_->templates[p])) continue;
          if (target < 0) target = p;
          if (used[p] < y[p]) {
            target = p;
            break;
          }
        }
        d.template_index = target;
        duties[c.scenario].push_back(d);
      }
    }
    SolveReport r;
    r.method = "benchmark";
    r.instance = inst_->name;
    r.status = status;
    for (int p = 0; p < P; ++p) {
      r.template_cost += inst_->templates[p].cost * y[p];
      if (y[p] > 0) r.portfolio[inst_->templates[p].id] = static_cast<int>(y[p]);
    }
    for (int s = 0; s < S_; ++s) {
      auto o = detail::integer_outcome(*inst_, inst_->scenarios[s], duties[s], y);
      r.recovery_cost = std::max(r.recovery_cost, inst_->excess_cost * o.excess);
      r.scenarios.push_back(std::move(o));
    }
    r.upper_bound = r.template_cost + r.recovery_cost;
    return r;
  }

  bool integral() const {
    for (std::size_t j = 1; j < cols_.size(); ++j) {
      const double f = sol_.primal[j] - std::floor(sol_.primal[j]);
      if (f > 1e-6 && f < 1.0 - 1e-6) return false;
    }
    return true;
  }

 private:
  enum class Kind { Eta, Excess, Template };
  struct ColRef {
    Kind kind;
    int scenario;  // excess only
    int index;     // pool index (excess) or template column index
  };
  struct Networks {
    std::vector<DutyNetwork> nets;
    std::vector<int> of;  // per template
  };

  const Scenario& scenario(int s) const { return inst_->scenarios[s]; }

  // Initial nodes: an LP crew schedule per scenario with ample capacity.
  void seed() {
    std::vector<std::vector<Duty>> found(S_);
    parallel_for(S_, opt_.threads, [&](int s) {
      if (scenario(s).tasks.empty()) return;
      ScenarioColgen cg(*inst_, s);
      const auto r = cg.solve(std::vector<double>(inst_->templates.size(), inst_->capacity_bound));
      for (const auto& [j, x] : r.columns) found[s].push_back(cg.pool()[j].duty);
    });
    std::vector<std::pair<int, Duty>> all;
    for (int s = 0; s < S_; ++s)
      for (auto& d : found[s]) all.emplace_back(s, std::move(d));
    add_duties(std::move(all));
  }

  void read_duals() {
    lambda_.assign(S_, {});
    pi_.assign(S_, 0.0);
    for (int s = 0; s < S_; ++s) {
      const int K = static_cast<int>(scenario(s).tasks.size());
      lambda_[s].resize(K);
      for (int k = 0; k < K; ++k) lambda_[s][k] = std::max(0.0, sol_.dual[cover_row_[s] + k]);
      pi_[s] = std::max(0.0, -sol_.dual[recovery_row_[s]]);
    }
  }

  int add_templates(std::vector<PricedTemplate> cols) {
    int added = 0;
    for (auto& pt : cols) {
      const auto key = pt.column.key();
      if (template_keys_.count(key)) continue;
      template_keys_.insert(key);
      std::vector<std::pair<int, double>> entries;
      for (int s = 0; s < S_; ++s)
        if (pt.column.duties[s])
          for (int k : pt.column.duties[s]->tasks) entries.emplace_back(cover_row_[s] + k, 1.0);
      rmp_->add_column(0.0, lp::kInf, inst_->templates[pt.column.template_index].cost, entries);
      cols_.push_back({Kind::Template, -1, static_cast<int>(templates_.size())});
      templates_.push_back(std::move(pt.column));
      ++added;
    }
    return added;
  }

  int add_duties(std::vector<std::pair<int, Duty>> duties) {
    int added = 0;
    for (auto& [s, d] : duties) {
      const auto key = std::to_string(s) + "/" + task_key(d);
      if (duty_keys_.count(key)) continue;
      duty_keys_.insert(key);
      std::vector<std::pair<int, double>> entries;
      for (int k : d.tasks) entries.emplace_back(cover_row_[s] + k, 1.0);
      entries.emplace_back(recovery_row_[s], inst_->excess_cost);
      rmp_->add_column(0.0, lp::kInf, 0.0, entries);
      cols_.push_back({Kind::Excess, s, static_cast<int>(net_.partitions[s].size())});
      net_.partitions[s].push_back(std::move(d));
      ++added;
    }
    return added;
  }

  // A node is the task sequence; its window comes from the templates it fits.
  static std::string task_key(const Duty& d) {
    std::string s;
    for (int k : d.tasks) s += std::to_string(k) + ",";
    return s;
  }

  // Second layer. M[s][p] is the largest dual value a duty of scenario s can
  // collect inside template p. A duty of s on p is promising when
  //   c_p - sum_{s' != s} max(0, M[s'][p]) - lambda(d) < 0,
  // and an excess copy when c_E pi_s - lambda(d) < 0; pricing uses the more
  // negative of the two per template.
  std::vector<std::pair<int, Duty>> price_duties() {
    const int P = static_cast<int>(inst_->templates.size());
    std::vector<std::vector<double>> M(S_, std::vector<double>(P, 0.0));
    parallel_for(S_, opt_.threads, [&](int s) {
      for (int p = 0; p < P; ++p) {
        const auto& net = networks_[s].nets[networks_[s].of[p]];
        const auto best = price_exact(*inst_, scenario(s), net, 0.0, lambda_[s], opt_.pricing);
        if (best) M[s][p] = std::max(0.0, -best->reduced_cost);
      }
    });
    std::vector<std::vector<PricedColumn>> per(S_);
    parallel_for(S_, opt_.threads, [&](int s) {
      std::vector<PricedColumn> cand;
      for (int p = 0; p < P; ++p) {
        double others = 0.0;
        for (int o = 0; o < S_; ++o)
          if (o != s) others += M[o][p];
        const double theta = std::max(-inst_->excess_cost * pi_[s], others - inst_->templates[p].cost);
        const auto& net = networks_[s].nets[networks_[s].of[p]];
        for (auto& c : price_heuristic(*inst_, scenario(s), net, theta, lambda_[s], opt_.pricing)) {
          c.duty.template_index = p;
          cand.push_back(std::move(c));
        }
        if (auto c = price_exact(*inst_, scenario(s), net, theta, lambda_[s], opt_.pricing);
            c && c->reduced_cost < -opt_.pricing.tol_rc) {
          c->duty.template_index = p;
          cand.push_back(std::move(*c));
        }
      }
      std::vector<PricedColumn> fresh;
      for (auto& c : cand)
        if (!duty_keys_.count(std::to_string(s) + "/" + task_key(c.duty))) fresh.push_back(std::move(c));
      per[s] = filter_columns(std::move(fresh), opt_.pricing.disjointness, opt_.pricing.limit);
    });
    std::vector<std::pair<int, Duty>> out;
    for (int s = 0; s < S_; ++s)
      for (auto& c : per[s]) out.emplace_back(s, std::move(c.duty));
    return out;
  }

  // Node budget: drop the duties with the largest excess reduced cost that
  // no basic or fixed column needs, together with their template columns.
  void prune() {
    if (net_.node_count() <= opt_.node_budget) return;
    std::vector<std::pair<int, int>> nodes;  // (scenario, pool index)
    std::vector<double> rc;
    std::vector<char> protect;
    std::map<std::pair<int, int>, int> node_of;
    for (int s = 0; s < S_; ++s)
      for (std::size_t i = 0; i < net_.partitions[s].size(); ++i) {
        node_of[{s, static_cast<int>(i)}] = static_cast<int>(nodes.size());
        nodes.emplace_back(s, static_cast<int>(i));
        double v = inst_->excess_cost * pi_[s];
        for (int k : net_.partitions[s][i].tasks) v -= lambda_[s][k];
        rc.push_back(v);
        protect.push_back(0);
      }
    auto pinned = [&](std::size_t j) { return rmp_->is_basic(static_cast<int>(j)) || rmp_->column_bounds(static_cast<int>(j)).first > 0.0; };
    std::vector<std::vector<std::pair<int, int>>> members(templates_.size());
    for (std::size_t t = 0; t < templates_.size(); ++t)
      for (int s = 0; s < S_; ++s)
        if (templates_[t].duties[s]) {
          const auto key = std::to_string(s) + "/" + task_key(*templates_[t].duties[s]);
          for (std::size_t i = 0; i < net_.partitions[s].size(); ++i)
            if (std::to_string(s) + "/" + task_key(net_.partitions[s][i]) == key) members[t].emplace_back(s, static_cast<int>(i));
        }
    for (std::size_t j = 1; j < cols_.size(); ++j) {
      if (!pinned(j)) continue;
      const auto& c = cols_[j];
      if (c.kind == Kind::Excess) protect[node_of[{c.scenario, c.index}]] = 1;
      if (c.kind == Kind::Template)
        for (const auto& m : members[c.index]) protect[node_of[m]] = 1;
    }
    const auto keep = prune_to_budget(rc, protect, opt_.node_budget);
    std::vector<char> kept(nodes.size(), 0);
    for (int i : keep) kept[i] = 1;
    std::vector<char> drop_col(cols_.size(), 0);
    for (std::size_t j = 1; j < cols_.size(); ++j) {
      const auto& c = cols_[j];
      if (c.kind == Kind::Excess) drop_col[j] = !kept[node_of[{c.scenario, c.index}]];
      if (c.kind == Kind::Template)
        for (const auto& m : members[c.index]) drop_col[j] = drop_col[j] || !kept[node_of[m]];
    }
    std::vector<int> drop;
    for (std::size_t j = 1; j < cols_.size(); ++j)
      if (drop_col[j]) drop.push_back(static_cast<int>(j));
    if (drop.empty()) return;
    rmp_->remove_columns(drop);
    // Rebuild pools and column references.
    std::vector<std::vector<int>> new_index(S_);
    TailoredNetwork next;
    next.source_all = net_.source_all;
    next.partitions.assign(S_, {});
    for (int s = 0; s < S_; ++s) {
      new_index[s].assign(net_.partitions[s].size(), -1);
      for (std::size_t i = 0; i < net_.partitions[s].size(); ++i)
        if (kept[node_of[{s, static_cast<int>(i)}]]) {
          new_index[s][i] = static_cast<int>(next.partitions[s].size());
          next.partitions[s].push_back(net_.partitions[s][i]);
        } else {
          duty_keys_.erase(std::to_string(s) + "/" + task_key(net_.partitions[s][i]));
          ++pruned_;
        }
    }
    std::vector<ColRef> refs{cols_[0]};
    std::vector<TemplateColumn> tcols;
    for (std::size_t j = 1; j < cols_.size(); ++j) {
      if (drop_col[j]) {
        if (cols_[j].kind == Kind::Template) template_keys_.erase(templates_[cols_[j].index].key());
        continue;
      }
      auto c = cols_[j];
      if (c.kind == Kind::Excess) c.index = new_index[c.scenario][c.index];
      if (c.kind == Kind::Template) {
        tcols.push_back(templates_[c.index]);
        c.index = static_cast<int>(tcols.size()) - 1;
      }
      refs.push_back(c);
    }
    cols_ = std::move(refs);
    templates_ = std::move(tcols);
    net_ = std::move(next);
  }

  const Instance* inst_;
  BenchmarkOptions opt_;
  int S_ = 0;
  TailoredNetwork net_;
  std::vector<Networks> networks_;
  std::vector<int> cover_row_, recovery_row_;
  std::unique_ptr<lp::SimplexSolver> rmp_;
  std::vector<ColRef> cols_;  // parallel to RMP structural columns
  std::vector<TemplateColumn> templates_;
  std::set<std::string> duty_keys_, template_keys_;
  lp::LpSolution sol_;
  std::vector<std::vector<double>> lambda_;
  std::vector<double> pi_;
  int iterations_ = 0;
  int fixings_ = 0;
  int pruned_ = 0;
  bool pricing_ = true;
};

inline SolveReport solve_benchmark(const Instance& inst, const BenchmarkOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - started).count(); };
  inst.validate();
  BenchmarkColgen cg(inst, opt);
  const double lp = cg.solve_lp();
  const double lp_time = elapsed();
  std::string status = "lp";
  if (opt.integerize) {
    status = "feasible";
    while (cg.fix_one()) {
      if (cg.fixings() > opt.max_fixings) throw SolveError("benchmark: fixing cap reached");
      if (elapsed() > opt.time_limit && status != "time-limit") {
        // Finish the rounding on the current pool.
        status = "time-limit";
        cg.stop_pricing();
      }
      cg.solve_lp();
    }
  }
  SolveReport r = opt.integerize ? cg.extract(status) : SolveReport{};
  if (!opt.integerize) {
    r.method = "benchmark";
    r.instance = inst.name;
    r.status = status;
    r.upper_bound = lp;
  }
  r.lp_bound = lp;
  r.lower_bound = lp;
  r.gap = r.upper_bound > 0 ? std::max(0.0, (r.upper_bound - lp) / r.upper_bound) : 0.0;
  if (opt.integerize && r.gap <= 1e-9) r.status = "optimal";
  r.counters["iterations"] = cg.iterations();
  r.counters["fixings"] = cg.fixings();
  r.counters["template_columns"] = static_cast<long>(cg.template_columns().size());
  r.counters["network_nodes"] = cg.network().node_count();
  r.counters["duties_pruned"] = cg.duties_pruned();
  r.timing["lp"] = lp_time;
  r.timing["total"] = elapsed();
  return r;
}

}  // namespace crewplan
