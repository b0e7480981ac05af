// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crewplan/benchmark.hpp"
#include "crewplan/benders.hpp"
#include "crewplan/cli.hpp"
#include "crewplan/enumerate.hpp"
#include "crewplan/evaluate.hpp"
#include "crewplan/extensive.hpp"
#include "crewplan/generate.hpp"
#include "crewplan/pricing.hpp"
#include "crewplan/verify.hpp"

using namespace crewplan;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Small mixed batch: two days, varying gamma, Saturday shares on odd seeds.
GeneratorConfig small_config(std::uint64_t seed) {
  GeneratorConfig c;
  c.seed = seed;
  c.n_tasks = 8;
  c.n_scenarios = 2;
  c.template_step = 30;
  c.gamma = 1 + static_cast<int>(seed % 3);
  if (seed % 2) apply_day_profile(c, "sat");
  c.add_rate = 0.3;
  c.remove_rate = 0.2;
  c.retime_rate = 0.5;
  return c;
}

std::size_t max_tasks(const Instance& inst) {
  std::size_t m = 0;
  for (const auto& s : inst.scenarios) m = std::max(m, s.tasks.size());
  return m;
}

// The first 50 small instances with at most 12 tasks per day.
const std::vector<Instance>& small_batch() {
  static const std::vector<Instance> batch = [] {
    std::vector<Instance> out;
    for (std::uint64_t seed = 1; out.size() < 50; ++seed) {
      auto inst = generate_instance(small_config(seed));
      if (max_tasks(inst) <= 12) out.push_back(std::move(inst));
    }
    return out;
  }();
  return batch;
}

// Regular templates only, no rostering rows, gamma not binding.
Instance unrestricted_instance(std::uint64_t seed, int tasks, int scenarios) {
  GeneratorConfig c;
  c.seed = seed;
  c.n_tasks = tasks;
  c.n_scenarios = scenarios;
  c.reserve_template = false;
  auto inst = generate_instance(c);
  inst.rostering_constraints.clear();
  inst.gamma = static_cast<int>(inst.templates.size());
  return inst;
}

double extensive_value(const Instance& inst, bool integer, bool vi = false) {
  ExtensiveOptions o;
  o.integer_templates = o.integer_duties = integer;
  o.valid_inequalities = vi;
  return solve_extensive(inst, o).report.upper_bound;
}

// ---------------------------------------------------------------------------

bool oracle_equivalence() {
  const auto& batch = small_batch();
  const auto t0 = Clock::now();
  int gap_zero = 0, matched = 0, bracketed = 0;
  for (const auto& inst : batch) {
    auto r = run_two_phase(inst);
    const double opt = extensive_value(inst, true);
    if (r.gap <= 1e-9) {
      ++gap_zero;
      if (close_rel(r.upper_bound, opt, 1e-6)) ++matched;
      else std::cout << "  " << inst.name << ": benders " << r.upper_bound << " extensive " << opt << "\n";
    } else if (r.upper_bound >= opt - 1e-6 && r.lower_bound <= opt + 1e-6) {
      ++bracketed;
    }
  }
  const double t = seconds_since(t0);
  const int n = static_cast<int>(batch.size());
  std::cout << "  instances " << n << ", gap 0 on " << gap_zero << ", matched " << matched << ", others bracketed "
            << bracketed << ", time " << std::fixed << std::setprecision(1) << t << " s\n"
            << std::defaultfloat << std::setprecision(6);
  return n >= 50 && matched == gap_zero && bracketed == n - gap_zero && t < 60.0;
}

bool pricing_exactness() {
  const auto& batch = small_batch();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> lam(0.0, 40000.0), th(-40000.0, 0.0);
  int fixtures = 0, bad = 0;
  for (int i = 0; fixtures < 100 && i < 100000; ++i) {
    const auto& inst = batch[i % batch.size()];
    const int s = static_cast<int>(rng() % inst.scenarios.size());
    const auto& sc = inst.scenarios[s];
    const int p = static_cast<int>(rng() % inst.templates.size());
    const auto all = enumerate_template_duties(inst, sc, p);
    if (all.empty()) continue;
    std::vector<double> lambda(sc.tasks.size());
    for (auto& l : lambda) l = rng() % 3 == 0 ? 0.0 : lam(rng);
    const double theta = th(rng);
    PricingOptions opt;
    opt.cost_per_minute = fixtures % 4 == 0 ? 60.0 : 0.0;
    double best = lp::kInf;
    for (const auto& d : all) {
      double rc = opt.cost_per_minute * d.length() - theta;
      for (int k : d.tasks) rc -= lambda[k];
      best = std::min(best, rc);
    }
    const auto got = price_exact(inst, sc, build_network(inst, sc, p), theta, lambda, opt);
    ++fixtures;
    if (!got || std::abs(got->reduced_cost - best) > 1e-9 * std::max(1.0, std::abs(best))) ++bad;
  }
  std::cout << "  fixtures " << fixtures << ", mismatches " << bad << "\n";
  return fixtures == 100 && bad == 0;
}

bool lp_agreement() {
  int n = 0, bad = 0;
  for (std::uint64_t seed = 2001; seed <= 2010; ++seed) {
    const auto inst = unrestricted_instance(seed, 10, 1);
    BendersOptions bo;
    bo.relax_master = true;
    const double benders = run_two_phase(inst, bo).lp_bound;
    const double ext = extensive_value(inst, false);
    BenchmarkOptions mo;
    mo.integerize = false;
    const double bench = solve_benchmark(inst, mo).lp_bound;
    ++n;
    if (!close_rel(benders, ext, 1e-6) || !close_rel(bench, ext, 1e-6)) {
      ++bad;
      std::cout << "  " << inst.name << ": benders " << benders << " extensive " << ext << " benchmark " << bench << "\n";
    }
  }
  std::cout << "  instances " << n << ", disagreements " << bad << "\n";
  return bad == 0;
}

bool master_feasible(const Instance& inst, const std::vector<double>& y) {
  int types = 0;
  for (double v : y) types += v > 0.5;
  if (types > inst.gamma) return false;
  for (const auto& row : inst.rostering_constraints) {
    double lhs = 0.0;
    for (std::size_t p = 0; p < y.size(); ++p) lhs += row.coefficients[p] * y[p];
    if (lhs > row.rhs + 1e-9) return false;
  }
  return true;
}

std::vector<double> random_feasible(const Instance& inst, std::mt19937_64& rng) {
  const int P = static_cast<int>(inst.templates.size());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<double> y(P, 0.0);
    const int types = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(inst.gamma));
    for (int t = 0; t < types; ++t) y[rng() % P] = 1.0 + static_cast<double>(rng() % 3);
    if (master_feasible(inst, y)) return y;
  }
  return {};
}

bool cut_validity() {
  const auto& batch = small_batch();
  std::mt19937_64 rng(99);
  int cuts = 0, loose = 0, invalid = 0, dominated = 0, samples = 0;
  for (int i = 0; i < 10; ++i) {
    const auto& inst = batch[i];
    const int P = static_cast<int>(inst.templates.size());
    const int S = static_cast<int>(inst.scenarios.size());
    BendersMaster master(inst);
    std::vector<std::unique_ptr<ScenarioColgen>> cg;
    for (int s = 0; s < S; ++s) cg.push_back(std::make_unique<ScenarioColgen>(inst, s));
    const auto core = CorePoint::constant(P, 1.0);
    for (int it = 0; it < 30; ++it) {
      const auto m = master.solve(10.0);
      int added = 0;
      for (int s = 0; s < S; ++s) {
        const auto reg = separate(*cg[s], m.y, m.eta, nullptr);
        if (!reg.cut) continue;
        ++cuts;
        const double scale = std::max(1.0, reg.objective);
        if (std::abs(reg.cut->value(m.y) - reg.objective) > 1e-6 * scale) ++loose;
        for (int k = 0; k < 5; ++k) {
          const auto y = random_feasible(inst, rng);
          if (y.empty()) continue;
          ++samples;
          const double truth = solve_bsp(inst, s, y).objective;
          if (truth < reg.cut->value(y) - 1e-6 * std::max(1.0, truth)) ++invalid;
        }
        const auto par = separate(*cg[s], m.y, m.eta, &core);
        if (par.cut && par.cut->value(core.w) < reg.cut->value(core.w) - 1e-6 * scale) ++dominated;
        master.add_cut(*reg.cut);
        ++added;
      }
      if (added == 0) break;
    }
  }
  std::cout << "  cuts " << cuts << ", not tight " << loose << ", invalid " << invalid << " of " << samples
            << " samples, pareto below regular at core " << dominated << "\n";
  return cuts > 0 && loose == 0 && invalid == 0 && dominated == 0 && samples == 5 * cuts;
}

bool valid_inequality_safety() {
  const auto& batch = small_batch();
  int n = 0, changed = 0;
  for (const auto& inst : batch) {
    const double a = extensive_value(inst, true, false);
    const double b = extensive_value(inst, true, true);
    ++n;
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) {
      ++changed;
      std::cout << "  " << inst.name << ": " << a << " vs " << b << "\n";
    }
  }
  std::cout << "  instances " << n << ", optimum changed " << changed << "\n";
  return changed == 0;
}

GeneratorConfig acceleration_config(std::uint64_t seed) {
  GeneratorConfig c;
  c.seed = 4000 + seed;
  c.n_tasks = 16;
  c.n_scenarios = 2;
  c.gamma = 4;
  return c;
}

bool acceleration_direction() {
  std::vector<double> plain, pareto, both;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = generate_instance(acceleration_config(seed));
    auto iterations = [&](bool par, bool vi) {
      BendersOptions o;
      o.pareto = par;
      o.valid_inequalities = vi;
      o.phase_two = false;
      return static_cast<double>(run_two_phase(inst, o).counters.at("phase_one_iterations"));
    };
    plain.push_back(iterations(false, false));
    pareto.push_back(iterations(true, false));
    both.push_back(iterations(true, true));
  }
  const double a = median(plain), b = median(pareto), c = median(both);
  std::cout << "  median phase-I iterations: default " << a << ", pareto " << b << ", pareto+vi " << c << " (means "
            << mean(plain) << ", " << mean(pareto) << ", " << mean(both) << ")\n";
  return a >= b && b >= c;
}

bool two_phase_gap() {
  std::vector<double> gaps;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig c;
    c.seed = 1000 + seed;
    c.n_tasks = 40;
    c.n_scenarios = 3;
    c.gamma = 15;
    apply_day_profile(c, "thu");
    const auto inst = generate_instance(c);
    BendersOptions o;
    o.time_limit = 60.0;
    o.phase_one_time_limit = 60.0;
    gaps.push_back(run_two_phase(inst, o).gap);
  }
  std::sort(gaps.begin(), gaps.end());
  const std::vector<double> kept(gaps.begin(), gaps.end() - 1);  // drop the largest
  const double m = mean(kept), mx = kept.back();
  std::cout << "  gaps (%):";
  for (double g : gaps) std::cout << ' ' << 100.0 * g;
  std::cout << "\n  without the largest: mean " << 100.0 * m << "%, max " << 100.0 * mx << "%\n";
  return m <= 0.02 && mx <= 0.10;
}

// One-sided binomial tail P(X >= wins) for X ~ Bin(n, 1/2).
double sign_test_p(int wins, int n) {
  double p = 0.0;
  for (int k = wins; k <= n; ++k) {
    double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    p += std::exp(lc - n * std::log(2.0));
  }
  return p;
}

bool robustness_trend() {
  int better = 0, worse = 0, n = 0;
  std::vector<double> t1, t3, e1, e3;
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    GeneratorConfig c;
    c.seed = 5000 + seed;
    c.n_tasks = 20;
    c.n_scenarios = 3;
    c.holdout_days = 5;
    c.gamma = 15;
    c.add_rate = 0.15;
    c.remove_rate = 0.15;
    c.retime_rate = 0.9;
    const auto fam = generate_family(c);
    auto held_out = [&](const Instance& train, std::vector<double>& templates) {
      BendersOptions o;
      o.time_limit = 20.0;
      o.phase_one_time_limit = 20.0;
      const auto r = run_two_phase(train, o);
      templates.push_back(r.templates_selected());
      const auto ev = evaluate_period(fam.training, portfolio_vector(fam.training, r.portfolio), fam.holdout);
      return ev.average().at("excess");
    };
    const double one = held_out(most_recent_scenarios(fam.training, 1), t1);
    const double three = held_out(fam.training, t3);
    e1.push_back(one);
    e3.push_back(three);
    ++n;
    if (three < one - 1e-9) ++better;
    else if (three > one + 1e-9) ++worse;
  }
  const int decided = better + worse;
  const double p = decided > 0 ? sign_test_p(better, decided) : 1.0;
  std::cout << "  seeds " << n << ": fewer held-out excess duties with 3 days on " << better << ", more on " << worse
            << ", p = " << p << "\n  mean excess " << mean(e1) << " -> " << mean(e3) << ", mean templates " << mean(t1)
            << " -> " << mean(t3) << "\n";
  return n >= 20 && p < 0.05 && mean(e3) <= mean(e1) + 1e-9 && mean(t3) >= mean(t1) - 1e-9;
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"crewplan"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cout << "  crewplan exited " << code << ": " << err.str() << "\n";
  return code;
}

bool determinism() {
  const fs::path dir = fs::temp_directory_path() / ("crewplan-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  auto at = [&](const std::string& rel) { return (dir / rel).string(); };
  bool ok = true;
  for (const char* g : {"g1", "g2"})
    ok = ok && cli({"generate", "--seed", "11", "--tasks", "14", "--scenarios", "3", "--profile", "fri", "--out", at(g)}) == 0;
  for (const char* s : {"s1", "s2"})
    ok = ok && cli({"solve", "benders", at("g1/instance.txt"), "--threads", "2", "--out", at(s)}) == 0;
  ok = ok && cli({"generate", "--seed", "12", "--tasks", "12", "--scenarios", "2", "--no-reserve", "--gamma", "100",
                  "--out", at("u")}) == 0;
  for (const char* b : {"b1", "b2"})
    ok = ok && cli({"solve", "benchmark", at("u/instance.txt"), "--threads", "2", "--out", at(b)}) == 0;
  int compared = 0, differ = 0;
  auto same = [&](const std::string& a, const std::string& b) {
    ++compared;
    if (cli::read_file(at(a)) != cli::read_file(at(b))) {
      ++differ;
      std::cout << "  " << a << " differs from " << b << "\n";
    }
  };
  if (ok) {
    same("g1/instance.txt", "g2/instance.txt");
    for (const char* f : {"solution.json", "summary.csv", "manifest.json"}) {
      same(std::string("s1/") + f, std::string("s2/") + f);
      same(std::string("b1/") + f, std::string("b2/") + f);
    }
  }
  fs::remove_all(dir);
  std::cout << "  artifacts compared " << compared << ", differing " << differ << "\n";
  return ok && compared > 0 && differ == 0;
}

struct Row {
  std::string method;
  int templates = 0;
  double duties = 0, excess = 0, workload = 0, lb = 0, ub = 0;
};

Row summarise(const std::string& method, const SolveReport& r) {
  Row row{method, r.templates_selected(), 0, 0, 0, r.lower_bound, r.upper_bound};
  double minutes = 0.0, count = 0.0;
  for (const auto& s : r.scenarios) {
    row.excess += s.excess;
    for (const auto& d : s.duties) {
      count += d.value;
      minutes += d.value * (d.end - d.start);
    }
  }
  const double S = std::max<std::size_t>(1, r.scenarios.size());
  row.duties = count / S;
  row.excess /= S;
  row.workload = count > 0 ? minutes / count / 60.0 : 0.0;
  return row;
}

bool benchmark_parity() {
  std::vector<double> gb, gm;
  std::cout << "  instance,method,templates,duties,excess,workload_h,ub,common_lb,gap\n";
  int failures = 0;
  for (std::uint64_t seed = 3001; seed <= 3010; ++seed) {
    const auto inst = unrestricted_instance(seed, 30, 3);
    SolveReport b, m;
    try {
      b = run_two_phase(inst);
      m = solve_benchmark(inst);
    } catch (const std::exception& e) {
      std::cout << "  " << inst.name << ": " << e.what() << "\n";
      ++failures;
      continue;
    }
    if (!verify_solution(inst, b).empty() || !verify_solution(inst, m).empty()) ++failures;
    const double lb = std::max(b.lower_bound, m.lower_bound);
    for (const auto& row : {summarise("benders", b), summarise("benchmark", m)}) {
      const double gap = row.ub > 0 ? std::max(0.0, (row.ub - lb) / row.ub) : 0.0;
      (row.method == "benders" ? gb : gm).push_back(gap);
      std::cout << "  " << inst.name << ',' << row.method << ',' << row.templates << ',' << row.duties << ','
                << row.excess << ',' << std::setprecision(4) << row.workload << ',' << std::setprecision(8) << row.ub
                << ',' << lb << ',' << std::setprecision(4) << gap << std::setprecision(6) << "\n";
    }
  }
  std::cout << "  mean gap: benders " << mean(gb) << ", benchmark " << mean(gm) << ", failures " << failures << "\n";
  return failures == 0 && !gb.empty() && mean(gb) <= mean(gm) + 1e-12;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<bool()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"pricing exactness", pricing_exactness},
      {"LP agreement", lp_agreement},
      {"cut validity", cut_validity},
      {"valid-inequality safety", valid_inequality_safety},
      {"acceleration direction", acceleration_direction},
      {"two-phase gap", two_phase_gap},
      {"robustness trend", robustness_trend},
      {"determinism", determinism},
      {"benchmark parity", benchmark_parity},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = criteria[i].second();
    } catch (const std::exception& e) {
      std::cout << "  error: " << e.what() << "\n";
    }
    std::cout << (ok ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << " (" << std::fixed
              << std::setprecision(1) << seconds_since(t0) << " s)" << std::defaultfloat << std::setprecision(6) << std::endl;
    failed += !ok;
  }
  return failed == 0 ? 0 : 1;
}
