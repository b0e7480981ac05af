#pragma once

// Command-line front end: generate, solve, evaluate, report.
//
// Parameter overrides come from flags or from a config file of
// `param <key> <value>` lines; flags win. Every run writes its artifacts and
// a manifest.json into the output directory.

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crewplan/benchmark.hpp"
#include "crewplan/benders.hpp"
#include "crewplan/evaluate.hpp"
#include "crewplan/extensive.hpp"
#include "crewplan/generate.hpp"
#include "crewplan/io.hpp"
#include "crewplan/parallel.hpp"
#include "crewplan/verify.hpp"
#include "json.hpp"

namespace crewplan::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kOutputRootEnv = "CREWPLAN_OUTPUT_ROOT";

enum ExitCode : int { kOk = 0, kInputError = 2, kSolveError = 3, kInternalError = 4 };

inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

// `param <key> <value>` lines; blank lines and '#' comments are skipped.
inline std::map<std::string, std::string> parse_config(const std::string& text, const std::string& origin = "config") {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> f;
    for (std::string w; ls >> w;) f.push_back(w);
    if (f.empty()) continue;
    if (f.size() != 3 || f[0] != "param")
      throw InputError(origin + ":" + std::to_string(lineno) + ": expected 'param <key> <value>'");
    out[f[1]] = f[2];
  }
  return out;
}

// Raw string settings keyed by the flag name without dashes.
class Settings {
 public:
  std::map<std::string, std::string> values;

  bool has(const std::string& k) const { return values.count(k) > 0; }

  std::optional<int> get_int(const std::string& k, int lo, int hi) const {
    auto it = values.find(k);
    if (it == values.end()) return std::nullopt;
    int v = 0;
    auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc() || p != it->second.data() + it->second.size()) throw InputError(k + ": not an integer");
    if (v < lo || v > hi) throw InputError(k + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  std::optional<double> get_double(const std::string& k, double lo, double hi) const {
    auto it = values.find(k);
    if (it == values.end()) return std::nullopt;
    double v = 0;
    auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc() || p != it->second.data() + it->second.size()) throw InputError(k + ": not a number");
    if (!(v >= lo && v <= hi)) throw InputError(k + " must lie in [" + format_number(lo) + ", " + format_number(hi) + "]");
    return v;
  }
  std::optional<std::string> get(const std::string& k) const {
    auto it = values.find(k);
    if (it == values.end()) return std::nullopt;
    return it->second;
  }

  // Fills keys missing from `values` with config entries, rejecting unknown keys.
  void merge(const std::map<std::string, std::string>& config, const std::vector<std::string>& known) {
    for (const auto& [k, v] : config) {
      if (std::find(known.begin(), known.end(), k) == known.end()) throw InputError("config: unknown key '" + k + "'");
      values.emplace(k, v);
    }
  }
};

inline std::filesystem::path resolve_output(const std::string& dir) {
  std::filesystem::path p(dir);
  if (p.is_relative())
    if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') p = std::filesystem::path(root) / p;
  std::filesystem::create_directories(p);
  return p;
}

struct Manifest {
  std::string subcommand;
  std::optional<std::uint64_t> seed;  // generator runs only
  Settings settings;
  std::map<std::string, std::string> inputs;  // path -> content hash
  std::vector<std::string> artifacts;

  std::string config_hash() const {
    std::string canon = subcommand + "\n";
    for (const auto& [k, v] : settings.values) canon += k + "=" + v + "\n";
    for (const auto& [k, v] : inputs) canon += "input=" + v + "\n";
    return hex(fnv1a(canon));
  }

  std::string dump() const {
    nlohmann::json j;
    j["tool"] = "crewplan";
    j["subcommand"] = subcommand;
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    j["config_hash"] = config_hash();
    j["settings"] = settings.values;
    j["inputs"] = inputs;
    j["artifacts"] = artifacts;
    j["versions"] = {{"crewplan", kVersion}, {"instance_format", kInstanceHeader}, {"compiler", __VERSION__}};
    return j.dump(2) + "\n";
  }
};

// ------------------------------------------------------------- overrides

inline void apply_instance_overrides(Instance& inst, const Settings& s) {
  if (auto g = s.get_int("gamma", 1, 100000)) inst.gamma = *g;
  if (auto c = s.get_double("excess-cost", 0, 1e15)) inst.excess_cost = *c;
  if (auto c = s.get_double("template-cost", 0, 1e15))
    for (auto& t : inst.templates) t.cost = *c;
  if (auto l = s.get_int("template-length", 1, 2 * 1440))
    for (auto& t : inst.templates)
      if (!t.is_reserve) t.latest_end = t.earliest_start + *l;
  if (auto n = s.get_int("scenarios", 1, 100000)) inst = most_recent_scenarios(std::move(inst), static_cast<std::size_t>(*n));
  const bool any = s.has("early-pct") || s.has("late-pct") || s.has("reserve-pct");
  if (any) {
    auto pct = [&](const char* k) -> std::optional<double> {
      if (auto v = s.get_double(k, 0, 100)) return *v / 100.0;
      return std::nullopt;
    };
    // Rows not overridden keep their instance values.
    std::map<std::string, RosteringConstraint> old;
    for (const auto& r : inst.rostering_constraints) old[r.label] = r;
    auto e = pct("early-pct"), l = pct("late-pct"), r = pct("reserve-pct");
    set_share_rows(inst, e, l, r);
    for (const char* label : {"early", "late", "reserve"})
      if (!s.has(std::string(label) + "-pct") && old.count(label)) inst.rostering_constraints.push_back(old[label]);
  }
  inst.validate();
}

// ------------------------------------------------------------- subcommands

struct Context {
  std::ostream& out;
  std::ostream& err;
};

inline int threads_of(const Settings& s) { return s.get_int("threads", 1, 1024).value_or(default_threads()); }

inline void finish(const std::filesystem::path& dir, Manifest& m, const std::map<std::string, std::string>& files) {
  for (const auto& [name, text] : files) {
    write_file(dir / name, text);
    m.artifacts.push_back(name);
  }
  write_file(dir / "manifest.json", m.dump());
}

inline int run_generate(const Settings& s, const std::string& out_dir, Context& ctx) {
  GeneratorConfig cfg;
  if (auto p = s.get("profile")) apply_day_profile(cfg, *p);
  cfg.seed = static_cast<std::uint64_t>(s.get_int("seed", 0, 2147483647).value_or(1));
  if (auto v = s.get_int("tasks", 1, 100000)) cfg.n_tasks = *v;
  if (auto v = s.get_int("scenarios", 1, 10000)) cfg.n_scenarios = *v;
  if (auto v = s.get_int("holdout", 0, 10000)) cfg.holdout_days = *v;
  if (auto v = s.get_int("stations", 1, 100)) cfg.n_stations = *v;
  if (auto v = s.get_int("gamma", 1, 100000)) cfg.gamma = *v;
  if (auto v = s.get_int("template-length", 1, 1440)) cfg.template_length = *v;
  if (auto v = s.get_int("template-step", 1, 1440)) cfg.template_step = *v;
  if (auto v = s.get_double("template-cost", 0, 1e15)) cfg.template_cost = *v;
  if (auto v = s.get_double("excess-cost", 0, 1e15)) cfg.excess_cost = *v;
  if (auto v = s.get_double("add-rate", 0, 1)) cfg.add_rate = *v;
  if (auto v = s.get_double("remove-rate", 0, 1)) cfg.remove_rate = *v;
  if (auto v = s.get_double("retime-rate", 0, 1)) cfg.retime_rate = *v;
  if (auto v = s.get_double("early-pct", 0, 100)) cfg.early_fraction = *v / 100.0;
  if (auto v = s.get_double("late-pct", 0, 100)) cfg.late_fraction = *v / 100.0;
  if (auto v = s.get_double("reserve-pct", 0, 100)) cfg.reserve_fraction = *v / 100.0;
  if (s.get("no-reserve")) cfg.reserve_template = false;

  const auto fam = generate_family(cfg);
  Manifest m{"generate", cfg.seed, s, {}, {}};
  std::map<std::string, std::string> files{{"instance.txt", instance_to_string(fam.training)}};
  if (!fam.holdout.empty()) {
    Instance days = fam.training;
    days.name += "-holdout";
    days.scenarios = fam.holdout;
    std::size_t most = 1;
    for (const auto& d : days.scenarios) most = std::max(most, d.tasks.size());
    days.capacity_bound = static_cast<int>(most);
    files["holdout.txt"] = instance_to_string(days);
  }
  const auto dir = resolve_output(out_dir);
  finish(dir, m, files);
  ctx.out << "generated " << fam.training.name << ": " << fam.training.scenarios.size() << " scenarios, "
          << fam.holdout.size() << " held-out days -> " << dir.string() << "\n";
  return kOk;
}

inline int run_solve(const std::string& method, const std::string& instance_path, const Settings& s,
                     const std::string& out_dir, Context& ctx) {
  const std::string text = read_file(instance_path);
  Instance inst = instance_from_string(text);
  apply_instance_overrides(inst, s);
  const int threads = threads_of(s);
  const double time_limit = s.get_double("time-limit", 0, 1e30).value_or(1e30);

  SolveReport report;
  bool integral = true;
  if (method == "benders") {
    BendersOptions o;
    o.threads = threads;
    o.time_limit = time_limit;
    o.phase_one_time_limit = std::min(o.phase_one_time_limit, time_limit);
    if (auto v = s.get_double("master-time-limit", 0, 1e30)) o.master_time_limit = *v;
    if (auto v = s.get_double("phase-one-time-limit", 0, 1e30)) o.phase_one_time_limit = *v;
    o.pareto = !s.has("no-pareto");
    o.valid_inequalities = !s.has("no-vi");
    o.relax_master = s.has("relax");
    o.phase_two = !s.has("no-phase-two");
    integral = !o.relax_master && o.phase_two;
    report = run_two_phase(inst, o);
  } else if (method == "benchmark") {
    BenchmarkOptions o;
    o.threads = threads;
    o.time_limit = time_limit;
    if (auto v = s.get_int("node-budget", 1, 100000000)) o.node_budget = *v;
    o.integerize = !s.has("lp-only");
    integral = o.integerize;
    report = solve_benchmark(inst, o);
  } else if (method == "extensive") {
    ExtensiveOptions o;
    o.time_limit = time_limit;
    o.valid_inequalities = s.has("vi");
    if (s.has("lp-only")) o.integer_templates = o.integer_duties = false;
    integral = false;  // slack excess in non-binding scenarios is not recounted
    report = solve_extensive(inst, o).report;
  } else {
    throw InputError("unknown method '" + method + "' (benders, benchmark, extensive)");
  }
  if (integral && report.status != "lp" && !report.scenarios.empty()) {
    const auto problems = verify_solution(inst, report);
    if (!problems.empty()) throw std::logic_error("solution failed verification: " + problems.front());
  }

  Manifest m{"solve " + method, std::nullopt, s, {{instance_path, hex(fnv1a(text))}}, {}};
  m.settings.values["threads"] = std::to_string(threads);
  std::ostringstream full, solution, iterations, summary;
  write_report(report, full, ReportFormat::Json);
  write_report(strip_timing(report), solution, ReportFormat::Json);
  write_report(report, iterations, ReportFormat::Jsonl);
  write_report(report, summary, ReportFormat::Csv);
  const auto dir = resolve_output(out_dir);
  finish(dir, m,
         {{"report.json", full.str()}, {"solution.json", solution.str()}, {"iterations.jsonl", iterations.str()},
          {"summary.csv", summary.str()}});
  ctx.out << summary.str();
  return kOk;
}

inline int run_evaluate(const std::string& instance_path, const std::string& report_path,
                        const std::optional<std::string>& days_path, const Settings& s, const std::string& out_dir,
                        Context& ctx) {
  const std::string text = read_file(instance_path);
  Instance inst = instance_from_string(text);
  apply_instance_overrides(inst, s);
  const SolveReport report = read_report(report_path);
  Manifest m{"evaluate", std::nullopt, s, {{instance_path, hex(fnv1a(text))}, {report_path, hex(fnv1a(read_file(report_path)))}}, {}};
  std::vector<Scenario> days = inst.scenarios;
  if (days_path) {
    const std::string dtext = read_file(*days_path);
    const Instance d = instance_from_string(dtext);
    if (d.templates != inst.templates) throw InputError("day file templates differ from the instance");
    days = d.scenarios;
    m.inputs[*days_path] = hex(fnv1a(dtext));
  }
  EvaluationOptions o;
  o.threads = threads_of(s);
  if (auto v = s.get_double("milp-time-limit", 0, 1e30)) o.milp_time_limit = *v;
  m.settings.values["threads"] = std::to_string(o.threads);
  const auto ev = evaluate_period(inst, portfolio_vector(inst, report.portfolio), days, o);

  std::ostringstream csv;
  write_evaluation_csv(ev, csv);
  nlohmann::json j = nlohmann::json::array();
  for (const auto& d : ev.days)
    j.push_back({{"day", d.day}, {"duties", d.duties}, {"excess", d.excess}, {"empty", d.empty_templates},
                 {"objective", d.objective}, {"lp_bound", d.lp_bound}, {"proven", d.proven}});
  const auto dir = resolve_output(out_dir);
  finish(dir, m, {{"evaluation.csv", csv.str()}, {"evaluation.json", j.dump(2) + "\n"}});
  ctx.out << csv.str();
  return kOk;
}

inline int run_report(const std::vector<std::string>& paths, const std::string& format,
                      const std::optional<std::string>& plot_instance, Context& ctx) {
  std::vector<SolveReport> reports;
  for (const auto& p : paths) reports.push_back(read_report(p));
  if (plot_instance) {
    if (reports.size() != 1) throw InputError("--plot takes exactly one report");
    write_plot_data(load_instance(*plot_instance), reports.front(), ctx.out);
    return kOk;
  }
  const auto f = parse_report_format(format);
  if (f == ReportFormat::Csv) write_summary_csv(reports, ctx.out);
  else
    for (const auto& r : reports) write_report(r, ctx.out, f);
  return kOk;
}

// ------------------------------------------------------------------ main

inline void error_line(std::ostream& err, const char* kind, const std::string& msg) {
  err << nlohmann::json{{"error", kind}, {"message", msg}}.dump() << "\n";
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Robust tactical crew scheduling: template selection under scenario uncertainty"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Settings settings;
  std::string config_path, out_dir = "crewplan-out";
  std::vector<std::string> known;
  auto value = [&](CLI::App* sub, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>("--" + key, [&settings, key](const std::string& v) { settings.values[key] = v; },
                                          help);
    if (std::find(known.begin(), known.end(), key) == known.end()) known.push_back(key);
  };
  auto flag = [&](CLI::App* sub, const std::string& key, const std::string& help) {
    sub->add_flag_callback("--" + key, [&settings, key] { settings.values[key] = "1"; }, help);
    if (std::find(known.begin(), known.end(), key) == known.end()) known.push_back(key);
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "File of 'param <key> <value>' lines; flags take precedence");
    sub->add_option("--out", out_dir, std::string("Output directory (relative paths go under $") + kOutputRootEnv + ")");
  };
  auto instance_overrides = [&](CLI::App* sub) {
    value(sub, "gamma", "Maximum number of template types");
    value(sub, "reserve-pct", "Reserve share of selected templates, percent");
    value(sub, "early-pct", "Maximum early share, percent");
    value(sub, "late-pct", "Maximum late share, percent");
    value(sub, "template-length", "Regular template length, minutes");
    value(sub, "template-cost", "Cost per template");
    value(sub, "excess-cost", "Cost per excess duty");
  };

  auto* gen = app.add_subcommand("generate", "Generate a synthetic instance family");
  common(gen);
  instance_overrides(gen);
  value(gen, "seed", "Random seed");
  value(gen, "tasks", "Tasks in the first day");
  value(gen, "scenarios", "Training scenarios");
  value(gen, "holdout", "Held-out days written to holdout.txt");
  value(gen, "stations", "Outstations besides the crew base");
  value(gen, "template-step", "Minutes between template starts");
  value(gen, "add-rate", "Leg addition rate per day");
  value(gen, "remove-rate", "Leg removal rate per day");
  value(gen, "retime-rate", "Leg retime rate per day");
  value(gen, "profile", "Day-of-week rostering preset (mon..sun)");
  flag(gen, "no-reserve", "Omit the reserve template");

  std::string method, instance_path;
  auto* solve = app.add_subcommand("solve", "Solve an instance");
  common(solve);
  instance_overrides(solve);
  solve->add_option("method", method, "benders | benchmark | extensive")->required()->check(
      CLI::IsMember({"benders", "benchmark", "extensive"}));
  solve->add_option("instance", instance_path, "Instance file")->required();
  value(solve, "scenarios", "Keep only the most recent N scenarios");
  value(solve, "time-limit", "Overall time limit, seconds");
  value(solve, "phase-one-time-limit", "Benders phase I time limit, seconds");
  value(solve, "master-time-limit", "Initial master MILP time limit, seconds");
  value(solve, "node-budget", "Benchmark network node budget");
  value(solve, "threads", "Worker threads (default: available parallelism)");
  flag(solve, "no-pareto", "Benders: regular cuts only");
  flag(solve, "no-vi", "Benders: no valid inequalities");
  flag(solve, "vi", "Extensive: add valid inequalities");
  flag(solve, "relax", "Benders: continuous master, phase I only");
  flag(solve, "no-phase-two", "Benders: stop after phase I");
  flag(solve, "lp-only", "Benchmark/extensive: LP relaxation only");

  std::string report_path;
  std::optional<std::string> days_path;
  auto* eval = app.add_subcommand("evaluate", "Evaluate a portfolio on realised days");
  common(eval);
  instance_overrides(eval);
  eval->add_option("instance", instance_path, "Instance file")->required();
  eval->add_option("--report", report_path, "Solve report holding the portfolio")->required();
  eval->add_option("--days", days_path, "Instance file whose scenarios are the days (default: the instance's own)");
  value(eval, "milp-time-limit", "Per-day MILP time limit, seconds");
  value(eval, "threads", "Worker threads (default: available parallelism)");

  std::vector<std::string> report_paths;
  std::string format = "csv";
  std::optional<std::string> plot_instance;
  auto* rep = app.add_subcommand("report", "Summarise solve reports");
  rep->add_option("reports", report_paths, "Report JSON files")->required();
  rep->add_option("--format", format, "csv | json | jsonl");
  rep->add_option("--plot", plot_instance, "Emit plot data for one report against this instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  Context ctx{out, err};
  try {
    if (!config_path.empty()) settings.merge(parse_config(read_file(config_path), config_path), known);
    if (*gen) return run_generate(settings, out_dir, ctx);
    if (*solve) return run_solve(method, instance_path, settings, out_dir, ctx);
    if (*eval) return run_evaluate(instance_path, report_path, days_path, settings, out_dir, ctx);
    if (*rep) return run_report(report_paths, format, plot_instance, ctx);
    return kInputError;
  } catch (const InputError& e) {
    error_line(err, "input", e.what());
    return kInputError;
  } catch (const SolveError& e) {
    error_line(err, "solve", e.what());
    return kSolveError;
  } catch (const std::filesystem::filesystem_error& e) {
    error_line(err, "input", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    error_line(err, "internal", e.what());
    return kInternalError;
  }
}

}  // namespace crewplan::cli
