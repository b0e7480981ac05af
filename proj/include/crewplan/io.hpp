#pragma once

// Instance text format (grammar in docs/instance-format.md), report
// persistence, and plot-data tables.

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "crewplan/core_model.hpp"
#include "crewplan/report.hpp"

namespace crewplan {

inline constexpr const char* kInstanceHeader = "crewplan-instance 1";

// HH:MM with a "+1" suffix for times at or after midnight of the next day.
inline std::string format_time(Minutes m) {
  if (m < 0 || m >= 2 * 1440) throw InputError("time out of range: " + std::to_string(m));
  const bool next_day = m >= 1440;
  const Minutes v = next_day ? m - 1440 : m;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d%s", v / 60, v % 60, next_day ? "+1" : "");
  return buf;
}

inline Minutes parse_time(const std::string& s) {
  std::string body = s;
  Minutes offset = 0;
  if (body.size() > 2 && body.compare(body.size() - 2, 2, "+1") == 0) {
    offset = 1440;
    body.resize(body.size() - 2);
  }
  if (body.size() != 5 || body[2] != ':' || !std::isdigit(static_cast<unsigned char>(body[0])) ||
      !std::isdigit(static_cast<unsigned char>(body[1])) || !std::isdigit(static_cast<unsigned char>(body[3])) ||
      !std::isdigit(static_cast<unsigned char>(body[4])))
    throw InputError("bad time '" + s + "' (expected HH:MM or HH:MM+1)");
  const int h = std::stoi(body.substr(0, 2));
  const int m = std::stoi(body.substr(3, 2));
  if (h > 23 || m > 59) throw InputError("bad time '" + s + "'");
  return offset + 60 * h + m;
}

// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_instance(const Instance& inst, std::ostream& os) {
  os << kInstanceHeader << "\n";
  os << "name " << inst.name << "\n";
  os << "base " << inst.crew_base << "\n";
  os << "param gamma " << inst.gamma << "\n";
  os << "param capacity_bound " << inst.capacity_bound << "\n";
  os << "param excess_cost " << format_number(inst.excess_cost) << "\n";
  os << "param min_transition " << inst.min_transition << "\n";
  os << "param meal_break_min " << inst.meal_break_min << "\n";
  os << "param max_stretch " << inst.max_stretch_without_break << "\n";
  os << "param check_in " << inst.check_in << "\n";
  os << "param check_out " << inst.check_out << "\n";
  const auto& steps = inst.max_duty_length.steps();
  for (std::size_t i = 0; i < steps.size(); ++i)
    os << "maxlen " << (i == 0 ? std::string("*") : format_time(steps[i].first)) << " " << steps[i].second << "\n";
  for (const auto& s : inst.stations)
    os << "station " << s.id << " " << (s.has_canteen ? "canteen" : "-") << " " << (s.is_crew_base ? "base" : "-")
       << "\n";
  for (const auto& t : inst.templates)
    os << "template " << t.id << " " << t.crew_base << " " << format_time(t.earliest_start) << " "
       << format_time(t.latest_end) << " " << (t.is_reserve ? "reserve" : "regular") << " " << format_number(t.cost)
       << "\n";
  for (const auto& c : inst.rostering_constraints) {
    os << "constraint " << c.label << " " << format_number(c.rhs) << " :";
    for (std::size_t p = 0; p < c.coefficients.size(); ++p)
      if (c.coefficients[p] != 0.0) os << " " << inst.templates[p].id << " " << format_number(c.coefficients[p]);
    os << "\n";
  }
  for (const auto& sc : inst.scenarios) {
    os << "scenario " << sc.id << "\n";
    for (const auto& k : sc.tasks)
      os << "task " << k.id << " " << k.from_station << " " << k.to_station << " " << format_time(k.start) << " "
         << format_time(k.end) << " " << k.rolling_stock << "\n";
    os << "end\n";
  }
}

inline std::string instance_to_string(const Instance& inst) {
  std::ostringstream os;
  write_instance(inst, os);
  return os.str();
}

// Parses and validates. Errors carry "line N:" prefixes, or the name of the
// violated invariant.
inline Instance parse_instance(std::istream& is) {
  Instance inst;
  std::string line;
  int lineno = 0;
  bool header = false;
  Scenario* open = nullptr;
  bool saw_maxlen = false;
  std::vector<std::pair<Minutes, Minutes>> steps;
  struct PendingConstraint {
    RosteringConstraint c;
    std::vector<std::pair<std::string, double>> terms;
    int line;
  };
  std::vector<PendingConstraint> pending;

  auto fail = [&](const std::string& msg) -> void {
    throw InputError("line " + std::to_string(lineno) + ": " + msg);
  };
  auto to_int = [&](const std::string& s, const char* field) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(std::string("bad integer for ") + field + ": '" + s + "'");
    return v;
  };
  auto to_double = [&](const std::string& s, const char* field) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(std::string("bad number for ") + field + ": '" + s + "'");
    return v;
  };
  auto time_of = [&](const std::string& s) {
    try {
      return parse_time(s);
    } catch (const InputError& e) {
      fail(e.what());
    }
    return 0;
  };

  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> f;
    for (std::string w; ls >> w;) f.push_back(w);
    if (f.empty()) continue;
    if (!header) {
      if (f.size() != 2 || f[0] + " " + f[1] != kInstanceHeader) fail(std::string("expected header '") + kInstanceHeader + "'");
      header = true;
      continue;
    }
    const std::string& kw = f[0];
    auto want = [&](std::size_t n) {
      if (f.size() != n) fail(kw + ": expected " + std::to_string(n - 1) + " fields, got " + std::to_string(f.size() - 1));
    };
    if (open != nullptr && kw != "task" && kw != "end") fail("'" + kw + "' inside scenario block (missing 'end')");
    if (kw == "name") {
      want(2);
      inst.name = f[1];
    } else if (kw == "base") {
      want(2);
      inst.crew_base = f[1];
    } else if (kw == "param") {
      want(3);
      const std::string& k = f[1];
      if (k == "gamma") inst.gamma = to_int(f[2], "gamma");
      else if (k == "capacity_bound") inst.capacity_bound = to_int(f[2], "capacity_bound");
      else if (k == "excess_cost") inst.excess_cost = to_double(f[2], "excess_cost");
      else if (k == "min_transition") inst.min_transition = to_int(f[2], "min_transition");
      else if (k == "meal_break_min") inst.meal_break_min = to_int(f[2], "meal_break_min");
      else if (k == "max_stretch") inst.max_stretch_without_break = to_int(f[2], "max_stretch");
      else if (k == "check_in") inst.check_in = to_int(f[2], "check_in");
      else if (k == "check_out") inst.check_out = to_int(f[2], "check_out");
      else fail("unknown parameter '" + k + "'");
    } else if (kw == "maxlen") {
      want(3);
      const Minutes from = f[1] == "*" ? std::numeric_limits<Minutes>::min() / 2 : time_of(f[1]);
      if ((f[1] == "*") != steps.empty()) fail("maxlen: first entry must use '*', later entries a time");
      steps.emplace_back(from, to_int(f[2], "maxlen minutes"));
      saw_maxlen = true;
    } else if (kw == "station") {
      want(4);
      if (f[2] != "canteen" && f[2] != "-") fail("station: canteen field must be 'canteen' or '-'");
      if (f[3] != "base" && f[3] != "-") fail("station: base field must be 'base' or '-'");
      inst.stations.push_back({f[1], f[2] == "canteen", f[3] == "base"});
    } else if (kw == "template") {
      want(7);
      if (f[5] != "regular" && f[5] != "reserve") fail("template: kind must be 'regular' or 'reserve'");
      inst.templates.push_back({f[1], f[2], time_of(f[3]), time_of(f[4]), f[5] == "reserve", to_double(f[6], "cost")});
    } else if (kw == "constraint") {
      if (f.size() < 4 || f[3] != ":" || (f.size() - 4) % 2 != 0)
        fail("constraint: expected 'constraint LABEL RHS : [TEMPLATE COEF]...'");
      PendingConstraint pc{{f[1], {}, to_double(f[2], "rhs")}, {}, lineno};
      for (std::size_t i = 4; i < f.size(); i += 2) pc.terms.emplace_back(f[i], to_double(f[i + 1], "coefficient"));
      pending.push_back(std::move(pc));
    } else if (kw == "scenario") {
      want(2);
      inst.scenarios.push_back({f[1], {}});
      open = &inst.scenarios.back();
    } else if (kw == "task") {
      if (open == nullptr) fail("task outside scenario block");
      want(7);
      open->tasks.push_back({f[1], time_of(f[4]), time_of(f[5]), f[2], f[3], f[6]});
    } else if (kw == "end") {
      want(1);
      if (open == nullptr) fail("'end' without scenario");
      open = nullptr;
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  if (!header) throw InputError("empty instance file");
  if (open != nullptr) throw InputError("line " + std::to_string(lineno) + ": scenario '" + open->id + "' not closed");
  if (saw_maxlen) inst.max_duty_length = MaxDutyLength(steps);
  for (auto& pc : pending) {
    pc.c.coefficients.assign(inst.templates.size(), 0.0);
    for (const auto& [tid, coef] : pc.terms) {
      const int p = inst.template_index(tid);
      if (p < 0)
        throw InputError("line " + std::to_string(pc.line) + ": constraint references unknown template '" + tid + "'");
      pc.c.coefficients[p] += coef;
    }
    inst.rostering_constraints.push_back(std::move(pc.c));
  }
  inst.validate();
  return inst;
}

inline Instance instance_from_string(const std::string& text) {
  std::istringstream is(text);
  return parse_instance(is);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file '" + path + "'");
  try {
    return parse_instance(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_instance(inst, out);
  if (!out) throw InputError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------- reports

enum class ReportFormat { Json, Jsonl, Csv };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "jsonl") return ReportFormat::Jsonl;
  if (s == "csv") return ReportFormat::Csv;
  throw InputError("unknown report format '" + s + "' (json, jsonl, csv)");
}

// Report without wall-clock measurements, for byte comparisons.
inline SolveReport strip_timing(SolveReport r) {
  r.timing.clear();
  for (auto& it : r.iterations) it.time = 0.0;
  return r;
}

inline void write_iterations_jsonl(const SolveReport& r, std::ostream& os) {
  for (const auto& it : r.iterations) {
    nlohmann::json j = it;
    if (!std::isfinite(it.upper_bound)) j["upper_bound"] = nullptr;
    os << j.dump() << "\n";
  }
}

inline void write_summary_csv(const std::vector<SolveReport>& reports, std::ostream& os) {
  os << "method,instance,status,lower_bound,upper_bound,gap,templates,template_types,duties,excess\n";
  for (const auto& r : reports) {
    std::size_t duties = 0;
    double excess = 0;
    for (const auto& s : r.scenarios) {
      for (const auto& d : s.duties)
        if (!d.excess) ++duties;
      excess += s.excess;
    }
    os << r.method << "," << r.instance << "," << r.status << "," << format_number(r.lower_bound) << ","
       << format_number(r.upper_bound) << "," << format_number(r.gap) << "," << r.templates_selected() << ","
       << r.template_types() << "," << duties << "," << format_number(excess) << "\n";
  }
}

inline void write_report(const SolveReport& r, std::ostream& os, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: os << nlohmann::json(r).dump(2) << "\n"; break;
    case ReportFormat::Jsonl: write_iterations_jsonl(r, os); break;
    case ReportFormat::Csv: write_summary_csv({r}, os); break;
  }
}

inline void write_report(const SolveReport& r, const std::string& path, ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_report(r, out, format);
  if (!out) throw InputError("write failed for '" + path + "'");
}

inline SolveReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open report '" + path + "'");
  try {
    return nlohmann::json::parse(in).get<SolveReport>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

// Time series on a 5-minute grid per scenario: tasks in progress, template
// capacity available, and duties (regular and excess) on duty.
inline void write_plot_data(const Instance& inst, const SolveReport& r, std::ostream& os, Minutes step = 5) {
  os << "scenario,time,active_tasks,active_templates,active_duties,active_excess\n";
  const auto [lo, hi] = inst.operating_span();
  for (const auto& sc : inst.scenarios) {
    const ScenarioOutcome* out = nullptr;
    for (const auto& o : r.scenarios)
      if (o.scenario == sc.id) out = &o;
    for (Minutes t = lo - lo % step; t <= hi; t += step) {
      int templates = 0;
      for (const auto& [id, y] : r.portfolio) {
        const int p = inst.template_index(id);
        if (p >= 0 && inst.templates[p].earliest_start <= t && inst.templates[p].latest_end >= t + 1) templates += y;
      }
      double duties = 0, excess = 0;
      if (out != nullptr)
        for (const auto& d : out->duties)
          if (d.start <= t && d.end >= t + 1) (d.excess ? excess : duties) += d.value;
      os << sc.id << "," << format_time(t) << "," << active_tasks(sc, t) << "," << templates << ","
         << format_number(duties) << "," << format_number(excess) << "\n";
    }
  }
}

}  // namespace crewplan
