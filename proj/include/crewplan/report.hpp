#pragma once

// Solver-independent result record shared by every solution method, with a
// JSON mapping. Time measurements live in `timing` and in the per-iteration
// `time` fields so they can be stripped for byte comparisons.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "crewplan/core_model.hpp"

namespace crewplan {

struct IterationRecord {
  std::string phase;  // "I" or "II"
  int iteration = 0;
  double lower_bound = 0.0;  // best phase-I bound so far
  double upper_bound = 0.0;  // best value of the current phase; infinity when none
  double master_objective = 0.0;
  int cuts_added = 0;
  int columns = 0;
  double time = 0.0;  // seconds since start

  bool operator==(const IterationRecord&) const = default;
};

struct ScheduledDuty {
  std::string template_id;  // window the duty is built in
  std::vector<std::string> task_ids;
  Minutes start = 0;
  Minutes end = 0;
  double value = 1.0;
  bool excess = false;

  bool operator==(const ScheduledDuty&) const = default;
};

struct ScenarioOutcome {
  std::string scenario;
  double excess = 0.0;
  std::vector<ScheduledDuty> duties;

  bool operator==(const ScenarioOutcome&) const = default;
};

struct SolveReport {
  std::string method;
  std::string instance;
  std::string status = "ok";
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double gap = 0.0;
  double lp_bound = 0.0;
  double template_cost = 0.0;
  double recovery_cost = 0.0;
  std::map<std::string, int> portfolio;  // template id -> y
  std::vector<ScenarioOutcome> scenarios;
  std::vector<IterationRecord> iterations;
  std::map<std::string, long> counters;
  std::map<std::string, double> timing;

  bool operator==(const SolveReport&) const = default;

  int templates_selected() const {
    int n = 0;
    for (const auto& [id, y] : portfolio) n += y;
    return n;
  }
  int template_types() const {
    int n = 0;
    for (const auto& [id, y] : portfolio) n += y > 0 ? 1 : 0;
    return n;
  }
};

inline void to_json(nlohmann::json& j, const IterationRecord& r) {
  j = {{"phase", r.phase},
       {"iteration", r.iteration},
       {"lower_bound", r.lower_bound},
       {"upper_bound", r.upper_bound},
       {"master_objective", r.master_objective},
       {"cuts_added", r.cuts_added},
       {"columns", r.columns},
       {"time", r.time}};
}
inline void from_json(const nlohmann::json& j, IterationRecord& r) {
  j.at("phase").get_to(r.phase);
  j.at("iteration").get_to(r.iteration);
  j.at("lower_bound").get_to(r.lower_bound);
  r.upper_bound = j.at("upper_bound").is_null() ? std::numeric_limits<double>::infinity()
                                                 : j.at("upper_bound").get<double>();
  j.at("master_objective").get_to(r.master_objective);
  j.at("cuts_added").get_to(r.cuts_added);
  j.at("columns").get_to(r.columns);
  j.at("time").get_to(r.time);
}

inline void to_json(nlohmann::json& j, const ScheduledDuty& d) {
  j = {{"template", d.template_id}, {"tasks", d.task_ids}, {"start", d.start},
       {"end", d.end},             {"value", d.value},    {"excess", d.excess}};
}
inline void from_json(const nlohmann::json& j, ScheduledDuty& d) {
  j.at("template").get_to(d.template_id);
  j.at("tasks").get_to(d.task_ids);
  j.at("start").get_to(d.start);
  j.at("end").get_to(d.end);
  j.at("value").get_to(d.value);
  j.at("excess").get_to(d.excess);
}

inline void to_json(nlohmann::json& j, const ScenarioOutcome& s) {
  j = {{"scenario", s.scenario}, {"excess", s.excess}, {"duties", s.duties}};
}
inline void from_json(const nlohmann::json& j, ScenarioOutcome& s) {
  j.at("scenario").get_to(s.scenario);
  j.at("excess").get_to(s.excess);
  j.at("duties").get_to(s.duties);
}

inline void to_json(nlohmann::json& j, const SolveReport& r) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  j = {{"method", r.method},
       {"instance", r.instance},
       {"status", r.status},
       {"lower_bound", r.lower_bound},
       {"upper_bound", finite_or_null(r.upper_bound)},
       {"gap", finite_or_null(r.gap)},
       {"lp_bound", r.lp_bound},
       {"template_cost", r.template_cost},
       {"recovery_cost", r.recovery_cost},
       {"portfolio", r.portfolio},
       {"scenarios", r.scenarios},
       {"iterations", nlohmann::json::array()},
       {"counters", r.counters},
       {"timing", r.timing}};
  for (const auto& it : r.iterations) {
    nlohmann::json e = it;
    e["upper_bound"] = finite_or_null(it.upper_bound);
    j["iterations"].push_back(std::move(e));
  }
}
inline void from_json(const nlohmann::json& j, SolveReport& r) {
  auto number = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
  };
  j.at("method").get_to(r.method);
  j.at("instance").get_to(r.instance);
  j.at("status").get_to(r.status);
  j.at("lower_bound").get_to(r.lower_bound);
  r.upper_bound = number(j.at("upper_bound"));
  r.gap = number(j.at("gap"));
  j.at("lp_bound").get_to(r.lp_bound);
  j.at("template_cost").get_to(r.template_cost);
  j.at("recovery_cost").get_to(r.recovery_cost);
  j.at("portfolio").get_to(r.portfolio);
  j.at("scenarios").get_to(r.scenarios);
  j.at("iterations").get_to(r.iterations);
  j.at("counters").get_to(r.counters);
  j.at("timing").get_to(r.timing);
}

}  // namespace crewplan
