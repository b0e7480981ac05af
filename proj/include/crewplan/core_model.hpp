#pragma once

// Domain model for template-based crew scheduling: tasks, stations, template
// types, duties, scenarios, and the duty rules that make a task sequence a
// legal day of work.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crewplan/errors.hpp"

namespace crewplan {

// Minutes from midnight of the operating day. Post-midnight work uses values
// above 1440.
using Minutes = int;

inline constexpr Minutes kEarlyBoundary = 6 * 60;
inline constexpr Minutes kLateBoundary = 24 * 60;

struct Task {
  std::string id;
  Minutes start = 0;
  Minutes end = 0;
  std::string from_station;
  std::string to_station;
  std::string rolling_stock;

  Minutes duration() const { return end - start; }
  bool operator==(const Task&) const = default;
};

struct Station {
  std::string id;
  bool has_canteen = false;
  bool is_crew_base = false;
  bool operator==(const Station&) const = default;
};

struct TemplateType {
  std::string id;
  std::string crew_base;
  Minutes earliest_start = 0;
  Minutes latest_end = 0;
  bool is_reserve = false;
  double cost = 0.0;

  bool is_early() const { return earliest_start < kEarlyBoundary; }
  bool is_late() const { return latest_end > kLateBoundary; }
  bool covers(Minutes from, Minutes to) const { return earliest_start <= from && to <= latest_end; }
  bool operator==(const TemplateType&) const = default;
};

struct Scenario {
  std::string id;
  std::vector<Task> tasks;
  bool operator==(const Scenario&) const = default;
};

// One linear row  sum_p coefficients[p] * y_p <= rhs  over template counts.
struct RosteringConstraint {
  std::string label;
  std::vector<double> coefficients;  // one per template type
  double rhs = 0.0;
  bool operator==(const RosteringConstraint&) const = default;
};

// Step function from duty start time to the maximum duty length. Entry
// (from, max) applies to starts >= from until the next entry.
class MaxDutyLength {
 public:
  MaxDutyLength() : steps_{{std::numeric_limits<Minutes>::min() / 2, 540}} {}
  explicit MaxDutyLength(Minutes constant) : steps_{{std::numeric_limits<Minutes>::min() / 2, constant}} {}
  explicit MaxDutyLength(std::vector<std::pair<Minutes, Minutes>> steps) : steps_(std::move(steps)) {
    if (steps_.empty()) throw InputError("max duty length: empty step function");
    std::sort(steps_.begin(), steps_.end());
  }

  Minutes operator()(Minutes duty_start) const {
    Minutes value = steps_.front().second;
    for (const auto& [from, max_len] : steps_) {
      if (from <= duty_start) value = max_len;
      else break;
    }
    return value;
  }

  Minutes max_value() const {
    Minutes best = 0;
    for (const auto& s : steps_) best = std::max(best, s.second);
    return best;
  }

  const std::vector<std::pair<Minutes, Minutes>>& steps() const { return steps_; }
  bool is_constant() const { return steps_.size() == 1; }
  bool operator==(const MaxDutyLength&) const = default;

 private:
  std::vector<std::pair<Minutes, Minutes>> steps_;
};

struct Instance {
  std::string name = "instance";
  std::string crew_base;
  std::vector<Station> stations;
  std::vector<TemplateType> templates;
  std::vector<Scenario> scenarios;
  std::vector<RosteringConstraint> rostering_constraints;
  int gamma = 15;
  int capacity_bound = 100;
  double excess_cost = 40000.0;
  Minutes min_transition = 10;
  MaxDutyLength max_duty_length;
  Minutes meal_break_min = 30;
  Minutes max_stretch_without_break = 330;
  Minutes check_in = 0;
  Minutes check_out = 0;

  bool operator==(const Instance&) const = default;

  const Station* find_station(const std::string& id) const {
    for (const auto& s : stations)
      if (s.id == id) return &s;
    return nullptr;
  }

  bool has_canteen(const std::string& station_id) const {
    const Station* s = find_station(station_id);
    return s != nullptr && s->has_canteen;
  }

  int template_index(const std::string& id) const {
    for (std::size_t p = 0; p < templates.size(); ++p)
      if (templates[p].id == id) return static_cast<int>(p);
    return -1;
  }

  double max_template_cost() const {
    double best = 0.0;
    for (const auto& t : templates) best = std::max(best, t.cost);
    return best;
  }

  std::size_t max_tasks_per_scenario() const {
    std::size_t best = 0;
    for (const auto& s : scenarios) best = std::max(best, s.tasks.size());
    return best;
  }

  // Earliest check-in and latest check-out over all scenarios.
  std::pair<Minutes, Minutes> operating_span() const {
    Minutes lo = std::numeric_limits<Minutes>::max();
    Minutes hi = std::numeric_limits<Minutes>::min();
    for (const auto& s : scenarios)
      for (const auto& t : s.tasks) {
        lo = std::min(lo, t.start - check_in);
        hi = std::max(hi, t.end + check_out);
      }
    if (lo > hi) return {0, 0};
    return {lo, hi};
  }

  // Throws InputError naming the first violated invariant.
  void validate() const {
    auto fail = [](const std::string& what) { throw InputError("invariant violated: " + what); };
    if (gamma < 1) fail("gamma >= 1");
    if (capacity_bound < 1) fail("capacity bound >= 1");
    if (meal_break_min < 0 || max_stretch_without_break <= 0) fail("break parameters positive");
    if (min_transition < 0 || check_in < 0 || check_out < 0) fail("nonnegative time allowances");
    std::set<std::string> station_ids;
    for (const auto& s : stations) {
      if (s.id.empty()) fail("station ids nonempty");
      if (!station_ids.insert(s.id).second) fail("station ids unique (" + s.id + ")");
    }
    if (find_station(crew_base) == nullptr) fail("crew base is a known station (" + crew_base + ")");
    std::set<std::string> template_ids;
    for (const auto& t : templates) {
      if (!template_ids.insert(t.id).second) fail("template ids unique (" + t.id + ")");
      if (t.earliest_start >= t.latest_end) fail("template window order (" + t.id + ")");
      if (t.cost < 0) fail("template cost nonnegative (" + t.id + ")");
      if (find_station(t.crew_base) == nullptr) fail("template crew base known (" + t.id + ")");
    }
    if (!templates.empty() && excess_cost <= max_template_cost()) fail("excess cost exceeds every template cost");
    const auto [span_lo, span_hi] = operating_span();
    for (const auto& t : templates)
      if (t.is_reserve && !scenarios.empty() && !t.covers(span_lo, span_hi))
        fail("reserve template spans the operating day (" + t.id + ")");
    std::set<std::string> scenario_ids;
    for (const auto& s : scenarios) {
      if (!scenario_ids.insert(s.id).second) fail("scenario ids unique (" + s.id + ")");
      std::set<std::string> task_ids;
      for (const auto& k : s.tasks) {
        if (!task_ids.insert(k.id).second) fail("duplicate id (task " + k.id + " in scenario " + s.id + ")");
        if (k.start >= k.end) fail("task time order (" + k.id + ")");
        if (k.from_station.empty() || k.to_station.empty()) fail("task stations nonempty (" + k.id + ")");
        if (find_station(k.from_station) == nullptr || find_station(k.to_station) == nullptr)
          fail("task stations known (" + k.id + ")");
      }
    }
    for (const auto& m : rostering_constraints)
      if (m.coefficients.size() != templates.size())
        fail("rostering constraint has one coefficient per template (" + m.label + ")");
  }
};

// A duty: an ordered task sequence bound to a template type. Task entries
// index into the owning scenario's task list.
struct Duty {
  int template_index = -1;
  std::vector<int> tasks;
  Minutes start = 0;  // first departure minus check-in
  Minutes end = 0;    // last arrival plus check-out

  Minutes length() const { return end - start; }
  // Variable workload cost: one unit per second worked.
  double length_cost() const { return 60.0 * static_cast<double>(length()); }

  // Canonical identity and ordering key.
  auto key() const { return std::tie(template_index, tasks); }
  bool operator==(const Duty& o) const { return key() == o.key(); }
  bool operator<(const Duty& o) const { return key() < o.key(); }
  std::string key_string() const {
    std::string s = std::to_string(template_index) + ":";
    for (std::size_t i = 0; i < tasks.size(); ++i) s += (i ? "," : "") + std::to_string(tasks[i]);
    return s;
  }
};

inline Duty make_duty(const Instance& inst, const Scenario& scenario, int template_index, std::vector<int> tasks) {
  Duty d;
  d.template_index = template_index;
  d.tasks = std::move(tasks);
  if (!d.tasks.empty()) {
    for (int k : d.tasks)
      if (k < 0 || static_cast<std::size_t>(k) >= scenario.tasks.size())
        throw InputError("duty references unknown task index " + std::to_string(k));
    d.start = scenario.tasks[d.tasks.front()].start - inst.check_in;
    d.end = scenario.tasks[d.tasks.back()].end + inst.check_out;
  }
  return d;
}

enum class Violation { Empty, Chain, Transition, BaseStart, BaseEnd, Length, Break, Window };

inline const char* to_string(Violation v) {
  switch (v) {
    case Violation::Empty: return "empty";
    case Violation::Chain: return "chain";
    case Violation::Transition: return "transition";
    case Violation::BaseStart: return "base-start";
    case Violation::BaseEnd: return "base-end";
    case Violation::Length: return "length";
    case Violation::Break: return "break";
    case Violation::Window: return "window";
  }
  return "?";
}

struct FeasibilityResult {
  bool feasible = true;
  std::vector<Violation> violations;

  bool has(Violation v) const { return std::find(violations.begin(), violations.end(), v) != violations.end(); }
};

// Minimum idle minutes between two consecutive tasks. Same rolling stock
// needs none, including direction reversals.
inline Minutes required_transition(const Instance& inst, const Task& a, const Task& b) {
  return a.rolling_stock == b.rolling_stock ? 0 : inst.min_transition;
}

inline bool is_meal_break(const Instance& inst, const Task& before, const Task& after) {
  return after.start - before.end >= inst.meal_break_min && inst.has_canteen(before.to_station);
}

// Checks the duty rule set for a task sequence independent of any template.
inline FeasibilityResult sequence_feasible(const Instance& inst, const Scenario& scenario, const std::vector<int>& tasks) {
  FeasibilityResult r;
  auto add = [&r](Violation v) {
    if (!r.has(v)) r.violations.push_back(v);
    r.feasible = false;
  };
  for (int k : tasks)
    if (k < 0 || static_cast<std::size_t>(k) >= scenario.tasks.size())
      throw InputError("duty references unknown task index " + std::to_string(k) + " in scenario " + scenario.id);
  if (tasks.empty()) {
    add(Violation::Empty);
    return r;
  }
  const auto& ks = scenario.tasks;
  const Task& first = ks[tasks.front()];
  const Task& last = ks[tasks.back()];
  if (first.from_station != inst.crew_base) add(Violation::BaseStart);
  if (last.to_station != inst.crew_base) add(Violation::BaseEnd);

  const Minutes duty_start = first.start - inst.check_in;
  const Minutes duty_end = last.end + inst.check_out;
  if (duty_end - duty_start > inst.max_duty_length(duty_start)) add(Violation::Length);

  Minutes stretch_start = duty_start;
  Minutes longest_stretch = 0;
  for (std::size_t i = 0; i + 1 < tasks.size(); ++i) {
    const Task& a = ks[tasks[i]];
    const Task& b = ks[tasks[i + 1]];
    if (a.to_station != b.from_station) add(Violation::Chain);
    if (b.start - a.end < required_transition(inst, a, b)) add(Violation::Transition);
    if (is_meal_break(inst, a, b)) {
      longest_stretch = std::max(longest_stretch, a.end - stretch_start);
      stretch_start = b.start;
    }
  }
  longest_stretch = std::max(longest_stretch, duty_end - stretch_start);
  if (longest_stretch > inst.max_stretch_without_break) add(Violation::Break);
  return r;
}

inline bool duty_fits_template(const Instance& inst, const Scenario& scenario, const Duty& duty, const TemplateType& tmpl) {
  if (duty.tasks.empty()) return false;
  const Task& first = scenario.tasks.at(duty.tasks.front());
  const Task& last = scenario.tasks.at(duty.tasks.back());
  if (tmpl.crew_base != first.from_station || tmpl.crew_base != last.to_station) return false;
  return tmpl.covers(first.start - inst.check_in, last.end + inst.check_out);
}

// Full rule check of a duty, including the fit with its template window.
inline FeasibilityResult duty_feasible(const Instance& inst, const Scenario& scenario, const Duty& duty) {
  if (duty.template_index < 0 || static_cast<std::size_t>(duty.template_index) >= inst.templates.size())
    throw InputError("duty references unknown template index " + std::to_string(duty.template_index));
  FeasibilityResult r = sequence_feasible(inst, scenario, duty.tasks);
  if (!duty.tasks.empty()) {
    const TemplateType& t = inst.templates[duty.template_index];
    const Minutes s = scenario.tasks[duty.tasks.front()].start - inst.check_in;
    const Minutes e = scenario.tasks[duty.tasks.back()].end + inst.check_out;
    if (!t.covers(s, e) || t.crew_base != inst.crew_base) {
      r.violations.push_back(Violation::Window);
      r.feasible = false;
    }
  }
  return r;
}

namespace detail {
using TaskSignature = std::tuple<Minutes, Minutes, std::string, std::string>;

inline TaskSignature signature(const Task& t) { return {t.start, t.end, t.from_station, t.to_station}; }

inline double directed_match(const Scenario& a, const Scenario& b) {
  if (a.tasks.empty()) return 0.0;
  std::multiset<TaskSignature> pool;
  for (const auto& t : b.tasks) pool.insert(signature(t));
  std::size_t matched = 0;
  for (const auto& t : a.tasks) {
    auto it = pool.find(signature(t));
    if (it != pool.end()) {
      ++matched;
      pool.erase(it);
    }
  }
  return static_cast<double>(matched) / static_cast<double>(a.tasks.size());
}
}  // namespace detail

// Fraction of tasks shared by two scenarios, matching on (start, end, from,
// to) and averaging both directions.
inline double similarity_ratio(const Scenario& a, const Scenario& b) {
  if (a.tasks.empty() || b.tasks.empty()) return 0.0;
  return 0.5 * (detail::directed_match(a, b) + detail::directed_match(b, a));
}

// Mean similarity ratio over consecutive scenario pairs.
inline double mean_similarity(const std::vector<Scenario>& scenarios) {
  if (scenarios.size() < 2) return 1.0;
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < scenarios.size(); ++s) total += similarity_ratio(scenarios[s], scenarios[s + 1]);
  return total / static_cast<double>(scenarios.size() - 1);
}

// Number of tasks in progress at minute t (start <= t < end).
inline int active_tasks(const Scenario& s, Minutes t) {
  int n = 0;
  for (const auto& k : s.tasks)
    if (k.start <= t && t < k.end) ++n;
  return n;
}

}  // namespace crewplan
