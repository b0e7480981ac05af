#pragma once

// Brute-force duty enumeration. Walks every station-chained, time-ordered task
// sequence departing from the crew base and keeps those accepted by the duty
// rule predicate. Independent of the pricing network; used as an oracle and to
// build the extensive-form model.

#include <algorithm>
#include <vector>

#include "crewplan/core_model.hpp"

namespace crewplan {

inline std::vector<std::vector<int>> enumerate_sequences(const Instance& inst, const Scenario& scenario) {
  const auto& ks = scenario.tasks;
  const Minutes longest = inst.max_duty_length.max_value();
  std::vector<std::vector<int>> found;
  std::vector<int> path;
  auto dfs = [&](auto&& self) -> void {
    if (sequence_feasible(inst, scenario, path).feasible) found.push_back(path);
    const Task& last = ks[path.back()];
    const Minutes duty_start = ks[path.front()].start - inst.check_in;
    for (std::size_t k = 0; k < ks.size(); ++k) {
      const Task& next = ks[k];
      if (next.from_station != last.to_station || next.start < last.end) continue;
      if (next.end + inst.check_out - duty_start > longest) continue;
      path.push_back(static_cast<int>(k));
      self(self);
      path.pop_back();
    }
  };
  for (std::size_t k = 0; k < ks.size(); ++k) {
    if (ks[k].from_station != inst.crew_base) continue;
    path = {static_cast<int>(k)};
    dfs(dfs);
  }
  std::sort(found.begin(), found.end());
  return found;
}

// All feasible duties of a scenario, one per (template, sequence) pair that
// fits the template window.
inline std::vector<Duty> enumerate_duties(const Instance& inst, const Scenario& scenario) {
  std::vector<Duty> duties;
  const auto sequences = enumerate_sequences(inst, scenario);
  for (std::size_t p = 0; p < inst.templates.size(); ++p)
    for (const auto& seq : sequences) {
      Duty d = make_duty(inst, scenario, static_cast<int>(p), seq);
      if (duty_feasible(inst, scenario, d).feasible) duties.push_back(std::move(d));
    }
  std::sort(duties.begin(), duties.end());
  return duties;
}

inline std::vector<Duty> enumerate_template_duties(const Instance& inst, const Scenario& scenario, int template_index) {
  std::vector<Duty> duties;
  for (const auto& seq : enumerate_sequences(inst, scenario)) {
    Duty d = make_duty(inst, scenario, template_index, seq);
    if (duty_feasible(inst, scenario, d).feasible) duties.push_back(std::move(d));
  }
  return duties;
}

}  // namespace crewplan
