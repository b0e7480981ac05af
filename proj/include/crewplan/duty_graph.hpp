#pragma once

// Pricing network for one (template, scenario) pair: task nodes inside the
// template window, feasible connection arcs, and source/sink arcs modelling
// departure from and arrival at the crew base.

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "crewplan/core_model.hpp"

namespace crewplan {

struct NetworkArc {
  int from = 0;  // node id; source() for source arcs
  int to = 0;    // node id; sink() for sink arcs
  Minutes idle = 0;
  bool break_eligible = false;
  bool canteen = false;
  Minutes span_start = 0;  // time interval the arc keeps a crew member on duty
  Minutes span_end = 0;
};

struct DutyNetwork {
  int template_index = -1;  // -1: relaxed network without a template window
  Minutes window_start = 0;
  Minutes window_end = 0;
  std::vector<int> tasks;  // scenario task index per node, sorted by (start, end, index)
  std::vector<Minutes> start, end;
  std::vector<NetworkArc> arcs;
  std::vector<std::vector<int>> out, in;  // arc ids; sized nodes + 2

  int size() const { return static_cast<int>(tasks.size()); }
  int source() const { return size(); }
  int sink() const { return size() + 1; }
  bool empty() const { return tasks.empty(); }

  bool has_source_arc(int node) const {
    for (int a : in[node])
      if (arcs[a].from == source()) return true;
    return false;
  }
  bool has_sink_arc(int node) const {
    for (int a : out[node])
      if (arcs[a].to == sink()) return true;
    return false;
  }
  std::size_t connection_arc_count() const {
    return static_cast<std::size_t>(
        std::count_if(arcs.begin(), arcs.end(), [&](const NetworkArc& a) { return a.from != source() && a.to != sink(); }));
  }
};

namespace detail {

inline DutyNetwork build_network_window(const Instance& inst, const Scenario& scenario, int template_index, Minutes ws,
                                        Minutes we) {
  DutyNetwork net;
  net.template_index = template_index;
  net.window_start = ws;
  net.window_end = we;
  const auto& ks = scenario.tasks;
  for (std::size_t k = 0; k < ks.size(); ++k)
    if (ks[k].start >= ws && ks[k].end <= we) net.tasks.push_back(static_cast<int>(k));
  std::sort(net.tasks.begin(), net.tasks.end(), [&](int a, int b) {
    if (ks[a].start != ks[b].start) return ks[a].start < ks[b].start;
    if (ks[a].end != ks[b].end) return ks[a].end < ks[b].end;
    return a < b;
  });
  const int n = net.size();
  net.out.assign(n + 2, {});
  net.in.assign(n + 2, {});
  for (int i = 0; i < n; ++i) {
    net.start.push_back(ks[net.tasks[i]].start);
    net.end.push_back(ks[net.tasks[i]].end);
  }
  auto add_arc = [&](NetworkArc a) {
    const int id = static_cast<int>(net.arcs.size());
    net.arcs.push_back(a);
    net.out[a.from].push_back(id);
    net.in[a.to].push_back(id);
  };
  for (int i = 0; i < n; ++i) {
    const Task& t = ks[net.tasks[i]];
    if (t.from_station == inst.crew_base && t.start - inst.check_in >= ws)
      add_arc({net.source(), i, inst.check_in, false, false, t.start - inst.check_in, t.start});
  }
  for (int i = 0; i < n; ++i) {
    const Task& a = ks[net.tasks[i]];
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Task& b = ks[net.tasks[j]];
      if (a.to_station != b.from_station) continue;
      const Minutes idle = b.start - a.end;
      if (idle < required_transition(inst, a, b)) continue;
      const bool canteen = inst.has_canteen(a.to_station);
      add_arc({i, j, idle, canteen && idle >= inst.meal_break_min, canteen, a.end, b.start});
    }
    if (a.to_station == inst.crew_base && a.end + inst.check_out <= we)
      add_arc({i, net.sink(), inst.check_out, false, false, a.end, a.end + inst.check_out});
  }
  return net;
}

}  // namespace detail

inline DutyNetwork build_network(const Instance& inst, const Scenario& scenario, int template_index) {
  if (template_index < 0 || static_cast<std::size_t>(template_index) >= inst.templates.size())
    throw InputError("build_network: unknown template index " + std::to_string(template_index));
  const TemplateType& t = inst.templates[template_index];
  return detail::build_network_window(inst, scenario, template_index, t.earliest_start, t.latest_end);
}

// Network without any template window, used by the flow bound.
inline DutyNetwork build_relaxed_network(const Instance& inst, const Scenario& scenario) {
  return detail::build_network_window(inst, scenario, -1, std::numeric_limits<Minutes>::min() / 4,
                                      std::numeric_limits<Minutes>::max() / 4);
}

struct ActiveElements {
  std::vector<int> task_nodes;  // tasks in progress during [t, t+1]
  std::vector<int> arcs;        // arcs whose traversal spans [t, t+1]
  bool empty() const { return task_nodes.empty() && arcs.empty(); }
};

// Elements that require a crew member to work during [t, t+1]. Work runs
// from the first departure to the last arrival: task execution plus idle
// time between tasks, but not check-in or check-out.
inline ActiveElements arcs_active_at(const DutyNetwork& net, Minutes t) {
  ActiveElements out;
  for (int i = 0; i < net.size(); ++i)
    if (net.start[i] <= t && net.end[i] >= t + 1) out.task_nodes.push_back(i);
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    const auto& arc = net.arcs[a];
    if (arc.from == net.source() || arc.to == net.sink()) continue;
    if (arc.span_start <= t && arc.span_end >= t + 1) out.arcs.push_back(static_cast<int>(a));
  }
  return out;
}

// Graphviz dump for debugging.
inline void write_dot(const DutyNetwork& net, const Scenario& scenario, std::ostream& os) {
  os << "digraph duty_network {\n  rankdir=LR;\n  source [shape=box];\n  sink [shape=box];\n";
  auto name = [&](int v) -> std::string {
    if (v == net.source()) return "source";
    if (v == net.sink()) return "sink";
    return "\"" + scenario.tasks[net.tasks[v]].id + "\"";
  };
  for (const auto& a : net.arcs) {
    os << "  " << name(a.from) << " -> " << name(a.to) << " [label=\"" << a.idle << "\"";
    if (a.break_eligible) os << ", style=bold";
    os << "];\n";
  }
  os << "}\n";
}

}  // namespace crewplan
