#pragma once

// Seeded synthetic instances. A day is a set of out-and-back legs from the
// crew base (B->X->B, or B->X->Y->X->B); every leg is a legal duty on its own,
// so a zero-excess schedule always exists. Day s+1 perturbs day s leg by leg.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crewplan/core_model.hpp"

namespace crewplan {

struct GeneratorConfig {
  std::uint64_t seed = 1;
  int n_stations = 3;  // outstations besides the crew base
  int n_tasks = 20;    // target tasks in the first day
  int n_scenarios = 3;
  int holdout_days = 0;
  double add_rate = 0.1;
  double remove_rate = 0.1;
  double retime_rate = 0.2;
  Minutes horizon_start = 5 * 60;
  Minutes horizon_end = 24 * 60;
  double long_leg_fraction = 0.3;  // share of four-task legs
  Minutes min_task = 20;
  Minutes max_task = 60;
  // Template catalogue: regular windows every `template_step` minutes
  // starting in [template_first, template_last], plus one reserve template
  // over the horizon.
  Minutes template_length = 570;
  Minutes template_step = 30;
  std::optional<Minutes> template_first;  // default: horizon start
  std::optional<Minutes> template_last;   // default: horizon end - template_step
  bool reserve_template = true;
  double template_cost = 10000;
  double excess_cost = 40000;
  int gamma = 15;
  std::optional<double> early_fraction;
  std::optional<double> late_fraction;
  std::optional<double> reserve_fraction;
  Minutes max_duty_length = 540;
};

// Day-of-week rostering presets (early share, late share).
inline void apply_day_profile(GeneratorConfig& cfg, const std::string& day) {
  if (day == "mon" || day == "tue" || day == "wed") {
    cfg.early_fraction = 0.30;
    cfg.late_fraction = 0.30;
  } else if (day == "thu" || day == "fri") {
    cfg.early_fraction = 0.30;
    cfg.late_fraction = 0.45;
  } else if (day == "sat" || day == "sun") {
    cfg.early_fraction = 0.20;
    cfg.late_fraction = 0.55;
  } else {
    throw InputError("unknown day profile '" + day + "' (mon..sun)");
  }
  cfg.reserve_fraction = 0.10;
}

// Replaces the early/late/reserve share rows: sum_p (flag_p - frac) y_p <= 0.
// The reserve template is left out of the early and late rows.
inline void set_share_rows(Instance& inst, std::optional<double> early, std::optional<double> late,
                           std::optional<double> reserve) {
  auto& rows = inst.rostering_constraints;
  std::erase_if(rows, [](const RosteringConstraint& c) {
    return c.label == "early" || c.label == "late" || c.label == "reserve";
  });
  auto add = [&](const std::string& label, double frac, auto flag) {
    if (frac < 0.0 || frac > 1.0) throw InputError(label + " share must lie in [0, 1]");
    RosteringConstraint c{label, std::vector<double>(inst.templates.size(), 0.0), 0.0};
    for (std::size_t p = 0; p < inst.templates.size(); ++p) {
      const auto& t = inst.templates[p];
      if (label != "reserve" && t.is_reserve) continue;
      c.coefficients[p] = (flag(t) ? 1.0 : 0.0) - frac;
    }
    rows.push_back(std::move(c));
  };
  if (early) add("early", *early, [](const TemplateType& t) { return t.is_early(); });
  if (late) add("late", *late, [](const TemplateType& t) { return t.is_late(); });
  if (reserve) add("reserve", *reserve, [](const TemplateType& t) { return t.is_reserve; });
}

struct GeneratedFamily {
  Instance training;              // first n_scenarios days
  std::vector<Scenario> holdout;  // the following holdout_days days
};

namespace detail {

struct Leg {
  int id = 0;
  std::vector<Task> tasks;
  Minutes start() const { return tasks.front().start; }
  Minutes end() const { return tasks.back().end; }
};

class LegFactory {
 public:
  LegFactory(const GeneratorConfig& cfg, std::mt19937_64& rng) : cfg_(cfg), rng_(rng) {}

  int uniform(int lo, int hi) {
    return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  Leg make() {
    Leg leg;
    leg.id = next_id_++;
    const std::string x = "S" + std::to_string(uniform(1, cfg_.n_stations));
    std::vector<std::pair<std::string, std::string>> hops;
    if (cfg_.n_stations >= 2 && unit() < cfg_.long_leg_fraction) {
      std::string y;
      do y = "S" + std::to_string(uniform(1, cfg_.n_stations));
      while (y == x);
      hops = {{"B", x}, {x, y}, {y, x}, {x, "B"}};
    } else {
      hops = {{"B", x}, {x, "B"}};
    }
    std::vector<Minutes> dur, turn;
    Minutes total = 0;
    for (std::size_t i = 0; i < hops.size(); ++i) {
      dur.push_back(uniform(cfg_.min_task, cfg_.max_task));
      total += dur.back();
      if (i + 1 < hops.size()) {
        turn.push_back(uniform(5, 15));
        total += turn.back();
      }
    }
    const Minutes latest = cfg_.horizon_end - total;
    if (latest < cfg_.horizon_start) throw InputError("generator: horizon too short for any duty");
    Minutes t = uniform(cfg_.horizon_start, latest);
    const std::string stock = "R" + std::to_string(leg.id);
    for (std::size_t i = 0; i < hops.size(); ++i) {
      leg.tasks.push_back({"k" + std::to_string(leg.id) + "_" + std::to_string(i), t, t + dur[i], hops[i].first,
                           hops[i].second, stock});
      t += dur[i] + (i < turn.size() ? turn[i] : 0);
    }
    return leg;
  }

  // Shifts the whole leg by +-[5, 30] minutes, kept inside the horizon.
  void retime(Leg& leg) {
    Minutes shift = uniform(5, 30) * (unit() < 0.5 ? -1 : 1);
    if (leg.start() + shift < cfg_.horizon_start || leg.end() + shift > cfg_.horizon_end) shift = -shift;
    if (leg.start() + shift < cfg_.horizon_start || leg.end() + shift > cfg_.horizon_end) return;
    for (auto& k : leg.tasks) {
      k.start += shift;
      k.end += shift;
    }
  }

 private:
  const GeneratorConfig& cfg_;
  std::mt19937_64& rng_;
  int next_id_ = 0;
};

inline Scenario to_scenario(const std::string& id, std::vector<Leg> legs) {
  std::sort(legs.begin(), legs.end(), [](const Leg& a, const Leg& b) {
    return std::pair(a.start(), a.id) < std::pair(b.start(), b.id);
  });
  Scenario s{id, {}};
  for (const auto& l : legs) s.tasks.insert(s.tasks.end(), l.tasks.begin(), l.tasks.end());
  return s;
}

inline void validate_config(const GeneratorConfig& c) {
  auto rate = [](double r, const char* what) {
    if (!(r >= 0.0 && r <= 1.0)) throw InputError(std::string("generator: ") + what + " must lie in [0,1]");
  };
  rate(c.add_rate, "add rate");
  rate(c.remove_rate, "remove rate");
  rate(c.retime_rate, "retime rate");
  rate(c.long_leg_fraction, "long leg fraction");
  if (c.n_stations < 1) throw InputError("generator: need at least one outstation");
  if (c.n_tasks < 2) throw InputError("generator: need at least two tasks");
  if (c.n_scenarios < 1) throw InputError("generator: need at least one scenario");
  if (c.holdout_days < 0) throw InputError("generator: holdout days must be nonnegative");
  if (c.min_task < 1 || c.max_task < c.min_task) throw InputError("generator: bad task duration range");
  if (c.horizon_start < 0 || c.horizon_end <= c.horizon_start || c.horizon_end >= 2 * 1440)
    throw InputError("generator: bad horizon");
  if (c.template_step < 1 || c.template_length < 1) throw InputError("generator: bad template grid");
  // Longest leg must fit one duty and one stretch without a break.
  const Minutes longest = 4 * c.max_task + 3 * 15;
  if (longest > c.max_duty_length || longest > 330)
    throw InputError("generator: task durations too long for a single-leg duty");
}

}  // namespace detail

inline GeneratedFamily generate_family(const GeneratorConfig& cfg) {
  detail::validate_config(cfg);
  std::mt19937_64 rng(cfg.seed);
  detail::LegFactory factory(cfg, rng);

  Instance inst;
  inst.name = "gen-" + std::to_string(cfg.seed);
  inst.crew_base = "B";
  inst.stations.push_back({"B", true, true});
  for (int i = 1; i <= cfg.n_stations; ++i) inst.stations.push_back({"S" + std::to_string(i), i == 1 || factory.unit() < 0.5, false});
  inst.gamma = cfg.gamma;
  inst.excess_cost = cfg.excess_cost;
  inst.max_duty_length = MaxDutyLength(cfg.max_duty_length);

  std::vector<detail::Leg> legs;
  int tasks = 0;
  while (tasks < cfg.n_tasks) {
    legs.push_back(factory.make());
    tasks += static_cast<int>(legs.back().tasks.size());
  }
  const int days = cfg.n_scenarios + cfg.holdout_days;
  std::vector<Scenario> chain;
  chain.push_back(detail::to_scenario("d0", legs));
  for (int d = 1; d < days; ++d) {
    std::vector<detail::Leg> next;
    const std::size_t before = legs.size();
    for (auto& leg : legs) {
      if (factory.unit() < cfg.remove_rate) continue;
      if (factory.unit() < cfg.retime_rate) factory.retime(leg);
      next.push_back(leg);
    }
    for (std::size_t i = 0; i < before; ++i)
      if (factory.unit() < cfg.add_rate) next.push_back(factory.make());
    if (next.empty()) next.push_back(factory.make());
    legs = std::move(next);
    chain.push_back(detail::to_scenario("d" + std::to_string(d), legs));
  }

  const Minutes first = cfg.template_first.value_or(cfg.horizon_start);
  const Minutes last = cfg.template_last.value_or(cfg.horizon_end - cfg.template_step);
  for (Minutes s = first; s <= last; s += cfg.template_step) {
    const Minutes e = std::min<Minutes>(s + cfg.template_length, 2 * 1440 - 1);
    const int hh = s / 60, mm = s % 60;
    char id[16];
    std::snprintf(id, sizeof id, "T%02d%02d", hh, mm);
    inst.templates.push_back({id, "B", s, e, false, cfg.template_cost});
  }
  if (cfg.reserve_template) inst.templates.push_back({"RES", "B", cfg.horizon_start, cfg.horizon_end, true, cfg.template_cost});
  if (inst.templates.empty()) throw InputError("generator: empty template catalogue");

  set_share_rows(inst, cfg.early_fraction, cfg.late_fraction, cfg.reserve_template ? cfg.reserve_fraction : std::nullopt);

  GeneratedFamily fam;
  inst.scenarios.assign(chain.begin(), chain.begin() + cfg.n_scenarios);
  std::size_t most = 0;
  for (const auto& s : inst.scenarios) most = std::max(most, s.tasks.size());
  inst.capacity_bound = static_cast<int>(std::max<std::size_t>(1, most));
  fam.holdout.assign(chain.begin() + cfg.n_scenarios, chain.end());
  fam.training = std::move(inst);

  // Self-check: every task belongs to a leg that is a legal reserve duty.
  auto check = [&](const Scenario& s) {
    for (std::size_t k = 0; k < s.tasks.size();) {
      std::size_t e = k;
      while (e + 1 < s.tasks.size() && s.tasks[e].to_station != fam.training.crew_base) ++e;
      std::vector<int> seq;
      for (std::size_t i = k; i <= e; ++i) seq.push_back(static_cast<int>(i));
      if (!sequence_feasible(fam.training, s, seq).feasible)
        throw InputError("generator: leg starting with task " + s.tasks[k].id + " is not a legal duty");
      k = e + 1;
    }
  };
  for (const auto& s : fam.training.scenarios) check(s);
  for (const auto& s : fam.holdout) check(s);
  fam.training.validate();
  return fam;
}

inline Instance generate_instance(const GeneratorConfig& cfg) { return generate_family(cfg).training; }

// Keeps the `count` most recent scenarios.
inline Instance most_recent_scenarios(Instance inst, std::size_t count) {
  if (count == 0 || count > inst.scenarios.size()) throw InputError("most_recent_scenarios: bad count");
  inst.scenarios.erase(inst.scenarios.begin(), inst.scenarios.end() - static_cast<std::ptrdiff_t>(count));
  std::size_t most = 1;
  for (const auto& s : inst.scenarios) most = std::max(most, s.tasks.size());
  inst.capacity_bound = static_cast<int>(most);
  return inst;
}

}  // namespace crewplan
