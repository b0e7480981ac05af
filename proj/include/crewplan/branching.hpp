#pragma once

// Branching rule shared by the template-selection MILPs: the total template
// count first, then z while more than gamma templates are in use, otherwise y.
// Anything else falls back to the solver's default rule.

#include <cmath>
#include <functional>
#include <vector>

namespace crewplan {

inline std::function<int(const std::vector<double>&)> template_branch_rule(int total, std::vector<int> y,
                                                                          std::vector<int> z, int gamma) {
  return [total, y = std::move(y), z = std::move(z), gamma](const std::vector<double>& x) {
    const double eps = 1e-6;
    auto frac = [&](int j) { return std::abs(x[j] - std::round(x[j])) > eps; };
    auto pick = [&](const std::vector<int>& vars) {
      int best = -1;
      double score = -1.0;
      for (int j : vars) {
        const double s = 0.5 - std::abs(x[j] - std::floor(x[j]) - 0.5);
        if (frac(j) && s > score + 1e-12) {
          best = j;
          score = s;
        }
      }
      return best;
    };
    if (frac(total)) return total;
    int used = 0;
    for (int j : y) used += x[j] > eps;
    const bool crowded = used > gamma;
    int j = pick(crowded ? z : y);
    if (j < 0) j = pick(crowded ? y : z);
    return j;
  };
}

}  // namespace crewplan
