#include <gtest/gtest.h>

#include <random>

#include "crewplan/lp.hpp"
#include "crewplan/milp.hpp"

namespace lp = crewplan::lp;

namespace {

void expect_strong_duality(const lp::LinearProgram& model, const lp::LpSolution& sol) {
  ASSERT_EQ(sol.status, lp::Status::Optimal);
  const double dual = lp::dual_objective(model, sol);
  EXPECT_NEAR(sol.objective, dual, 1e-6 * (1.0 + std::abs(sol.objective)));
  EXPECT_LE(lp::max_dual_infeasibility(model, sol), 1e-6);
  EXPECT_LE(model.max_violation(sol.primal), 1e-6);
}

// Knapsack oracle: max value with integer capacity.
double knapsack_dp(const std::vector<int>& weight, const std::vector<double>& value, int capacity) {
  std::vector<double> best(capacity + 1, 0.0);
  for (std::size_t i = 0; i < weight.size(); ++i)
    for (int c = capacity; c >= weight[i]; --c) best[c] = std::max(best[c], best[c - weight[i]] + value[i]);
  return best[capacity];
}

}  // namespace

TEST(SolveLp, SingleLowerBoundRow) {
  lp::LinearProgram m;
  int x = m.add_variable(-lp::kInf, lp::kInf, 1.0);
  m.add_constraint({x}, {1.0}, lp::Sense::GreaterEqual, 3.0);
  auto sol = lp::solve_lp(m);
  ASSERT_EQ(sol.status, lp::Status::Optimal);
  EXPECT_NEAR(sol.primal[0], 3.0, 1e-9);
  EXPECT_NEAR(sol.dual[0], 1.0, 1e-9);
  expect_strong_duality(m, sol);
}

TEST(SolveLp, InfeasiblePair) {
  lp::LinearProgram m;
  int x = m.add_variable(-lp::kInf, lp::kInf, 1.0);
  m.add_constraint({x}, {1.0}, lp::Sense::LessEqual, 0.0);
  m.add_constraint({x}, {1.0}, lp::Sense::GreaterEqual, 1.0);
  EXPECT_EQ(lp::solve_lp(m).status, lp::Status::Infeasible);
}

TEST(SolveLp, Unbounded) {
  lp::LinearProgram m;
  int x = m.add_variable(0, lp::kInf, -1.0);
  int y = m.add_variable(0, lp::kInf, 0.0);
  m.add_constraint({x, y}, {1.0, -1.0}, lp::Sense::LessEqual, 1.0);
  EXPECT_EQ(lp::solve_lp(m).status, lp::Status::Unbounded);
}

TEST(SolveLp, RejectsIntegerModels) {
  lp::LinearProgram m;
  m.add_variable(0, 1, 1.0, true);
  EXPECT_THROW(lp::solve_lp(m), crewplan::InputError);
}

TEST(SolveLp, MaximiseWithEqualityAndBounds) {
  // max 3x + 2y  s.t. x + y = 4, x <= 3, y in [0, 10]
  lp::LinearProgram m;
  m.objective_sense = lp::ObjectiveSense::Maximize;
  int x = m.add_variable(0, 3, 3.0);
  int y = m.add_variable(0, 10, 2.0);
  m.add_constraint({x, y}, {1, 1}, lp::Sense::Equal, 4.0);
  auto sol = lp::solve_lp(m);
  ASSERT_EQ(sol.status, lp::Status::Optimal);
  EXPECT_NEAR(sol.objective, 11.0, 1e-9);
  EXPECT_NEAR(sol.dual[0], 2.0, 1e-9);
  EXPECT_NEAR(lp::dual_objective(m, sol), 11.0, 1e-9);
}

// Degenerate set cover: tasks {0,1,2}; columns {0,1}, {1,2}, {0,2}, {0},
// {1}, {2}. Enumerating basic solutions by hand gives the fractional optimum
// 1.5 (each pair at 1/2).
TEST(SolveLp, DegenerateSetCoverMatchesHandSolve) {
  lp::LinearProgram m;
  const std::vector<std::vector<int>> cols = {{0, 1}, {1, 2}, {0, 2}, {0}, {1}, {2}};
  for (std::size_t c = 0; c < cols.size(); ++c) m.add_variable(0, lp::kInf, 1.0);
  for (int k = 0; k < 3; ++k) {
    std::vector<int> idx;
    std::vector<double> val;
    for (int c = 0; c < 6; ++c)
      if (std::find(cols[c].begin(), cols[c].end(), k) != cols[c].end()) {
        idx.push_back(c);
        val.push_back(1.0);
      }
    m.add_constraint(idx, val, lp::Sense::GreaterEqual, 1.0);
  }
  auto sol = lp::solve_lp(m);
  EXPECT_NEAR(sol.objective, 1.5, 1e-9);
  expect_strong_duality(m, sol);
}

TEST(SolveLp, RandomModelsSatisfyStrongDuality) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 60; ++trial) {
    lp::LinearProgram m;
    const int n = 3 + trial % 7, rows = 2 + trial % 5;
    for (int j = 0; j < n; ++j) m.add_variable(0, trial % 3 == 0 ? 4.0 : lp::kInf, u(rng));
    for (int i = 0; i < rows; ++i) {
      std::vector<int> idx;
      std::vector<double> val;
      for (int j = 0; j < n; ++j)
        if (rng() % 2) {
          idx.push_back(j);
          val.push_back(std::abs(u(rng)) + 0.1);
        }
      m.add_constraint(idx, val, i % 2 ? lp::Sense::LessEqual : lp::Sense::GreaterEqual, std::abs(u(rng)) + 1);
    }
    // Keep it bounded.
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    m.add_constraint(all, std::vector<double>(n, 1.0), lp::Sense::LessEqual, 50.0);
    auto sol = lp::solve_lp(m);
    if (sol.status == lp::Status::Optimal) expect_strong_duality(m, sol);
  }
}

TEST(SimplexSolver, WarmStartAfterColumnsAndRhsChanges) {
  lp::LinearProgram m;
  m.add_variable(0, lp::kInf, 1.0);
  m.add_constraint({0}, {1.0}, lp::Sense::GreaterEqual, 2.0);
  m.add_constraint({0}, {1.0}, lp::Sense::LessEqual, 10.0);
  lp::SimplexSolver s(m);
  auto a = s.solve();
  EXPECT_NEAR(a.objective, 2.0, 1e-9);
  s.add_column(0, lp::kInf, 0.5, {{0, 1.0}});
  auto b = s.solve();
  EXPECT_NEAR(b.objective, 1.0, 1e-9);
  s.set_rhs(0, 4.0);
  auto c = s.solve();
  EXPECT_NEAR(c.objective, 2.0, 1e-9);
  s.add_row({{1, 1.0}}, lp::Sense::LessEqual, 1.0);
  auto d = s.solve();
  EXPECT_NEAR(d.objective, 0.5 + 3.0, 1e-9);
}

TEST(SolveMilp, PureLpGivesZeroGap) {
  lp::LinearProgram m;
  int x = m.add_variable(0, lp::kInf, 1.0);
  m.add_constraint({x}, {2.0}, lp::Sense::GreaterEqual, 3.0);
  auto sol = lp::solve_milp(m, {});
  EXPECT_EQ(sol.status, lp::Status::Optimal);
  EXPECT_NEAR(sol.objective, 1.5, 1e-9);
  EXPECT_EQ(sol.gap, 0.0);
}

TEST(SolveMilp, KnapsackMatchesDynamicProgram) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> w(10);
    std::vector<double> v(10);
    for (int i = 0; i < 10; ++i) {
      w[i] = 1 + static_cast<int>(rng() % 15);
      v[i] = 1 + static_cast<double>(rng() % 40);
    }
    const int cap = 30 + trial;
    lp::LinearProgram m;
    m.objective_sense = lp::ObjectiveSense::Maximize;
    std::vector<int> idx;
    std::vector<double> coef;
    for (int i = 0; i < 10; ++i) {
      idx.push_back(m.add_variable(0, 1, v[i], true));
      coef.push_back(w[i]);
    }
    m.add_constraint(idx, coef, lp::Sense::LessEqual, cap);
    auto sol = lp::solve_milp(m, {});
    ASSERT_EQ(sol.status, lp::Status::Optimal);
    EXPECT_NEAR(sol.objective, knapsack_dp(w, v, cap), 1e-6) << "trial " << trial;
    EXPECT_TRUE(m.is_feasible(sol.primal));
  }
}

TEST(SolveMilp, InfeasibleIntegerModel) {
  lp::LinearProgram m;
  int x = m.add_variable(0, 10, 1.0, true);
  m.add_constraint({x}, {2.0}, lp::Sense::Equal, 3.0);
  EXPECT_EQ(lp::solve_milp(m, {}).status, lp::Status::Infeasible);
}

TEST(SolveMilp, NodeLimitReportsGap) {
  // min -sum x_i, sum 2 x_i <= 9 with binary x: LP 4.5, MILP 4.
  lp::LinearProgram m;
  std::vector<int> idx;
  for (int i = 0; i < 8; ++i) idx.push_back(m.add_variable(0, 1, -1.0, true));
  m.add_constraint(idx, std::vector<double>(8, 2.0), lp::Sense::LessEqual, 9.0);
  lp::MilpOptions o;
  auto full = lp::solve_milp(m, o);
  EXPECT_NEAR(full.objective, -4.0, 1e-9);
  o.node_limit = 1;
  o.initial_solution = std::vector<double>(8, 0.0);
  auto cut = lp::solve_milp(m, o);
  EXPECT_EQ(cut.status, lp::Status::TimeLimitFeasible);
  EXPECT_GT(cut.gap, 0.0);
}

TEST(SimplexSolver, RemovingColumnsKeepsEarlierColumnsIntact) {
  // Rows with basic slacks; removing the last column must leave them usable.
  lp::LinearProgram m;
  const int a = m.add_variable(0, lp::kInf, -1.0);
  const int b = m.add_variable(0, lp::kInf, -2.0);
  m.add_constraint({a, b}, {1.0, 1.0}, lp::Sense::LessEqual, 4.0);
  m.add_constraint({a}, {1.0}, lp::Sense::LessEqual, 3.0);
  lp::SimplexSolver s(m);
  const int c = s.add_column(0, lp::kInf, 5.0, {{0, 1.0}});
  EXPECT_NEAR(s.solve().objective, -8.0, 1e-9);
  ASSERT_FALSE(s.is_basic(c));
  s.remove_columns({c});
  s.set_rhs(0, 2.0);
  EXPECT_NEAR(s.solve().objective, -4.0, 1e-9);
  s.reset_basis();
  EXPECT_NEAR(s.solve().objective, -4.0, 1e-9);
}
