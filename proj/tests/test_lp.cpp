// Copyright 2026 The sbf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sbf/error.hpp"
#include "sbf/lp.hpp"

namespace sbf {
namespace {

// max x + y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  (8/5, 6/5), 14/5.
LpModel small_model() {
  LpModel m;
  const VarId x = m.add_variable(0, kInf, "x");
  const VarId y = m.add_variable(0, kInf, "y");
  m.add_constraint({{x, 1}, {y, 2}}, Relation::kLessEqual, 4);
  m.add_constraint({{x, 3}, {y, 1}}, Relation::kLessEqual, 6);
  m.set_objective(x, -1);
  m.set_objective(y, -1);
  return m;
}

TEST(Lp, SolvesSmallModel) {
  const LpSolution s = solve(small_model());
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.values[0], 1.6, 1e-9);
  EXPECT_NEAR(s.values[1], 1.2, 1e-9);
  EXPECT_NEAR(s.objective, -2.8, 1e-9);
  EXPECT_LE(s.max_violation, 1e-9);
}

TEST(Lp, InfeasibleAndUnbounded) {
  LpModel a;
  const VarId x = a.add_variable(0, kInf);
  a.add_constraint({{x, 1}}, Relation::kLessEqual, -1);
  EXPECT_EQ(solve(a).status, LpStatus::kInfeasible);

  LpModel b;
  const VarId y = b.add_variable(-kInf, kInf);
  b.set_objective(y, -1);
  EXPECT_EQ(solve(b).status, LpStatus::kUnbounded);
}

TEST(Lp, EqualityRowsAndOffset) {
  LpModel m;
  const VarId x = m.add_variable(-kInf, kInf);
  const VarId y = m.add_variable(0, 10);
  LinearExpr e(x, 1.0);
  e.add(y, 1.0);
  e += -3.0;  // x + y - 3 = 0
  m.add_constraint(e, Relation::kEqual);
  m.set_objective(x, 1);
  m.set_objective_offset(5);
  const LpSolution s = solve(m);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value(x), -7.0, 1e-9);
  EXPECT_NEAR(s.objective, -2.0, 1e-9);
}

TEST(Lp, DuplicateTermsAreMerged) {
  LpModel m;
  const VarId x = m.add_variable(0, kInf);
  const RowId r = m.add_constraint({{x, 1}, {x, 1}, {x, -0.5}}, Relation::kLessEqual, 3);
  ASSERT_EQ(m.constraint(r).terms.size(), 1u);
  EXPECT_DOUBLE_EQ(m.constraint(r).terms[0].coef, 1.5);
  const RowId z = m.add_constraint({{x, 1}, {x, -1}}, Relation::kLessEqual, 3);
  EXPECT_TRUE(m.constraint(z).terms.empty());
  m.set_objective(x, -1);
  const LpSolution s = solve(m);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value(x), 2.0, 1e-9);
}

TEST(Lp, RejectsBadInput) {
  LpModel m;
  const VarId x = m.add_variable(0, 1);
  EXPECT_THROW(m.add_constraint({{x, std::nan("")}}, Relation::kLessEqual, 0), Error);
  EXPECT_THROW(m.add_constraint({{VarId{7}, 1.0}}, Relation::kLessEqual, 0), Error);
}

TEST(Lp, AppendRowsMatchesFreshSolve) {
  LpModel m = small_model();
  LpSolver inc;
  inc.load(m);
  ASSERT_TRUE(inc.resolve(m).optimal());
  const std::int32_t first_row = m.num_constraints();
  const std::int32_t first_var = m.num_variables();
  const VarId s = m.add_variable(0, kInf);
  m.add_constraint({{VarId{0}, 1}, {VarId{1}, 1}, {s, 1}}, Relation::kLessEqual, 2.5);
  m.set_objective(s, 0.5);
  inc.append_rows(m, first_row, first_var);
  const LpSolution warm = inc.resolve(m);
  const LpSolution cold = solve(m);
  ASSERT_TRUE(warm.optimal());
  ASSERT_TRUE(cold.optimal());
  EXPECT_NEAR(warm.objective, cold.objective, 1e-9);
  EXPECT_NEAR(cold.objective, -2.5, 1e-9);
}

TEST(Lp, AuditAndRowActivity) {
  const LpModel m = small_model();
  const std::vector<double> point{1.0, 2.0};
  EXPECT_DOUBLE_EQ(m.row_activity(RowId{0}, point), 5.0);
  EXPECT_DOUBLE_EQ(m.max_violation(point), 1.0);
  EXPECT_EQ(m.num_nonzeros(), 4u);
}

TEST(Lp, DeterministicAndLpDump) {
  const LpSolution a = solve(small_model());
  const LpSolution b = solve(small_model());
  EXPECT_EQ(a.values, b.values);
  std::ostringstream os;
  small_model().write_lp(os);
  const std::string text = os.str();
  EXPECT_NE(text.find("Minimize"), std::string::npos);
  EXPECT_NE(text.find("Subject To"), std::string::npos);
  EXPECT_NE(text.find("End"), std::string::npos);
}

TEST(Lp, AlgorithmsAgree) {
  for (LpAlgorithm alg : {LpAlgorithm::kDualSimplex, LpAlgorithm::kPrimalSimplex,
                          LpAlgorithm::kInteriorPoint}) {
    SolverOptions o;
    o.algorithm = alg;
    const LpSolution s = solve(small_model(), o);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.objective, -2.8, 1e-7);
  }
}

}  // namespace
}  // namespace sbf
