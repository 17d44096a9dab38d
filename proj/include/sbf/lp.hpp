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

// A thin linear-programming layer. Models are built in insertion order and
// handed to HiGHS; nothing above this header knows which solver runs.

#ifndef SBF_LP_HPP_
#define SBF_LP_HPP_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarId {
  std::int32_t index = -1;
  friend bool operator==(VarId, VarId) = default;
};

struct RowId {
  std::int32_t index = -1;
  friend bool operator==(RowId, RowId) = default;
};

struct LinearTerm {
  VarId var;
  double coef = 0.0;
};

// sum(terms) + constant. Used to describe right-hand sides that depend on
// decision variables (e.g. the dualized robust constraints).
struct LinearExpr {
  std::vector<LinearTerm> terms;
  double constant = 0.0;

  LinearExpr() = default;
  explicit LinearExpr(double c) : constant(c) {}
  LinearExpr(VarId v, double coef) : terms{{v, coef}} {}

  LinearExpr& add(VarId v, double coef) {
    terms.push_back({v, coef});
    return *this;
  }
  LinearExpr& add(const LinearExpr& other, double scale = 1.0);
  LinearExpr& operator+=(double c) {
    constant += c;
    return *this;
  }
};

enum class Relation { kLessEqual, kEqual };

class LpModel {
 public:
  struct Variable {
    double lower = 0.0;
    double upper = kInf;
    std::string name;
  };
  struct Constraint {
    std::vector<LinearTerm> terms;
    Relation relation = Relation::kLessEqual;
    double rhs = 0.0;
  };

  VarId add_variable(double lower, double upper, std::string name = {});
  // Adds `count` variables sharing the same bounds; returns the first id.
  // Ids are contiguous.
  VarId add_variables(std::int32_t count, double lower, double upper);

  RowId add_constraint(std::vector<LinearTerm> terms, Relation relation,
                       double rhs);
  // Moves the expression's constant to the right-hand side:
  //   expr (relation) 0.
  RowId add_constraint(const LinearExpr& expr, Relation relation);

  void set_objective(VarId var, double coef);
  void set_objective_offset(double offset) { objective_offset_ = offset; }

  std::int32_t num_variables() const {
    return static_cast<std::int32_t>(variables_.size());
  }
  std::int32_t num_constraints() const {
    return static_cast<std::int32_t>(constraints_.size());
  }
  std::size_t num_nonzeros() const;

  const Variable& variable(VarId v) const { return variables_.at(v.index); }
  const Constraint& constraint(RowId r) const {
    return constraints_.at(r.index);
  }
  std::span<const Variable> variables() const { return variables_; }
  std::span<const Constraint> constraints() const { return constraints_; }
  std::span<const double> objective() const { return objective_; }
  double objective_offset() const { return objective_offset_; }

  // Evaluates row r at the given primal point.
  double row_activity(RowId r, std::span<const double> values) const;

  // Largest violation of any bound or row at `values`; 0 when feasible.
  double max_violation(std::span<const double> values) const;

  // Writes the model in CPLEX LP text format.
  void write_lp(std::ostream& os) const;

 private:
  void check_var(VarId v) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<double> objective_;
  double objective_offset_ = 0.0;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

std::string_view to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<double> values;  // empty unless status == kOptimal
  double objective = 0.0;
  double max_violation = 0.0;  // audited against the model, not the solver
  std::string message;

  bool optimal() const { return status == LpStatus::kOptimal; }
  double value(VarId v) const { return values.at(v.index); }
};

enum class LpAlgorithm { kAuto, kDualSimplex, kPrimalSimplex, kInteriorPoint };

struct SolverOptions {
  double feasibility_tol = 1e-8;
  LpAlgorithm algorithm = LpAlgorithm::kAuto;
  double time_limit_seconds = kInf;
};

LpSolution solve(const LpModel& model, const SolverOptions& options = {});

// A reusable solver for many small LPs with the same shape. Keeps one HiGHS
// instance alive; not thread-safe, use one per thread.
class LpSolver {
 public:
  explicit LpSolver(SolverOptions options = {});
  ~LpSolver();
  LpSolver(LpSolver&&) noexcept;
  LpSolver& operator=(LpSolver&&) noexcept;
  LpSolver(const LpSolver&) = delete;
  LpSolver& operator=(const LpSolver&) = delete;

  LpSolution solve(const LpModel& model);

  // Incremental interface used by row generation: load once, then append
  // rows and re-solve from the previous basis.
  void load(const LpModel& model);
  void append_rows(const LpModel& model, std::int32_t first_new_row,
                   std::int32_t first_new_var);
  LpSolution resolve(const LpModel& model);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sbf

#endif  // SBF_LP_HPP_
