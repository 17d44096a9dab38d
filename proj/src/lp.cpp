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

#include "sbf/lp.hpp"

#include <Highs.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "sbf/error.hpp"

namespace sbf {

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
  for (const LinearTerm& t : other.terms) terms.push_back({t.var, t.coef * scale});
  constant += other.constant * scale;
  return *this;
}

void LpModel::check_var(VarId v) const {
  if (v.index < 0 || v.index >= num_variables()) {
    throw ModelError("constraint references undeclared variable " +
                     std::to_string(v.index));
  }
}

VarId LpModel::add_variable(double lower, double upper, std::string name) {
  if (!(lower <= upper)) {
    throw ModelError("variable bounds out of order: " + std::to_string(lower) +
                     " > " + std::to_string(upper));
  }
  variables_.push_back({lower, upper, std::move(name)});
  objective_.push_back(0.0);
  return VarId{num_variables() - 1};
}

VarId LpModel::add_variables(std::int32_t count, double lower, double upper) {
  const VarId first{num_variables()};
  for (std::int32_t k = 0; k < count; ++k) add_variable(lower, upper);
  return first;
}

RowId LpModel::add_constraint(std::vector<LinearTerm> terms, Relation relation,
                              double rhs) {
  for (const LinearTerm& t : terms) {
    check_var(t.var);
    if (!std::isfinite(t.coef)) throw ModelError("non-finite coefficient");
  }
  if (!std::isfinite(rhs)) throw ModelError("non-finite right-hand side");
  // Repeated variables are summed; exact zeros are dropped.
  std::sort(terms.begin(), terms.end(),
            [](const LinearTerm& a, const LinearTerm& b) { return a.var.index < b.var.index; });
  std::size_t out = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (out > 0 && terms[out - 1].var.index == terms[k].var.index) {
      terms[out - 1].coef += terms[k].coef;
    } else {
      terms[out++] = terms[k];
    }
  }
  terms.resize(out);
  std::erase_if(terms, [](const LinearTerm& t) { return t.coef == 0.0; });
  constraints_.push_back({std::move(terms), relation, rhs});
  return RowId{num_constraints() - 1};
}

RowId LpModel::add_constraint(const LinearExpr& expr, Relation relation) {
  return add_constraint(expr.terms, relation, -expr.constant);
}

void LpModel::set_objective(VarId var, double coef) {
  check_var(var);
  objective_[var.index] = coef;
}

std::size_t LpModel::num_nonzeros() const {
  std::size_t nnz = 0;
  for (const Constraint& c : constraints_) nnz += c.terms.size();
  return nnz;
}

double LpModel::row_activity(RowId r, std::span<const double> values) const {
  double activity = 0.0;
  for (const LinearTerm& t : constraints_.at(r.index).terms) {
    activity += t.coef * values[t.var.index];
  }
  return activity;
}

double LpModel::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (std::int32_t k = 0; k < num_variables(); ++k) {
    worst = std::max(worst, variables_[k].lower - values[k]);
    worst = std::max(worst, values[k] - variables_[k].upper);
  }
  for (std::int32_t r = 0; r < num_constraints(); ++r) {
    const double gap = row_activity(RowId{r}, values) - constraints_[r].rhs;
    worst = std::max(worst, constraints_[r].relation == Relation::kEqual
                                ? std::abs(gap)
                                : gap);
  }
  return worst;
}

namespace {

std::string var_name(const LpModel& model, std::int32_t k) {
  const auto& name = model.variables()[k].name;
  return name.empty() ? "x" + std::to_string(k) : name;
}

void write_terms(std::ostream& os, const LpModel& model,
                 std::span<const LinearTerm> terms) {
  bool first = true;
  for (const LinearTerm& t : terms) {
    if (t.coef == 0.0) continue;
    os << (t.coef < 0 ? (first ? "-" : " - ") : (first ? "" : " + "))
       << std::abs(t.coef) << ' ' << var_name(model, t.var.index);
    first = false;
  }
  if (first) os << "0 " << var_name(model, 0);
}

}  // namespace

void LpModel::write_lp(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << "\\ written by sbf\nMinimize\n obj: ";
  std::vector<LinearTerm> obj;
  for (std::int32_t k = 0; k < num_variables(); ++k) {
    if (objective_[k] != 0.0) obj.push_back({VarId{k}, objective_[k]});
  }
  write_terms(os, *this, obj);
  if (objective_offset_ != 0.0) {
    os << (objective_offset_ < 0 ? " - " : " + ") << std::abs(objective_offset_);
  }
  os << "\nSubject To\n";
  for (std::int32_t r = 0; r < num_constraints(); ++r) {
    const Constraint& c = constraints_[r];
    os << " r" << r << ": ";
    write_terms(os, *this, c.terms);
    os << (c.relation == Relation::kEqual ? " = " : " <= ") << c.rhs << '\n';
  }
  os << "Bounds\n";
  for (std::int32_t k = 0; k < num_variables(); ++k) {
    const Variable& v = variables_[k];
    const std::string name = var_name(*this, k);
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      os << ' ' << name << " free\n";
    } else if (std::isinf(v.lower)) {
      os << " -inf <= " << name << " <= " << v.upper << '\n';
    } else if (std::isinf(v.upper)) {
      if (v.lower != 0.0) os << ' ' << name << " >= " << v.lower << '\n';
    } else {
      os << ' ' << v.lower << " <= " << name << " <= " << v.upper << '\n';
    }
  }
  os << "End\n";
  os.precision(old_precision);
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// HiGHS adapter

namespace {

void append_columns(const LpModel& model, std::int32_t first_var, HighsLp& lp) {
  for (std::int32_t k = first_var; k < model.num_variables(); ++k) {
    const auto& v = model.variables()[k];
    lp.col_cost_.push_back(model.objective()[k]);
    lp.col_lower_.push_back(std::isinf(v.lower) ? -kHighsInf : v.lower);
    lp.col_upper_.push_back(std::isinf(v.upper) ? kHighsInf : v.upper);
  }
}

void fill_rows(const LpModel& model, std::int32_t first_row,
               std::vector<double>& lower, std::vector<double>& upper,
               std::vector<HighsInt>& start, std::vector<HighsInt>& index,
               std::vector<double>& value) {
  for (std::int32_t r = first_row; r < model.num_constraints(); ++r) {
    const auto& c = model.constraints()[r];
    lower.push_back(c.relation == Relation::kEqual ? c.rhs : -kHighsInf);
    upper.push_back(c.rhs);
    start.push_back(static_cast<HighsInt>(index.size()));
    for (const LinearTerm& t : c.terms) {
      if (t.coef == 0.0) continue;
      index.push_back(t.var.index);
      value.push_back(t.coef);
    }
  }
}

HighsLp to_highs(const LpModel& model) {
  HighsLp lp;
  lp.num_col_ = model.num_variables();
  lp.num_row_ = model.num_constraints();
  lp.sense_ = ObjSense::kMinimize;
  lp.offset_ = model.objective_offset();
  append_columns(model, 0, lp);
  std::vector<HighsInt> start;
  fill_rows(model, 0, lp.row_lower_, lp.row_upper_, start, lp.a_matrix_.index_,
            lp.a_matrix_.value_);
  start.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
  lp.a_matrix_.format_ = MatrixFormat::kRowwise;
  lp.a_matrix_.start_ = std::move(start);
  lp.a_matrix_.num_col_ = lp.num_col_;
  lp.a_matrix_.num_row_ = lp.num_row_;
  return lp;
}

void configure(Highs& highs, const SolverOptions& options) {
  highs.setOptionValue("output_flag", std::getenv("SBF_HIGHS_LOG") != nullptr);
  highs.setOptionValue("threads", 1);
  highs.setOptionValue("random_seed", 0);
  highs.setOptionValue("primal_feasibility_tolerance", options.feasibility_tol);
  highs.setOptionValue("dual_feasibility_tolerance", options.feasibility_tol);
  if (std::isfinite(options.time_limit_seconds)) {
    highs.setOptionValue("time_limit", options.time_limit_seconds);
  }
  switch (options.algorithm) {
    case LpAlgorithm::kAuto:
      break;
    case LpAlgorithm::kDualSimplex:
      highs.setOptionValue("solver", "simplex");
      highs.setOptionValue("simplex_strategy", 1);
      break;
    case LpAlgorithm::kPrimalSimplex:
      highs.setOptionValue("solver", "simplex");
      highs.setOptionValue("simplex_strategy", 4);
      break;
    case LpAlgorithm::kInteriorPoint:
      highs.setOptionValue("solver", "ipm");
      break;
  }
}

LpSolution collect(Highs& highs, const LpModel& model) {
  LpSolution out;
  HighsModelStatus status = highs.getModelStatus();
  if (status == HighsModelStatus::kUnboundedOrInfeasible) {
    // Presolve could not tell which; the simplex without presolve can.
    std::string presolve, solver;
    highs.getOptionValue("presolve", presolve);
    highs.getOptionValue("solver", solver);
    highs.setOptionValue("presolve", "off");
    highs.setOptionValue("solver", "simplex");
    highs.run();
    status = highs.getModelStatus();
    highs.setOptionValue("presolve", presolve);
    highs.setOptionValue("solver", solver);
  }
  switch (status) {
    case HighsModelStatus::kOptimal: {
      out.status = LpStatus::kOptimal;
      out.values = highs.getSolution().col_value;
      out.objective = highs.getInfo().objective_function_value;
      out.max_violation = model.max_violation(out.values);
      break;
    }
    case HighsModelStatus::kInfeasible:
      out.status = LpStatus::kInfeasible;
      break;
    case HighsModelStatus::kUnbounded:
      out.status = LpStatus::kUnbounded;
      break;
    default:
      out.status = LpStatus::kNumericalFailure;
      out.message = highs.modelStatusToString(status);
      break;
  }
  return out;
}

}  // namespace

struct LpSolver::Impl {
  Highs highs;
  SolverOptions options;
};

LpSolver::LpSolver(SolverOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
  configure(impl_->highs, options);
}

LpSolver::~LpSolver() = default;
LpSolver::LpSolver(LpSolver&&) noexcept = default;
LpSolver& LpSolver::operator=(LpSolver&&) noexcept = default;

void LpSolver::load(const LpModel& model) {
  impl_->highs.clearModel();
  configure(impl_->highs, impl_->options);
  if (impl_->highs.passModel(to_highs(model)) == HighsStatus::kError) {
    throw SolverError("HiGHS rejected the model");
  }
}

void LpSolver::append_rows(const LpModel& model, std::int32_t first_new_row,
                           std::int32_t first_new_var) {
  Highs& highs = impl_->highs;
  if (first_new_var < model.num_variables()) {
    HighsLp cols;
    append_columns(model, first_new_var, cols);
    const auto count = static_cast<HighsInt>(cols.col_cost_.size());
    std::vector<HighsInt> no_start(count, 0);
    if (highs.addCols(count, cols.col_cost_.data(), cols.col_lower_.data(),
                      cols.col_upper_.data(), 0, no_start.data(), nullptr,
                      nullptr) == HighsStatus::kError) {
      throw SolverError("HiGHS rejected new columns");
    }
  }
  std::vector<double> lower, upper, value;
  std::vector<HighsInt> start, index;
  fill_rows(model, first_new_row, lower, upper, start, index, value);
  if (!lower.empty() &&
      highs.addRows(static_cast<HighsInt>(lower.size()), lower.data(),
                    upper.data(), static_cast<HighsInt>(index.size()),
                    start.data(), index.data(),
                    value.data()) == HighsStatus::kError) {
    throw SolverError("HiGHS rejected new rows");
  }
}

LpSolution LpSolver::resolve(const LpModel& model) {
  impl_->highs.run();
  return collect(impl_->highs, model);
}

LpSolution LpSolver::solve(const LpModel& model) {
  load(model);
  return resolve(model);
}

LpSolution solve(const LpModel& model, const SolverOptions& options) {
  LpSolver solver(options);
  return solver.solve(model);
}

}  // namespace sbf
