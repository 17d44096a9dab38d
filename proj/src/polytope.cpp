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

#include "sbf/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sbf/error.hpp"

namespace sbf {

Polyhedron::Polyhedron(Matrix H, Vector h) : H_(std::move(H)), h_(std::move(h)) {
  if (H_.rows() != h_.size()) {
    throw DimensionError("polyhedron has " + std::to_string(H_.rows()) +
                         " rows but rhs of length " + std::to_string(h_.size()));
  }
  if (H_.cols() < 1) throw DimensionError("polyhedron dimension must be >= 1");
  if (H_.rows() < 1) throw DimensionError("polyhedron needs at least one row");
  if (!H_.allFinite() || h_.hasNaN()) {
    throw DomainError("polyhedron coefficients must be finite");
  }
}

Polyhedron Polyhedron::box(const Vector& lower, const Vector& upper) {
  if (lower.size() != upper.size()) throw DimensionError("box bound lengths differ");
  const int n = static_cast<int>(lower.size());
  std::vector<std::pair<int, double>> rows;  // (signed axis + 1, rhs)
  for (int k = 0; k < n; ++k) {
    if (std::isfinite(upper[k])) rows.emplace_back(k + 1, upper[k]);
    if (std::isfinite(lower[k])) rows.emplace_back(-(k + 1), -lower[k]);
  }
  if (rows.empty()) return whole_space(n);
  Matrix H = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), n);
  Vector h(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int axis = std::abs(rows[r].first) - 1;
    H(r, axis) = rows[r].first > 0 ? 1.0 : -1.0;
    h[r] = rows[r].second;
  }
  return Polyhedron(std::move(H), std::move(h));
}

Polyhedron Polyhedron::whole_space(int dim) {
  return Polyhedron(Matrix::Zero(1, dim), Vector::Ones(1));
}

bool Polyhedron::contains_point(const Vector& x, double tol) const {
  if (x.size() != dim()) throw DimensionError("point dimension mismatch");
  return ((H_ * x - h_).array() <= tol).all();
}

bool Polyhedron::is_axis_aligned() const {
  for (Eigen::Index r = 0; r < H_.rows(); ++r) {
    if ((H_.row(r).array() != 0.0).count() > 1) return false;
  }
  return true;
}

AffineMap::AffineMap(Matrix A_, Vector b_) : A(std::move(A_)), b(std::move(b_)) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw DimensionError("affine map needs square A matching b");
  }
}

AffineMap AffineMap::identity(int dim) {
  return AffineMap(Matrix::Identity(dim, dim), Vector::Zero(dim));
}

bool Box::intersects(const Box& other, double margin) const {
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    if (lower[k] > other.upper[k] + margin) return false;
    if (other.lower[k] > upper[k] + margin) return false;
  }
  return true;
}

Box affine_image(const Box& box, const AffineMap& f, const Vector& shift) {
  const Eigen::Index n = f.dim();
  Box out{f.b + shift, f.b + shift};
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double a = f.A(r, k);
      if (a == 0.0) continue;
      const double x = a * box.lower[k];
      const double y = a * box.upper[k];
      out.lower[r] += std::min(x, y);
      out.upper[r] += std::max(x, y);
    }
  }
  return out;
}

Polyhedron intersect(const Polyhedron& P, const Polyhedron& R) {
  if (P.dim() != R.dim()) {
    throw DimensionError("intersect: dimensions " + std::to_string(P.dim()) +
                         " and " + std::to_string(R.dim()));
  }
  Matrix H(P.rows() + R.rows(), P.dim());
  H << P.H(), R.H();
  Vector h(P.rows() + R.rows());
  h << P.h(), R.h();
  return Polyhedron(std::move(H), std::move(h));
}

Polyhedron preimage(const Polyhedron& source, const AffineMap& f,
                    const Vector& shift, const Polyhedron& target) {
  const int n = source.dim();
  if (f.dim() != n || target.dim() != n || shift.size() != n) {
    throw DimensionError("preimage: operand dimensions disagree");
  }
  Matrix H(source.rows() + target.rows(), n);
  H << source.H(), target.H() * f.A;
  Vector h(source.rows() + target.rows());
  h << source.h(), target.h() - target.H() * (f.b + shift);
  return Polyhedron(std::move(H), std::move(h));
}

Polyhedron merge_parallel_rows(const Polyhedron& P) {
  const int n = P.dim();
  struct Row {
    Eigen::RowVectorXd dir;  // unit norm
    double scale;            // original norm
    Eigen::Index source;
    double rhs;              // in unit-norm units
  };
  std::vector<Row> kept;
  bool infeasible_zero_row = false;
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    const double norm = P.H().row(r).norm();
    if (norm == 0.0) {
      if (P.h()[r] < 0.0) infeasible_zero_row = true;
      continue;
    }
    Eigen::RowVectorXd dir = P.H().row(r) / norm;
    const double rhs = P.h()[r] / norm;
    auto same = std::find_if(kept.begin(), kept.end(), [&](const Row& k) {
      return (k.dir - dir).lpNorm<Eigen::Infinity>() <= 1e-12;
    });
    if (same == kept.end()) {
      kept.push_back({std::move(dir), norm, r, rhs});
    } else if (rhs < same->rhs) {
      same->scale = norm;
      same->source = r;
      same->rhs = rhs;
    }
  }
  if (infeasible_zero_row) return Polyhedron(Matrix::Zero(1, n), -Vector::Ones(1));
  if (kept.empty()) return Polyhedron::whole_space(n);
  Matrix H(static_cast<Eigen::Index>(kept.size()), n);
  Vector h(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    H.row(k) = P.H().row(kept[k].source);
    h[k] = P.h()[kept[k].source];
  }
  return Polyhedron(std::move(H), std::move(h));
}

namespace {

// Bounds implied by an axis-aligned system relaxed by `tol`. Sets
// `contradiction` if a zero row is violated.
Box axis_bounds(const Polyhedron& P, double tol, bool& contradiction) {
  const int n = P.dim();
  Box box{Vector::Constant(n, -kInf), Vector::Constant(n, kInf)};
  contradiction = false;
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    const double rhs = P.h()[r] + tol;
    Eigen::Index axis = -1;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (P.H()(r, k) != 0.0) axis = k;
    }
    if (axis < 0) {
      if (rhs < 0.0) contradiction = true;
      continue;
    }
    const double a = P.H()(r, axis);
    if (a > 0) {
      box.upper[axis] = std::min(box.upper[axis], rhs / a);
    } else {
      box.lower[axis] = std::max(box.lower[axis], rhs / a);
    }
  }
  return box;
}

LpModel feasibility_model(const Polyhedron& P, double tol,
                          const Vector* objective) {
  LpModel model;
  const VarId first = model.add_variables(P.dim(), -kInf, kInf);
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    std::vector<LinearTerm> terms;
    for (Eigen::Index k = 0; k < P.dim(); ++k) {
      if (P.H()(r, k) != 0.0) {
        terms.push_back({VarId{first.index + static_cast<std::int32_t>(k)},
                         P.H()(r, k)});
      }
    }
    model.add_constraint(std::move(terms), Relation::kLessEqual, P.h()[r] + tol);
  }
  if (objective != nullptr) {
    for (Eigen::Index k = 0; k < P.dim(); ++k) {
      model.set_objective(VarId{first.index + static_cast<std::int32_t>(k)},
                          -(*objective)[k]);
    }
  }
  return model;
}

}  // namespace

bool is_empty(const Polyhedron& P, LpSolver& solver, double tol) {
  if (!(tol > 0.0)) throw DomainError("is_empty: tolerance must be positive");
  if (P.is_axis_aligned()) {
    bool contradiction = false;
    const Box box = axis_bounds(P, tol, contradiction);
    return contradiction || box.empty();
  }
  const LpSolution sol = solver.solve(feasibility_model(P, tol, nullptr));
  switch (sol.status) {
    case LpStatus::kOptimal:
      return false;
    case LpStatus::kInfeasible:
      return true;
    default:
      throw SolverError("emptiness LP ended with status " +
                        std::string(to_string(sol.status)) + " " + sol.message);
  }
}

bool is_empty(const Polyhedron& P, double tol) {
  LpSolver solver;
  return is_empty(P, solver, tol);
}

Support maximize(const Polyhedron& P, const Vector& c, LpSolver& solver) {
  if (c.size() != P.dim()) throw DimensionError("maximize: direction dimension");
  if (P.is_axis_aligned()) {
    bool contradiction = false;
    const Box box = axis_bounds(P, 0.0, contradiction);
    Support out;
    if (contradiction || box.empty()) {
      out.status = LpStatus::kInfeasible;
      out.value = -kInf;
      return out;
    }
    out.status = LpStatus::kOptimal;
    out.argmax = Vector::Zero(P.dim());
    for (Eigen::Index k = 0; k < P.dim(); ++k) {
      if (c[k] == 0.0) {
        // any point of the box will do
        out.argmax[k] = std::isfinite(box.lower[k]) ? box.lower[k]
                        : std::isfinite(box.upper[k]) ? box.upper[k] : 0.0;
        continue;
      }
      const double end = c[k] > 0 ? box.upper[k] : box.lower[k];
      if (!std::isfinite(end)) {
        out.status = LpStatus::kUnbounded;
        out.value = kInf;
        out.argmax.resize(0);
        return out;
      }
      out.argmax[k] = end;
    }
    out.value = c.dot(out.argmax);
    return out;
  }
  const LpSolution sol = solver.solve(feasibility_model(P, 0.0, &c));
  Support out;
  out.status = sol.status;
  switch (sol.status) {
    case LpStatus::kOptimal:
      out.argmax = Eigen::Map<const Vector>(sol.values.data(), P.dim());
      out.value = c.dot(out.argmax);
      break;
    case LpStatus::kUnbounded:
      out.value = kInf;
      break;
    case LpStatus::kInfeasible:
      out.value = -kInf;
      break;
    case LpStatus::kNumericalFailure:
      throw SolverError("support LP failed: " + sol.message);
  }
  return out;
}

Support maximize(const Polyhedron& P, const Vector& c) {
  LpSolver solver;
  return maximize(P, c, solver);
}

Containment contains(const Polyhedron& P, const Polyhedron& R, double tol) {
  if (P.dim() != R.dim()) throw DimensionError("contains: dimensions differ");
  LpSolver solver;
  if (is_empty(R, solver, tol)) return {true, {}};
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    const Vector a = P.H().row(r).transpose();
    const Support s = maximize(R, a, solver);
    if (s.status == LpStatus::kUnbounded) {
      return {false, "row " + std::to_string(r) + " is unbounded above on the inner set"};
    }
    if (s.value > P.h()[r] + tol) {
      std::ostringstream os;
      os << "row " << r << ": sup " << s.value << " exceeds " << P.h()[r];
      return {false, os.str()};
    }
  }
  return {true, {}};
}

Box bounding_box(const Polyhedron& P) {
  const int n = P.dim();
  if (P.is_axis_aligned()) {
    bool contradiction = false;
    Box box = axis_bounds(P, 0.0, contradiction);
    if (contradiction) {
      box.lower.setConstant(kInf);
      box.upper.setConstant(-kInf);
    }
    return box;
  }
  LpSolver solver;
  Box box{Vector::Constant(n, -kInf), Vector::Constant(n, kInf)};
  for (int k = 0; k < n; ++k) {
    const Vector e = Vector::Unit(n, k);
    const Support hi = maximize(P, e, solver);
    if (hi.status == LpStatus::kInfeasible) {
      box.lower.setConstant(kInf);
      box.upper.setConstant(-kInf);
      return box;
    }
    box.upper[k] = hi.value;
    box.lower[k] = -maximize(P, -e, solver).value;
  }
  return box;
}

double interior_radius(const Polyhedron& P, double cap) {
  if (P.is_axis_aligned()) {
    bool contradiction = false;
    const Box box = axis_bounds(P, 0.0, contradiction);
    if (contradiction) return -1.0;
    double r = cap;
    for (Eigen::Index k = 0; k < box.lower.size(); ++k) {
      r = std::min(r, 0.5 * (box.upper[k] - box.lower[k]));
    }
    return r;
  }
  // max r s.t. a_i x + r |a_i| <= h_i, r <= cap. Negative r certifies
  // emptiness.
  LpModel model;
  const VarId first = model.add_variables(P.dim(), -kInf, kInf);
  const VarId radius = model.add_variable(-kInf, cap);
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    std::vector<LinearTerm> terms;
    for (Eigen::Index k = 0; k < P.dim(); ++k) {
      if (P.H()(r, k) != 0.0) {
        terms.push_back({VarId{first.index + static_cast<std::int32_t>(k)},
                         P.H()(r, k)});
      }
    }
    const double norm = P.H().row(r).norm();
    if (norm == 0.0) {
      if (P.h()[r] < 0.0) return -1.0;
      continue;
    }
    terms.push_back({radius, norm});
    model.add_constraint(std::move(terms), Relation::kLessEqual, P.h()[r]);
  }
  model.set_objective(radius, -1.0);
  const LpSolution sol = solve(model);
  if (sol.status == LpStatus::kUnbounded) return -1.0;  // cannot happen: r free only below
  if (!sol.optimal()) {
    throw SolverError("Chebyshev LP failed: " + std::string(to_string(sol.status)));
  }
  return sol.value(radius);
}

std::vector<Vector> vertices(const Polyhedron& P) {
  const int n = P.dim();
  if (n > 3) throw DomainError("vertices: only dimensions <= 3 are supported");
  const Box box = bounding_box(P);
  if (box.empty()) return {};
  if (!box.lower.allFinite() || !box.upper.allFinite()) {
    throw DomainError("vertices: polyhedron is unbounded");
  }
  const int m = P.rows();
  std::vector<Vector> out;
  std::vector<int> pick(n);
  std::iota(pick.begin(), pick.end(), 0);
  auto advance = [&]() {
    int k = n - 1;
    while (k >= 0 && pick[k] == m - n + k) --k;
    if (k < 0) return false;
    ++pick[k];
    for (int j = k + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
    return true;
  };
  if (m < n) return {};
  do {
    Matrix A(n, n);
    Vector rhs(n);
    for (int k = 0; k < n; ++k) {
      A.row(k) = P.H().row(pick[k]);
      rhs[k] = P.h()[pick[k]];
    }
    Eigen::FullPivLU<Matrix> lu(A);
    lu.setThreshold(1e-12);
    if (lu.rank() < n) continue;
    const Vector x = lu.solve(rhs);
    if (!P.contains_point(x, 1e-9)) continue;
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Vector& v) {
      return (v - x).lpNorm<Eigen::Infinity>() <= 1e-9;
    });
    if (!duplicate) out.push_back(x);
  } while (advance());
  return out;
}

std::vector<Vector> sample_uniform(const Polyhedron& P, int count,
                                   std::mt19937_64& rng,
                                   const std::optional<Box>& clip) {
  Box box = bounding_box(P);
  if (clip) {
    box.lower = box.lower.cwiseMax(clip->lower);
    box.upper = box.upper.cwiseMin(clip->upper);
  }
  if (box.empty()) return {};
  if (!box.lower.allFinite() || !box.upper.allFinite()) {
    throw DomainError("sample_uniform: unbounded set needs a clip box");
  }
  std::vector<Vector> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const long max_attempts = 1000L * count;
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count;
       ++attempt) {
    Vector x(P.dim());
    for (int k = 0; k < P.dim(); ++k) {
      x[k] = box.lower[k] + unit(rng) * (box.upper[k] - box.lower[k]);
    }
    if (P.contains_point(x, 0.0)) out.push_back(std::move(x));
  }
  return out;
}

std::string describe(const Polyhedron& P) {
  std::ostringstream os;
  os << '{';
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    if (r) os << ", ";
    bool first = true;
    for (Eigen::Index k = 0; k < P.dim(); ++k) {
      const double a = P.H()(r, k);
      if (a == 0.0) continue;
      os << (first ? (a < 0 ? "-" : "") : (a < 0 ? " - " : " + "));
      if (std::abs(a) != 1.0) os << std::abs(a) << '*';
      os << 'x' << k + 1;
      first = false;
    }
    if (first) os << '0';
    os << " <= " << P.h()[r];
  }
  os << '}';
  return os.str();
}

}  // namespace sbf
