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

// Half-space polyhedra {x : H x <= h} and the handful of operations the
// barrier synthesis needs on them. Polyhedra may be empty or unbounded;
// rows are never normalized implicitly.

#ifndef SBF_POLYTOPE_HPP_
#define SBF_POLYTOPE_HPP_

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sbf/lp.hpp"

namespace sbf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kGeometryTol = 1e-9;

class Polyhedron {
 public:
  // Zero-dimensional placeholder; assign a real set before use.
  Polyhedron() = default;
  Polyhedron(Matrix H, Vector h);

  // Axis-aligned box; infinite bounds produce no row. A box with no finite
  // bound at all is all of R^n, stored as the single row 0 x <= 1.
  static Polyhedron box(const Vector& lower, const Vector& upper);
  static Polyhedron whole_space(int dim);

  int dim() const { return static_cast<int>(H_.cols()); }
  int rows() const { return static_cast<int>(H_.rows()); }
  const Matrix& H() const { return H_; }
  const Vector& h() const { return h_; }

  bool contains_point(const Vector& x, double tol = kGeometryTol) const;

  // True when every row has at most one nonzero coefficient, i.e. the set is
  // a (possibly degenerate or unbounded) box.
  bool is_axis_aligned() const;

 private:
  Matrix H_;
  Vector h_;
};

struct AffineMap {
  Matrix A;
  Vector b;

  AffineMap(Matrix A_, Vector b_);
  static AffineMap identity(int dim);

  int dim() const { return static_cast<int>(b.size()); }
  Vector operator()(const Vector& x) const { return A * x + b; }
};

// Axis-aligned bounds, entries may be infinite.
struct Box {
  Vector lower;
  Vector upper;

  bool empty() const { return (lower.array() > upper.array()).any(); }
  bool intersects(const Box& other, double margin) const;
};

// Interval image {A x + b + shift : x in box}, outer-approximated per axis.
Box affine_image(const Box& box, const AffineMap& f, const Vector& shift);

// {x : H_P x <= h_P, H_R x <= h_R}. No redundancy removal.
Polyhedron intersect(const Polyhedron& P, const Polyhedron& R);

// {x in source : f(x) + shift in target}.
Polyhedron preimage(const Polyhedron& source, const AffineMap& f,
                    const Vector& shift, const Polyhedron& target);

// Collapses rows with identical direction (after scaling to unit norm) to the
// tightest one and drops all-zero rows that are trivially satisfied. The
// result describes the same set. Used on derived sets so that intersections
// of boxes stay boxes with 2n rows.
Polyhedron merge_parallel_rows(const Polyhedron& P);

// True iff {x : H x <= h + tol} is infeasible. Axis-aligned systems are
// decided from their bounds; everything else goes through the LP solver.
// Throws SolverError if the solver cannot decide.
bool is_empty(const Polyhedron& P, double tol = kGeometryTol);
bool is_empty(const Polyhedron& P, LpSolver& solver, double tol = kGeometryTol);

struct Containment {
  bool contained = false;
  std::string diagnostic;
  explicit operator bool() const { return contained; }
};

// Whether R is a subset of P, up to tol on each row of P.
Containment contains(const Polyhedron& P, const Polyhedron& R,
                     double tol = kGeometryTol);

struct Support {
  LpStatus status = LpStatus::kNumericalFailure;
  double value = 0.0;  // sup of c.x; +inf if unbounded, -inf if empty
  Vector argmax;
};

// sup { c.x : x in P }. Axis-aligned sets are evaluated from their bounds,
// everything else by LP.
Support maximize(const Polyhedron& P, const Vector& c);
Support maximize(const Polyhedron& P, const Vector& c, LpSolver& solver);

// Tightest axis-aligned bounds. Exact from the rows for axis-aligned sets,
// by 2n LPs otherwise. Empty polyhedra give an empty box.
Box bounding_box(const Polyhedron& P);

// Radius of the largest inscribed ball, capped at `cap`. Negative when P is
// empty, 0 when P is nonempty but lower-dimensional.
double interior_radius(const Polyhedron& P, double cap = 1.0);

// Basic feasible points of a bounded polyhedron in dimension <= 3,
// deduplicated within 1e-9. Intended as a brute-force oracle.
std::vector<Vector> vertices(const Polyhedron& P);

// Uniform samples by rejection from the bounding box of P intersected with
// `clip`. Returns fewer than `count` points if the acceptance rate is too low.
std::vector<Vector> sample_uniform(const Polyhedron& P, int count,
                                   std::mt19937_64& rng,
                                   const std::optional<Box>& clip = std::nullopt);

std::string describe(const Polyhedron& P);

}  // namespace sbf

#endif  // SBF_POLYTOPE_HPP_
