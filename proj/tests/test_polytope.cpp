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

#include <random>

#include "oracles.hpp"
#include "sbf/error.hpp"
#include "sbf/polytope.hpp"

namespace sbf {
namespace {

Vector v1(double a) { return Vector::Constant(1, a); }
Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Polyhedron interval(double lo, double hi) { return Polyhedron::box(v1(lo), v1(hi)); }
Polyhedron unit_square() { return Polyhedron::box(v2(0, 0), v2(1, 1)); }

// Set equality of bounded polytopes through their vertex sets.
void expect_same_set(const Polyhedron& P, const Polyhedron& R) {
  auto a = oracle::enumerate_vertices(P);
  auto b = oracle::enumerate_vertices(R);
  ASSERT_EQ(a.size(), b.size());
  for (const Vector& x : a) {
    EXPECT_TRUE(std::any_of(b.begin(), b.end(),
                            [&](const Vector& y) { return (x - y).norm() < 1e-9; }));
  }
}

TEST(Intersect, StacksRows) {
  const Polyhedron I = intersect(interval(0, 1), interval(0.5, 2));
  EXPECT_EQ(I.rows(), 4);
  expect_same_set(I, interval(0.5, 1));
}

TEST(Intersect, Idempotent) {
  const Polyhedron P = unit_square();
  expect_same_set(intersect(P, P), P);
}

TEST(Intersect, DisjointIsEmpty) {
  Matrix H(1, 2);
  H << -1, 0;
  const Polyhedron half(H, v1(-2));
  EXPECT_TRUE(is_empty(intersect(unit_square(), half)));
}

TEST(Intersect, DimensionMismatchThrows) {
  EXPECT_THROW(intersect(interval(0, 1), unit_square()), DimensionError);
}

TEST(Preimage, IdentityMap) {
  const Polyhedron Q = preimage(unit_square(), AffineMap::identity(2), Vector::Zero(2),
                                unit_square());
  expect_same_set(Q, unit_square());
}

TEST(Preimage, ShiftedOutOfTarget) {
  const Polyhedron Q = preimage(interval(0, 1), AffineMap::identity(1), v1(2), interval(0, 1));
  EXPECT_TRUE(is_empty(Q));
}

TEST(Preimage, ScaledAndShifted) {
  const AffineMap f(Matrix::Constant(1, 1, 2.0), v1(0));
  const Polyhedron Q = preimage(interval(0, 2), f, v1(-1), interval(0, 1));
  expect_same_set(Q, interval(0.5, 1));
}

TEST(Preimage, SampledPointsMapIntoTarget) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Polyhedron S = oracle::random_polytope(2, 6, rng);
    const Polyhedron T = oracle::random_polytope(2, 5, rng);
    Matrix A = Matrix::Random(2, 2);
    const AffineMap f(A, Vector::Random(2));
    const Vector eta = 0.3 * Vector::Random(2);
    const Polyhedron Q = preimage(S, f, eta, T);
    for (const Vector& x : sample_uniform(Q, 50, rng)) {
      EXPECT_TRUE(S.contains_point(x, 1e-9));
      EXPECT_TRUE(T.contains_point(f(x) + eta, 1e-9));
    }
  }
}

TEST(IsEmpty, Examples) {
  Matrix H(2, 1);
  H << 1, -1;
  EXPECT_TRUE(is_empty(Polyhedron(H, v2(1, -2))));
  EXPECT_FALSE(is_empty(Polyhedron(H, v2(1, 0))));
  EXPECT_FALSE(is_empty(Polyhedron::box(v2(0, 0), v2(0, 0))));
}

TEST(IsEmpty, RandomBoxes) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    Vector lo1(2), hi1(2), lo2(2), hi2(2);
    for (int k = 0; k < 2; ++k) {
      lo1[k] = u(rng);
      hi1[k] = lo1[k] + 0.5 + std::abs(u(rng));
      lo2[k] = u(rng);
      hi2[k] = lo2[k] + 0.5 + std::abs(u(rng));
    }
    const double gap = std::max((lo2 - hi1).maxCoeff(), (lo1 - hi2).maxCoeff());
    if (std::abs(gap) < 1e-3) continue;
    const bool disjoint = gap > 0;
    EXPECT_EQ(is_empty(intersect(Polyhedron::box(lo1, hi1), Polyhedron::box(lo2, hi2))),
              disjoint);
  }
}

TEST(Contains, Examples) {
  EXPECT_TRUE(contains(interval(0, 2), interval(0, 1)));
  EXPECT_FALSE(contains(interval(0, 1), interval(0, 2)));
  Matrix H(3, 2);
  H << -1, 0, 0, -1, 1, 1;
  const Polyhedron triangle(H, Vector::Map(std::array{0.0, 0.0, 1.0}.data(), 3));
  EXPECT_TRUE(contains(unit_square(), triangle));
}

TEST(Contains, EmptyInnerSet) {
  Matrix H(2, 1);
  H << 1, -1;
  EXPECT_TRUE(contains(interval(0, 1), Polyhedron(H, v2(1, -2))));
}

TEST(Contains, UnboundedInnerSetFails) {
  const Containment c = contains(interval(0, 1), Polyhedron::whole_space(1));
  EXPECT_FALSE(c);
  EXPECT_FALSE(c.diagnostic.empty());
}

TEST(Contains, TransitiveOnNestedBoxes) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector c = Vector::Random(2);
    const double r1 = 1 + u(rng), r2 = r1 * u(rng), r3 = r2 * u(rng);
    const Vector one = Vector::Ones(2);
    const Polyhedron P = Polyhedron::box(c - r1 * one, c + r1 * one);
    const Polyhedron R = Polyhedron::box(c - r2 * one, c + r2 * one);
    const Polyhedron S = Polyhedron::box(c - r3 * one, c + r3 * one);
    ASSERT_TRUE(contains(P, R) && contains(R, S));
    EXPECT_TRUE(contains(P, S));
  }
}

TEST(Vertices, Examples) {
  EXPECT_EQ(vertices(unit_square()).size(), 4u);
  const auto iv = vertices(interval(0, 1));
  ASSERT_EQ(iv.size(), 2u);
  EXPECT_DOUBLE_EQ(std::min(iv[0][0], iv[1][0]), 0.0);
  EXPECT_DOUBLE_EQ(std::max(iv[0][0], iv[1][0]), 1.0);
  Matrix H(3, 2);
  H << -1, 0, 0, -1, 1, 1;
  const Polyhedron triangle(H, Vector::Map(std::array{0.0, 0.0, 1.0}.data(), 3));
  EXPECT_EQ(vertices(triangle).size(), 3u);
}

TEST(Vertices, RejectsUnboundedAndHighDimension) {
  EXPECT_THROW(vertices(Polyhedron::whole_space(2)), DomainError);
  EXPECT_THROW(vertices(Polyhedron::box(Vector::Zero(4), Vector::Ones(4))), DomainError);
}

TEST(Maximize, AgreesWithVertexOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3;
    const Polyhedron P = oracle::random_polytope(n, 2 * n + trial % 4, rng);
    const Vector c = Vector::Random(n);
    const Support s = maximize(P, c);
    ASSERT_EQ(s.status, LpStatus::kOptimal);
    EXPECT_NEAR(s.value, oracle::vertex_max(P, c), 1e-7);
    EXPECT_NEAR(-maximize(P, -c).value, -oracle::vertex_max(P, -c), 1e-7);
  }
}

TEST(Maximize, UnboundedAndEmpty) {
  Matrix H(1, 1);
  H << -1;
  const Support up = maximize(Polyhedron(H, v1(0)), v1(1));
  EXPECT_EQ(up.status, LpStatus::kUnbounded);
  Matrix E(2, 1);
  E << 1, -1;
  const Support none = maximize(Polyhedron(E, v2(0, -1)), v1(1));
  EXPECT_EQ(none.status, LpStatus::kInfeasible);
}

TEST(MergeParallelRows, KeepsTightestRow) {
  Matrix H(3, 1);
  H << 1, 2, -1;
  const Polyhedron P(H, Vector::Map(std::array{3.0, 4.0, 0.0}.data(), 3));
  const Polyhedron M = merge_parallel_rows(P);
  EXPECT_EQ(M.rows(), 2);
  expect_same_set(M, interval(0, 2));
}

TEST(BoundingBox, AxisAlignedAndGeneral) {
  const Box b = bounding_box(unit_square());
  EXPECT_DOUBLE_EQ(b.upper[1], 1.0);
  Matrix H(3, 2);
  H << -1, 0, 0, -1, 1, 1;
  const Box t = bounding_box(Polyhedron(H, Vector::Map(std::array{0.0, 0.0, 1.0}.data(), 3)));
  EXPECT_NEAR(t.upper[0], 1.0, 1e-9);
  EXPECT_NEAR(t.lower[1], 0.0, 1e-9);
}

}  // namespace
}  // namespace sbf
