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

// Reference computations for the tests. They share no code with the library
// beyond the Polyhedron container.

#ifndef SBF_TESTS_ORACLES_HPP_
#define SBF_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "sbf/polytope.hpp"

namespace sbf::oracle {

using Rational = boost::multiprecision::cpp_rational;

// The double x as an exact rational.
inline Rational exact(double x) {
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  Rational r(scaled);
  const int shift = exponent - 53;
  boost::multiprecision::cpp_int two_pow = 1;
  two_pow <<= std::abs(shift);
  return shift >= 0 ? r * Rational(two_pow) : r / Rational(two_pow);
}

// Exact tails sum_{i < d} C(N, i) eps^i (1 - eps)^(N - i) for d = 0..N+1.
inline std::vector<double> binomial_tails(std::int64_t N, double eps) {
  const Rational p = exact(eps);
  const Rational q = Rational(1) - p;
  std::vector<Rational> p_pow(N + 1, Rational(1)), q_pow(N + 1, Rational(1));
  for (std::int64_t k = 1; k <= N; ++k) {
    p_pow[k] = p_pow[k - 1] * p;
    q_pow[k] = q_pow[k - 1] * q;
  }
  std::vector<double> out{0.0};
  Rational sum = 0;
  boost::multiprecision::cpp_int choose = 1;
  for (std::int64_t i = 0; i <= N; ++i) {
    sum += Rational(choose) * p_pow[i] * q_pow[N - i];
    out.push_back(static_cast<double>(sum));
    choose = choose * (N - i) / (i + 1);
  }
  return out;
}

inline double binomial_tail(std::int64_t N, double eps, std::int64_t d) {
  return binomial_tails(N, eps)[std::min(d, N + 1)];
}

// Every point where n linearly independent rows are active and all rows
// hold, deduplicated.
inline std::vector<Vector> enumerate_vertices(const Polyhedron& P, double tol = 1e-9) {
  const int n = P.dim();
  const int m = P.rows();
  std::vector<Vector> out;
  std::vector<int> pick(n);
  for (int k = 0; k < n; ++k) pick[k] = k;
  if (m < n) return out;
  while (true) {
    Matrix A(n, n);
    Vector b(n);
    for (int k = 0; k < n; ++k) {
      A.row(k) = P.H().row(pick[k]);
      b[k] = P.h()[pick[k]];
    }
    Eigen::FullPivLU<Matrix> lu(A);
    if (lu.rank() == n) {
      const Vector x = lu.solve(b);
      const bool feasible = ((P.H() * x - P.h()).array() <= tol).all();
      const bool fresh = std::none_of(out.begin(), out.end(), [&](const Vector& y) {
        return (y - x).cwiseAbs().maxCoeff() <= tol;
      });
      if (feasible && fresh) out.push_back(x);
    }
    int k = n - 1;
    while (k >= 0 && pick[k] == m - n + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int r = k + 1; r < n; ++r) pick[r] = pick[r - 1] + 1;
  }
  return out;
}

// max of c.x over a bounded polytope by vertex enumeration; -inf if empty.
inline double vertex_max(const Polyhedron& P, const Vector& c) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& v : enumerate_vertices(P)) best = std::max(best, c.dot(v));
  return best;
}

// A bounded polytope with `rows` rows (at least 2n) around a random center:
// a box plus random cuts that keep the center strictly inside.
inline Polyhedron random_polytope(int n, int rows, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 1.5);
  Vector center(n);
  for (int k = 0; k < n; ++k) center[k] = 2.0 * unit(rng);
  Matrix H(rows, n);
  Vector h(rows);
  for (int k = 0; k < n; ++k) {
    H.row(2 * k).setZero();
    H(2 * k, k) = 1.0;
    h[2 * k] = center[k] + pos(rng);
    H.row(2 * k + 1).setZero();
    H(2 * k + 1, k) = -1.0;
    h[2 * k + 1] = -center[k] + pos(rng);
  }
  for (int r = 2 * n; r < rows; ++r) {
    Vector a(n);
    for (int k = 0; k < n; ++k) a[k] = unit(rng);
    if (a.norm() < 1e-3) a[0] = 1.0;
    H.row(r) = a.transpose();
    h[r] = a.dot(center) + 0.3 * pos(rng);
  }
  return Polyhedron(H, h);
}

// An axis-aligned box with corners drawn from [-span, span].
inline Polyhedron random_box(int n, double span, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-span, span);
  Vector lo(n), hi(n);
  for (int k = 0; k < n; ++k) {
    const double a = unit(rng);
    const double b = unit(rng);
    lo[k] = std::min(a, b);
    hi[k] = std::max(a, b) + 1e-3;
  }
  return Polyhedron::box(lo, hi);
}

}  // namespace sbf::oracle

#endif  // SBF_TESTS_ORACLES_HPP_
