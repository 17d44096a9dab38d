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

// Randomized checks shared by the unit tests and the acceptance binary.

#ifndef SBF_TESTS_CHECKS_HPP_
#define SBF_TESTS_CHECKS_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sbf/lp.hpp"
#include "sbf/noise.hpp"
#include "sbf/scenario.hpp"
#include "sbf/synth.hpp"
#include "sbf/system.hpp"

namespace sbf::check {

struct Tally {
  int cases = 0;
  int failures = 0;
  std::string first;

  void fail(const std::string& what) {
    if (failures++ == 0) first = what;
  }
};

// Robust constraint c.x <= b over a random bounded polytope, with c and b
// held in fixed-bound variables. The dualized rows must be feasible exactly
// when the vertex maximum is at most b, and minimizing b must recover it.
inline Tally dual_oracle(int cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> gap(-6.0, 0.0);
  Tally t;
  for (int k = 0; k < cases; ++k) {
    const int n = 1 + k % 2;
    const int rows = 2 * n + static_cast<int>(rng() % (7 - 2 * n));
    const Polyhedron P = oracle::random_polytope(n, rows, rng);
    Vector c(n);
    for (int r = 0; r < n; ++r) c[r] = unit(rng);
    const double truth = oracle::vertex_max(P, c);
    const double offset = (k % 4 < 2 ? 1.0 : -1.0) * std::pow(10.0, gap(rng));
    const double b = truth + offset;

    LpModel m;
    std::vector<LinearExpr> a;
    for (int r = 0; r < n; ++r) a.emplace_back(m.add_variable(c[r], c[r]), 1.0);
    const VarId bv = m.add_variable(b, b);
    dualize_robust(a, LinearExpr(bv, 1.0), P, m);
    const LpSolution feas = solve(m);
    const bool dual_ok = feas.optimal();
    const bool oracle_ok = truth <= b;

    LpModel opt;
    std::vector<LinearExpr> a2;
    for (int r = 0; r < n; ++r) a2.emplace_back(opt.add_variable(c[r], c[r]), 1.0);
    const VarId v = opt.add_variable(-kInf, kInf);
    opt.set_objective(v, 1.0);
    dualize_robust(a2, LinearExpr(v, 1.0), P, opt);
    const LpSolution best = solve(opt);

    ++t.cases;
    if (dual_ok != oracle_ok || !best.optimal() || std::abs(best.objective - truth) > 1e-7) {
      std::ostringstream os;
      os << "case " << k << ": n=" << n << " rows=" << rows << " truth=" << truth
         << " b=" << b << " dual_feasible=" << dual_ok
         << " dual_min=" << (best.optimal() ? best.objective : std::nan(""));
      t.fail(os.str());
    }
  }
  return t;
}

// Random axis-aligned setting with every polyhedron a box of 2n rows. The
// safe set is a strip in x1 so each piece meets at most one unsafe half-space.
struct BoxSetting {
  PwaSystem system;
  BarrierPartition partition;
  UnsafeDescription unsafe;
  NoiseDataset data;
  ScenarioParams params;
};

inline BoxSetting random_box_setting(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 1 + static_cast<int>(rng() % 2);
  BoxSetting s;
  Matrix A = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) A(k, k) = (unit(rng) < 0.2 ? -1.0 : 1.0) * (0.5 + unit(rng));
  Vector b(n);
  for (int k = 0; k < n; ++k) b[k] = 0.5 * (unit(rng) - 0.5);
  s.system.regions = {Polyhedron::whole_space(n)};
  s.system.dynamics = {AffineMap(A, b)};
  Vector lo = Vector::Constant(n, -kInf), hi = Vector::Constant(n, kInf);
  lo[0] = -2.0;
  hi[0] = 2.0;
  s.system.safe_set = Polyhedron::box(lo, hi);
  s.system.initial_set = Polyhedron::box(Vector::Constant(n, -0.5), Vector::Constant(n, 0.5));
  s.system.horizon = 1 + static_cast<int>(rng() % 10);

  GridSpec grid;
  for (int k = 0; k < n; ++k) {
    std::vector<double> cuts{-3.0 - unit(rng), 0.0, 3.0 + unit(rng)};
    const int extra = static_cast<int>(rng() % 3);
    for (int e = 0; e < extra; ++e) cuts.push_back(-2.9 + 5.8 * unit(rng));
    std::sort(cuts.begin(), cuts.end());
    grid.breakpoints.push_back(cuts);
  }
  s.partition = build_partition(s.system, grid);
  s.unsafe = unsafe_complement(s.system.safe_set);
  const GaussianNoise g{Vector::Zero(n), Vector::Constant(n, 0.3)};
  const std::int64_t N = 1 + static_cast<std::int64_t>(rng() % 5);
  s.data = draw_gaussian(g, N, rng());
  const std::int64_t d = s.partition.size() * (n + 1) + 2;
  ScenarioRequest req;
  req.eps = 0.1;
  req.N = N;
  s.params = resolve(req, d);
  return s;
}

// 2 + (n+1) l + m (2 l + |I_0| + |I_u| + N |I_s| l) with m = 2n.
inline std::int64_t formula_variables(int n, std::int64_t l, const IndexSets& idx,
                                      std::int64_t N) {
  const std::int64_t m = 2 * n;
  const auto i0 = static_cast<std::int64_t>(idx.initial.size());
  const auto iu = static_cast<std::int64_t>(idx.unsafe.size());
  const auto is = static_cast<std::int64_t>(idx.safe.size());
  return 2 + (n + 1) * l + m * (2 * l + i0 + iu + N * is * l);
}

inline Tally variable_count(int configs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tally t;
  SynthOptions opts;
  opts.prune = false;
  opts.strategy = LbpStrategy::kMonolithic;
  for (int k = 0; k < configs; ++k) {
    const BoxSetting s = random_box_setting(rng);
    const LbpProblem p = build_lbp(s.system, s.partition, s.unsafe, s.data, s.params, opts);
    const IndexSets idx = classify_indices(s.partition, s.system, s.unsafe);
    const std::int64_t want =
        formula_variables(s.system.dim(), s.partition.size(), idx, s.data.size());
    ++t.cases;
    if (p.model.num_variables() != want) {
      std::ostringstream os;
      os << "config " << k << ": n=" << s.system.dim() << " pieces=" << s.partition.size()
         << " N=" << s.data.size() << " built=" << p.model.num_variables()
         << " formula=" << want;
      t.fail(os.str());
    }
  }
  return t;
}

}  // namespace sbf::check

#endif  // SBF_TESTS_CHECKS_HPP_
