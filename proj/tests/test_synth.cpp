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

#include "checks.hpp"
#include "sbf/certificate.hpp"
#include "sbf/cli.hpp"
#include "sbf/error.hpp"
#include "sbf/synth.hpp"

namespace sbf {
namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

// Smallest v with u x + v >= 0 on P for fixed u.
double min_intercept_nonneg(double u, const Polyhedron& P) {
  LpModel m;
  const VarId uv = m.add_variable(u, u);
  const VarId v = m.add_variable(-kInf, kInf);
  m.set_objective(v, 1.0);
  const std::vector<LinearExpr> a{LinearExpr(uv, -1.0)};
  dualize_robust(a, LinearExpr(v, 1.0), P, m);
  const LpSolution s = solve(m);
  EXPECT_TRUE(s.optimal());
  return s.objective;
}

TEST(DualizeRobust, Examples) {
  const Polyhedron sym = Polyhedron::box(v1(-1), v1(1));
  EXPECT_NEAR(min_intercept_nonneg(1.0, sym), 1.0, 1e-9);
  EXPECT_NEAR(min_intercept_nonneg(0.0, sym), 0.0, 1e-9);

  // u x <= M - v on [0, 1] with u = 1, v = 0: smallest M is 1.
  LpModel m;
  const VarId M = m.add_variable(-kInf, kInf);
  m.set_objective(M, 1.0);
  const std::vector<LinearExpr> a{LinearExpr(1.0)};
  const DualizedRows rows =
      dualize_robust(a, LinearExpr(M, 1.0), Polyhedron::box(v1(0), v1(1)), m);
  EXPECT_EQ(rows.num_duals, 2);
  EXPECT_EQ(m.num_constraints(), 2);
  const LpSolution s = solve(m);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective, 1.0, 1e-9);
}

TEST(DualizeRobust, RejectsEmptySet) {
  LpModel m;
  Matrix H(2, 1);
  H << 1, -1;
  Vector h(2);
  h << 0, -1;
  const std::vector<LinearExpr> a{LinearExpr(1.0)};
  EXPECT_THROW(dualize_robust(a, LinearExpr(0.0), Polyhedron(H, h), m), Error);
}

TEST(DualizeRobust, AgreesWithVertexOracle) {
  const check::Tally t = check::dual_oracle(200, 17);
  EXPECT_EQ(t.cases, 200);
  EXPECT_EQ(t.failures, 0) << t.first;
}

TEST(BuildLbp, VariableCountExample) {
  PwaSystem s;
  s.regions = {Polyhedron::whole_space(1)};
  s.dynamics = {AffineMap::identity(1)};
  s.safe_set = Polyhedron::box(v1(-1), v1(1));
  s.initial_set = Polyhedron::box(v1(-0.5), v1(0.5));
  s.horizon = 10;
  const BarrierPartition bp = build_partition(s, GridSpec{{{-3, -1, 1, 3}}});
  const UnsafeDescription u = unsafe_complement(s.safe_set);
  const IndexSets idx = classify_indices(bp, s, u);
  ASSERT_EQ(idx.initial.size(), 1u);
  ASSERT_EQ(idx.unsafe.size(), 2u);
  ASSERT_EQ(idx.safe.size(), 1u);
  const NoiseDataset data = draw_gaussian({v1(0), v1(0.2)}, 5, 3);
  ScenarioRequest req;
  req.eps = 0.1;
  req.N = 5;
  SynthOptions opts;
  opts.prune = false;
  opts.strategy = LbpStrategy::kMonolithic;
  const LbpProblem p = build_lbp(s, bp, u, data, resolve(req, 8), opts);
  EXPECT_EQ(p.model.num_variables(), 56);
  EXPECT_EQ(check::formula_variables(1, 3, idx, 5), 56);
}

TEST(BuildLbp, VariableCountFormulaOnRandomSettings) {
  const check::Tally t = check::variable_count(20, 23);
  EXPECT_EQ(t.failures, 0) << t.first;
}

TEST(BuildLbp, ProvenanceCoversEveryRow) {
  std::mt19937_64 rng(4);
  const check::BoxSetting s = check::random_box_setting(rng);
  const LbpProblem p = build_lbp(s.system, s.partition, s.unsafe, s.data, s.params);
  EXPECT_EQ(static_cast<std::int32_t>(p.row_origin.size()), p.model.num_constraints());
  EXPECT_EQ(p.row_origin.front().family, RowFamily::kNonNegative);
  for (std::size_t r = 1; r < p.row_origin.size(); ++r) {
    EXPECT_LE(static_cast<int>(p.row_origin[r - 1].family),
              static_cast<int>(p.row_origin[r].family));
  }
}

// A setting built from a preset with N samples and the preset's eps.
struct Setting {
  RunConfig cfg;
  BarrierPartition bp;
  ScenarioParams params;
  NoiseDataset data;
};

Setting setting(RunConfig cfg, std::int64_t N) {
  Setting s;
  cfg.scenario.N = N;
  cfg.scenario.beta.reset();
  s.bp = make_partition(cfg);
  s.params = resolve_scenario(cfg, s.bp.size() * (cfg.system.dim() + 1) + 2);
  s.data = load_noise(cfg, N, cfg.seed);
  s.cfg = std::move(cfg);
  return s;
}

SynthesisResult run(const Setting& s, SynthOptions opts) {
  return synthesize(s.cfg.system, s.bp, s.cfg.unsafe, s.data, s.params, opts);
}

RunConfig small_noise_martingale() {
  RunConfig cfg = preset("martingale");
  cfg.noise.gaussian->sigma = Vector::Constant(1, 0.01);
  return cfg;
}

TEST(SolveLbp, ObjectiveAndAudit) {
  const Setting s = setting(small_noise_martingale(), 300);
  const SynthesisResult r = run(s, s.cfg.synth);
  ASSERT_TRUE(r.optimal()) << r.diagnostic;
  EXPECT_NEAR(r.objective, r.gamma + r.c * s.cfg.system.horizon, 1e-9);
  EXPECT_GE(r.gamma, 0.0);
  EXPECT_LE(r.gamma, s.params.M + 1e-9);
  EXPECT_GE(r.c, 0.0);
  EXPECT_LE(r.max_violation, 1e-6);
  EXPECT_LT(r.objective, 1.0);
}

TEST(SolveLbp, RowGenerationMatchesMonolithic) {
  for (const Setting& s : {setting(small_noise_martingale(), 400),
                           setting(preset("vehicle", 18), 300)}) {
    SynthOptions mono = s.cfg.synth;
    mono.strategy = LbpStrategy::kMonolithic;
    SynthOptions rowgen = s.cfg.synth;
    rowgen.strategy = LbpStrategy::kRowGeneration;
    const SynthesisResult a = run(s, mono);
    const SynthesisResult b = run(s, rowgen);
    ASSERT_TRUE(a.optimal() && b.optimal()) << s.cfg.name;
    EXPECT_TRUE(b.row_generation);
    EXPECT_NEAR(a.objective, b.objective, 1e-7) << s.cfg.name;
    EXPECT_LE(b.max_block_violation, 1e-7);
  }
}

TEST(SolveLbp, PruningIsNeutral) {
  const Setting s = setting(small_noise_martingale(), 150);
  SynthOptions on = s.cfg.synth;
  on.strategy = LbpStrategy::kMonolithic;
  SynthOptions off = on;
  off.prune = false;
  const SynthesisResult a = run(s, on);
  const SynthesisResult b = run(s, off);
  EXPECT_EQ(a.status, b.status);
  EXPECT_NEAR(a.objective, b.objective, 1e-9);
  EXPECT_GT(b.counts.martingale_blocks, a.counts.martingale_blocks);
}

TEST(SolveLbp, MoreDataNeverLowersTheObjective) {
  const Setting full = setting(small_noise_martingale(), 1600);
  double prev = -1.0;
  for (std::int64_t N : {100, 400, 1600}) {
    NoiseDataset prefix;
    prefix.samples.assign(full.data.samples.begin(), full.data.samples.begin() + N);
    ScenarioParams params = full.params;
    params.N = N;
    const SynthesisResult r = synthesize(full.cfg.system, full.bp, full.cfg.unsafe, prefix,
                                         params, full.cfg.synth);
    ASSERT_TRUE(r.optimal());
    EXPECT_GE(r.objective, prev - 1e-9) << N;
    prev = r.objective;
  }
}

TEST(SolveLbp, BarrierHoldsOnSampledStates) {
  const Setting s = setting(small_noise_martingale(), 200);
  const SynthesisResult r = run(s, s.cfg.synth);
  ASSERT_TRUE(r.optimal());
  const PwaSystem& sys = s.cfg.system;
  const IndexSets idx = classify_indices(s.bp, sys, s.cfg.unsafe);
  const double tol = 1e-6;
  const double M = s.params.M;
  std::mt19937_64 rng(9);
  const Box clip{v1(-4), v1(4)};
  auto B = [&](const Vector& x) { return eval_barrier(r.theta, s.bp.pieces, x); };
  for (int i = 0; i < s.bp.size(); ++i) {
    for (const Vector& x : sample_uniform(s.bp.pieces[i], 200, rng, clip)) {
      EXPECT_GE(B(x), -tol);
      EXPECT_LE(B(x), M + tol);
    }
  }
  for (const Vector& x : sample_uniform(sys.initial_set, 500, rng)) EXPECT_LE(B(x), r.gamma + tol);
  for (const Polyhedron& u : s.cfg.unsafe.pieces) {
    for (int i : idx.unsafe) {
      const Polyhedron set = intersect(s.bp.pieces[i], u);
      if (is_empty(set)) continue;
      for (const Vector& x : sample_uniform(set, 200, rng, clip)) EXPECT_GE(B(x), 1.0 - tol);
    }
  }
  for (int i : idx.safe) {
    const Polyhedron set = intersect(s.bp.pieces[i], sys.safe_set);
    for (const Vector& x : sample_uniform(set, 1000, rng, clip)) {
      const Vector fx = sys.dynamics[s.bp.parent[i]](x);
      const double rhs = B(x) + r.c + tol;
      for (const Vector& eta : s.data.samples) {
        ASSERT_LE(B(fx + eta) + s.params.delta, rhs);
      }
    }
  }
}

TEST(SolveLbp, SinglePieceInitialAndSafe) {
  PwaSystem s;
  s.regions = {Polyhedron::whole_space(1)};
  s.dynamics = {AffineMap::identity(1)};
  s.safe_set = Polyhedron::box(v1(-1), v1(1));
  s.initial_set = Polyhedron::box(v1(-0.5), v1(0.5));
  s.horizon = 10;
  const BarrierPartition bp = build_partition(s, GridSpec{{{-1, 1}}});
  NoiseDataset zero;
  zero.samples.assign(20, v1(0));
  ScenarioRequest req;
  req.eps = 0.01;
  req.N = 20;
  const ScenarioParams params = resolve(req, 4);
  const SynthesisResult r = synthesize(s, bp, unsafe_complement(s.safe_set), zero, params);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.gamma, 0.0, 1e-9);
  EXPECT_NEAR(r.c, params.delta, 1e-9);
  EXPECT_NEAR(r.objective, 10 * params.delta, 1e-8);
  EXPECT_LT(r.objective, 1.0);
}

TEST(SolveLbp, ZeroNoiseMartingaleIsAuditable) {
  Setting s = setting(preset("martingale"), 50);
  for (Vector& eta : s.data.samples) eta.setZero();
  const SynthesisResult r = run(s, s.cfg.synth);
  ASSERT_TRUE(r.optimal());
  EXPECT_GE(r.objective, 0.0);
  EXPECT_LE(r.max_violation, 1e-6);
}

TEST(BuildLbp, RejectsInconsistentParameters) {
  Setting s = setting(preset("martingale"), 20);
  ScenarioParams low_m = s.params;
  low_m.M = 0.5;
  EXPECT_THROW(run({s.cfg, s.bp, low_m, s.data}, s.cfg.synth), Error);
  ScenarioParams wrong_n = s.params;
  wrong_n.N = 21;
  EXPECT_THROW(run({s.cfg, s.bp, wrong_n, s.data}, s.cfg.synth), Error);
}

TEST(BuildLbp, VehiclePruningDropsPairs) {
  const Setting s = setting(preset("vehicle", 18), 200);
  SynthOptions opts = s.cfg.synth;
  opts.strategy = LbpStrategy::kMonolithic;
  const LbpProblem p = build_lbp(s.cfg.system, s.bp, s.cfg.unsafe, s.data, s.params, opts);
  EXPECT_GT(p.counts.nonempty_blocks, 0);
  EXPECT_LT(p.counts.nonempty_blocks, p.counts.candidate_pairs);
  EXPECT_EQ(p.counts.candidate_pairs, 200 * p.counts.safe * p.counts.pieces);
}

}  // namespace
}  // namespace sbf
