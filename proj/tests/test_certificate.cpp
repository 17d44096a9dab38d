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

#include <sstream>

#include "sbf/certificate.hpp"
#include "sbf/cli.hpp"
#include "sbf/error.hpp"

namespace sbf {
namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

TEST(EvalBarrier, InteriorOutsideAndFacet) {
  const std::vector<Polyhedron> pieces{Polyhedron::box(v1(0), v1(1)),
                                       Polyhedron::box(v1(1), v1(2))};
  BarrierTheta theta{Matrix(2, 1), Vector(2)};
  theta.slopes << 1.0, -1.0;
  theta.intercepts << 0.0, 3.0;
  EXPECT_DOUBLE_EQ(eval_barrier(theta, pieces, v1(0.25)), 0.25);
  EXPECT_DOUBLE_EQ(eval_barrier(theta, pieces, v1(1.5)), 1.5);
  EXPECT_DOUBLE_EQ(eval_barrier(theta, pieces, v1(5.0)), 0.0);
  theta.intercepts[1] = 2.5;  // values 1 and 1.5 at the shared facet
  EXPECT_DOUBLE_EQ(eval_barrier(theta, pieces, v1(1.0)), 1.5);
}

TEST(SafetyBound, Examples) {
  EXPECT_NEAR(safety_bound(0.1, 0.02, 10), 0.7, 1e-15);
  EXPECT_DOUBLE_EQ(safety_bound(0.0, 0.0, 5), 1.0);
  EXPECT_DOUBLE_EQ(safety_bound(0.9, 0.05, 10), 0.0);
}

TEST(SafetyBound, Monotone) {
  for (double g = 0.0; g < 1.0; g += 0.1) {
    for (double c = 0.0; c < 0.1; c += 0.01) {
      EXPECT_GE(safety_bound(g, c, 10), safety_bound(g + 0.05, c, 10));
      EXPECT_GE(safety_bound(g, c, 10), safety_bound(g, c + 0.005, 10));
      EXPECT_GE(safety_bound(g, c, 10), safety_bound(g, c, 11));
    }
  }
}

// Seven pieces on the line; B is 0.2 on [-0.5, 0.5], rises with slope 0.4
// to 1 at |x| = 2.5 and is 1 beyond. Noise takes the values 0 and 0.3.
struct HandCase {
  PwaSystem system;
  BarrierPartition partition;
  UnsafeDescription unsafe;
  NoiseDataset data;
  Certificate cert;
};

HandCase hand_case(double c) {
  HandCase h;
  h.system.regions = {Polyhedron::whole_space(1)};
  h.system.dynamics = {AffineMap::identity(1)};
  h.system.initial_set = Polyhedron::box(v1(-0.5), v1(0.5));
  h.system.safe_set = Polyhedron::box(v1(-2.5), v1(2.5));
  h.system.horizon = 10;
  const double inf = kInf;
  h.partition =
      build_partition(h.system, GridSpec{{{-inf, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, inf}}});
  h.unsafe = unsafe_complement(h.system.safe_set);
  for (int k = 0; k < 50; ++k) {
    h.data.samples.push_back(v1(0.0));
    h.data.samples.push_back(v1(0.3));
  }
  BarrierTheta theta{Matrix(7, 1), Vector(7)};
  theta.slopes << 0, -0.4, -0.4, 0, 0.4, 0.4, 0;
  theta.intercepts << 1, 0, 0, 0.2, 0, 0, 1;
  ScenarioRequest req;
  req.eps = 0.1;
  req.N = 100;
  Certificate& cert = h.cert;
  cert.pieces = h.partition.pieces;
  cert.parent = h.partition.parent;
  cert.theta = theta;
  cert.gamma = 0.2;
  cert.c = c;
  cert.horizon = 10;
  cert.scenario = resolve(req, 16);
  cert.objective = cert.gamma + cert.c * cert.horizon;
  cert.safety_lower_bound = safety_bound(cert.gamma, cert.c, cert.horizon);
  cert.fingerprint = fingerprint(h.system, h.partition.pieces, h.data);
  return h;
}

TEST(VerifyCertificate, HandBuiltBarrierWorstCases) {
  const double delta = 0.1 / 0.9;
  const HandCase h = hand_case(0.12 + delta);
  ASSERT_EQ(consistency_error(h.cert), "");
  const VerificationReport r = verify_certificate(h.cert, h.system, h.unsafe, h.data);
  EXPECT_TRUE(r.passed) << r.failure;
  EXPECT_NEAR(r.family(RowFamily::kNonNegative).worst, -0.2, 1e-7);
  EXPECT_NEAR(r.family(RowFamily::kUpperBound).worst, 0.0, 1e-7);
  EXPECT_NEAR(r.family(RowFamily::kInitial).worst, 0.0, 1e-7);
  EXPECT_NEAR(r.family(RowFamily::kUnsafe).worst, 0.0, 1e-7);
  EXPECT_NEAR(r.family(RowFamily::kMartingale).worst, 0.0, 1e-7);

  VerifyOptions exact;
  exact.exact_geometry = true;
  const VerificationReport e = verify_certificate(h.cert, h.system, h.unsafe, h.data, exact);
  for (int f = 0; f < 5; ++f) EXPECT_NEAR(e.families[f].worst, r.families[f].worst, 1e-7);

  const HandCase low = hand_case(0.11 + delta);
  const VerificationReport bad = verify_certificate(low.cert, low.system, low.unsafe, low.data);
  EXPECT_FALSE(bad.passed);
  EXPECT_NEAR(bad.family(RowFamily::kMartingale).worst, 0.01, 1e-7);
  EXPECT_EQ(bad.family(RowFamily::kMartingale).at.sample % 2, 1);
}

TEST(VerifyCertificate, FingerprintMismatchThrows) {
  HandCase h = hand_case(0.3);
  h.data.samples[0] = v1(0.01);
  EXPECT_THROW(verify_certificate(h.cert, h.system, h.unsafe, h.data), DomainError);
}

// A synthesized certificate on the small-noise martingale.
struct Synthesized {
  RunConfig cfg;
  SynthRun run;
  NoiseDataset data;
};

Synthesized synthesized(std::int64_t N) {
  Synthesized s;
  s.cfg = preset("martingale");
  s.cfg.noise.gaussian->sigma = v1(0.01);
  s.cfg.scenario.N = N;
  s.cfg.scenario.beta.reset();
  std::ostringstream log;
  s.run = run_synth(s.cfg, RunOptions{}, log);
  s.data = load_noise(s.cfg, N, s.cfg.seed);
  return s;
}

TEST(VerifyCertificate, SynthesizedCertificatePassesAndPerturbationFails) {
  const Synthesized s = synthesized(2000);
  ASSERT_EQ(s.run.exit_code, kExitOk) << s.run.message;
  ASSERT_TRUE(s.run.certificate.has_value());
  const VerificationReport ok =
      verify_certificate(*s.run.certificate, s.cfg.system, s.cfg.unsafe, s.data);
  EXPECT_TRUE(ok.passed) << ok.failure;

  Certificate lowered = *s.run.certificate;
  lowered.c -= 0.1;
  lowered.objective = lowered.gamma + lowered.c * lowered.horizon;
  lowered.safety_lower_bound = safety_bound(lowered.gamma, lowered.c, lowered.horizon);
  const VerificationReport bad = verify_certificate(lowered, s.cfg.system, s.cfg.unsafe, s.data);
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.family(RowFamily::kMartingale).worst, 1e-6);
}

TEST(Certificate, JsonRoundTripIsByteIdentical) {
  const Synthesized s = synthesized(500);
  ASSERT_TRUE(s.run.certificate.has_value());
  std::ostringstream first;
  write_certificate(first, *s.run.certificate);
  std::istringstream in(first.str());
  const Certificate back = read_certificate(in);
  std::ostringstream second;
  write_certificate(second, back);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(back.fingerprint, s.run.certificate->fingerprint);
  EXPECT_EQ(back.fingerprint, fingerprint(s.cfg.system, back.pieces, s.data));
  EXPECT_EQ(consistency_error(back), "");
}

TEST(Certificate, InflatedBoundIsInconsistent) {
  HandCase h = hand_case(0.01);
  ASSERT_EQ(consistency_error(h.cert), "");
  h.cert.safety_lower_bound += 0.2;
  EXPECT_NE(consistency_error(h.cert), "");
  HandCase g = hand_case(0.01);
  g.cert.scenario.beta *= 0.5;
  EXPECT_NE(consistency_error(g.cert), "");
}

TEST(InnerApprox, TwoPointBoundary) {
  const double eps = 0.1, M = 1.0;
  const double delta = eps * M / (1 - eps);
  const std::vector<double> g{0.0, M};
  const std::vector<double> p{1 - eps, eps};
  // E[g] = eps M and g + delta <= h holds with probability 1 - eps.
  EXPECT_TRUE(inner_approx_holds(g, p, delta, eps, M));
  EXPECT_TRUE(inner_approx_holds(g, p, eps * M, eps, M));
  const std::vector<double> g0{0.3, 0.3};
  EXPECT_TRUE(inner_approx_holds(g0, p, 0.3, 0.0, M));
}

TEST(InnerApprox, NoCounterexamples) {
  const InnerApproxReport r = inner_approx_oracle(500, 42);
  EXPECT_EQ(r.cases, 500);
  EXPECT_GT(r.premise_held, 0);
  EXPECT_EQ(r.counterexamples, 0) << r.first_counterexample;
}

}  // namespace
}  // namespace sbf
