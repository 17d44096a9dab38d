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
#include "sbf/sim.hpp"

namespace sbf {
namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

PwaSystem line(const AffineMap& f) {
  PwaSystem s;
  s.regions = {Polyhedron::whole_space(1)};
  s.dynamics = {f};
  s.initial_set = Polyhedron::box(v1(-0.5), v1(0.5));
  s.safe_set = Polyhedron::box(v1(-2.5), v1(2.5));
  s.horizon = 10;
  return s;
}

NoiseDataset zero_pool() {
  NoiseDataset d;
  d.samples.push_back(v1(0.0));
  return d;
}

TEST(ClopperPearson, ClosedForms) {
  const SafetyEstimate all = clopper_pearson(100, 100);
  EXPECT_DOUBLE_EQ(all.estimate, 1.0);
  EXPECT_NEAR(all.lower, std::pow(0.025, 1.0 / 100.0), 1e-9);
  EXPECT_NEAR(all.lower, 0.9638, 1e-4);
  EXPECT_DOUBLE_EQ(all.upper, 1.0);
  const SafetyEstimate none = clopper_pearson(0, 100);
  EXPECT_DOUBLE_EQ(none.estimate, 0.0);
  EXPECT_DOUBLE_EQ(none.lower, 0.0);
  EXPECT_NEAR(none.upper, 1.0 - std::pow(0.025, 1.0 / 100.0), 1e-9);
  const SafetyEstimate half = clopper_pearson(50, 100);
  EXPECT_DOUBLE_EQ(half.estimate, 0.5);
  EXPECT_NEAR(half.lower, 0.398, 1e-3);
  EXPECT_NEAR(half.upper, 0.602, 1e-3);
}

TEST(Simulate, ZeroNoiseIdentityIsSafe) {
  const PwaSystem s = line(AffineMap::identity(1));
  const NoiseDataset pool = zero_pool();
  SimOptions o;
  o.strategy = StartStrategy::kGrid;
  o.grid_per_axis = 3;
  o.trials = 50;
  o.horizon = 10;
  const TrajectoryBatch b = simulate(s, {std::nullopt, &pool}, o);
  EXPECT_EQ(b.size(), 150);
  EXPECT_EQ(b.starts.size(), 3u);
  const SimSummary sum = summarize(b);
  EXPECT_DOUBLE_EQ(sum.min_safety, 1.0);
  EXPECT_DOUBLE_EQ(empirical_safety(b).estimate, 1.0);
}

TEST(Simulate, ShiftLeavesAtStepThree) {
  const PwaSystem s = line(AffineMap(Matrix::Identity(1, 1), v1(1.0)));
  const NoiseDataset pool = zero_pool();
  SimOptions o;
  o.strategy = StartStrategy::kFixed;
  o.starts = {v1(0.0)};
  o.trials = 20;
  o.horizon = 10;
  const TrajectoryBatch b = simulate(s, {std::nullopt, &pool}, o);
  for (std::int64_t t = 0; t < b.size(); ++t) {
    EXPECT_EQ(b.safe[t], 0);
    EXPECT_EQ(b.exit_time[t], 3);
  }
  EXPECT_DOUBLE_EQ(empirical_safety(b).estimate, 0.0);
}

TEST(Simulate, ReproducibleAndThreadIndependent) {
  const PwaSystem s = line(AffineMap::identity(1));
  SimOptions o;
  o.strategy = StartStrategy::kUniform;
  o.trials = 2000;
  o.horizon = 10;
  o.seed = 77;
  o.record_noise = true;
  const NoiseSource g{GaussianNoise{v1(0), v1(0.5)}, nullptr};
  o.threads = 1;
  const TrajectoryBatch a = simulate(s, g, o);
  o.threads = 3;
  const TrajectoryBatch b = simulate(s, g, o);
  EXPECT_EQ(a.safe, b.safe);
  EXPECT_EQ(a.exit_time, b.exit_time);
  ASSERT_EQ(a.noise.size(), b.noise.size());
  for (std::size_t k = 0; k < a.noise.size(); ++k) EXPECT_EQ(a.noise[k], b.noise[k]);
  for (const Vector& x : a.initial_states) EXPECT_TRUE(s.initial_set.contains_point(x));
  o.seed = 78;
  EXPECT_NE(simulate(s, g, o).exit_time, a.exit_time);
}

TEST(Simulate, OutcomeMatchesRecordedNoise) {
  const PwaSystem s = line(AffineMap::identity(1));
  SimOptions o;
  o.strategy = StartStrategy::kUniform;
  o.trials = 300;
  o.horizon = 10;
  o.seed = 5;
  o.record_noise = true;
  const TrajectoryBatch b = simulate(s, {GaussianNoise{v1(0), v1(0.6)}, nullptr}, o);
  for (std::int64_t t = 0; t < b.size(); ++t) {
    double x = b.initial_states[t][0];
    int exit = std::abs(x) > 2.5 ? 0 : -1;
    for (int k = 0; k < 10 && exit < 0; ++k) {
      x += b.noise[t][k];
      if (std::abs(x) > 2.5) exit = k + 1;
    }
    EXPECT_EQ(b.exit_time[t], exit);
    EXPECT_EQ(b.safe[t], exit < 0 ? 1 : 0);
  }
}

TEST(Simulate, UncoveredStateThrows) {
  PwaSystem s = line(AffineMap::identity(1));
  s.regions = {Polyhedron::box(v1(-1), v1(1))};
  const NoiseDataset pool = [] {
    NoiseDataset d;
    d.samples.push_back(v1(1.5));
    return d;
  }();
  SimOptions o;
  o.strategy = StartStrategy::kFixed;
  o.starts = {v1(0.0)};
  o.trials = 1;
  o.horizon = 3;
  EXPECT_THROW(simulate(s, {std::nullopt, &pool}, o), DomainError);
}

TEST(Soundness, MarginArithmetic) {
  SimSummary sum;
  sum.per_start = {clopper_pearson(990, 1000), clopper_pearson(900, 1000)};
  sum.worst_start = 1;
  sum.min_safety = 0.9;
  const SoundnessCheck ok = soundness(sum, 0.05, 0.005, 10);
  EXPECT_NEAR(ok.unsafe_fraction, 0.1, 1e-12);
  EXPECT_NEAR(ok.bound, 0.1, 1e-12);
  EXPECT_NEAR(ok.margin, 3 * std::sqrt(0.1 * 0.9 / 1000), 1e-12);
  EXPECT_TRUE(ok.passed);
  EXPECT_FALSE(soundness(sum, 0.0, 0.001, 10).passed);
}

TEST(Trajectories, CsvHasOneRowPerTrajectory) {
  const PwaSystem s = line(AffineMap::identity(1));
  const NoiseDataset pool = zero_pool();
  SimOptions o;
  o.strategy = StartStrategy::kFixed;
  o.starts = {v1(0.0), v1(0.25)};
  o.trials = 4;
  o.horizon = 2;
  std::ostringstream os;
  write_trajectories_csv(os, simulate(s, {std::nullopt, &pool}, o));
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) rows += (!line.empty() && line[0] != '#') ? 1 : 0;
  EXPECT_EQ(rows, 1 + 8);
}

}  // namespace
}  // namespace sbf
