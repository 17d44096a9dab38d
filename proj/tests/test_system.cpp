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

#include "sbf/cli.hpp"
#include "sbf/error.hpp"
#include "sbf/system.hpp"

namespace sbf {
namespace {

Vector v1(double a) { return Vector::Constant(1, a); }
Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

PwaSystem line_system(double x0, double xs) {
  PwaSystem s;
  s.regions = {Polyhedron::whole_space(1)};
  s.dynamics = {AffineMap::identity(1)};
  s.initial_set = Polyhedron::box(v1(-x0), v1(x0));
  s.safe_set = Polyhedron::box(v1(-xs), v1(xs));
  s.horizon = 10;
  return s;
}

TEST(BuildPartition, ThreeIntervalPieces) {
  const PwaSystem s = line_system(0.5, 2.5);
  const BarrierPartition bp = build_partition(s, GridSpec{{{-2.5, -0.5, 0.5, 2.5}}});
  EXPECT_EQ(bp.size(), 3);
  for (int p : bp.parent) EXPECT_EQ(p, 0);
}

TEST(BuildPartition, VehicleGridIsAligned) {
  const RunConfig cfg = preset("vehicle", 18);
  GridSpec grid{{{0, 40, 80, 100, 120, 160, 200}, {-2, 0, 2}}};
  const BarrierPartition bp = build_partition(cfg.system, grid);
  EXPECT_EQ(bp.size(), 12);
  for (int i = 0; i < bp.size(); ++i) {
    const Box b = bounding_box(bp.pieces[i]);
    const double mid = 0.5 * (b.lower[0] + b.upper[0]);
    EXPECT_EQ(bp.parent[i], mid < 80 ? 0 : (mid < 120 ? 1 : 2));
  }
}

TEST(BuildPartition, MisalignedGridFails) {
  const RunConfig cfg = preset("vehicle", 18);
  GridSpec grid{{{0, 100, 200}, {-2, 2}}};
  EXPECT_THROW(build_partition(cfg.system, grid), PartitionError);
}

TEST(BuildPartition, SplitModeCutsAlongRegions) {
  const RunConfig cfg = preset("vehicle", 18);
  GridSpec grid{{{0, 100, 200}, {-2, 2}}};
  PartitionOptions opts;
  opts.split_along_regions = true;
  const BarrierPartition bp = build_partition(cfg.system, grid, opts);
  EXPECT_EQ(bp.size(), 4);  // [0,80], [80,100], [100,120], [120,200]
  for (int i = 0; i < bp.size(); ++i) {
    EXPECT_TRUE(contains(cfg.system.regions[bp.parent[i]], bp.pieces[i]));
  }
}

TEST(ClassifyIndices, MartingaleLayout) {
  const PwaSystem s = line_system(0.5, 2.5);
  const BarrierPartition bp =
      build_partition(s, GridSpec{{{-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5}}});
  const IndexSets idx = classify_indices(bp, s, unsafe_complement(s.safe_set));
  EXPECT_EQ(idx.initial, (std::vector<int>{3}));
  EXPECT_EQ(idx.unsafe, (std::vector<int>{0, 6}));
  EXPECT_EQ(idx.safe, (std::vector<int>{1, 2, 3, 4, 5}));
}

TEST(ClassifyIndices, StraddlingPieceIsSafeAndUnsafe) {
  const PwaSystem s = line_system(0.5, 2.5);
  const BarrierPartition bp = build_partition(s, GridSpec{{{-2.0, 1.0, 3.0}}});
  const IndexSets idx = classify_indices(bp, s, unsafe_complement(s.safe_set));
  EXPECT_EQ(idx.safe, (std::vector<int>{0, 1}));
  EXPECT_EQ(idx.unsafe, (std::vector<int>{1}));
  EXPECT_EQ(idx.initial, (std::vector<int>{0}));
}

TEST(ClassifyIndices, InteriorPieceIsSafeOnly) {
  const PwaSystem s = line_system(0.5, 2.5);
  const BarrierPartition bp = build_partition(s, GridSpec{{{1.0, 2.0}}});
  const IndexSets idx = classify_indices(bp, s, unsafe_complement(s.safe_set));
  EXPECT_EQ(idx.safe, (std::vector<int>{0}));
  EXPECT_TRUE(idx.unsafe.empty());
  EXPECT_TRUE(idx.initial.empty());
}

TEST(ClassifyIndices, InitialSubsetOfSafe) {
  for (const char* name : {"martingale", "drone", "vehicle"}) {
    const RunConfig cfg = preset(name);
    const BarrierPartition bp = make_partition(cfg);
    const IndexSets idx = classify_indices(bp, cfg.system, cfg.unsafe);
    for (int i : idx.initial) {
      EXPECT_TRUE(std::find(idx.safe.begin(), idx.safe.end(), i) != idx.safe.end()) << name;
    }
  }
}

TEST(Partition, ParentConsistentWithDynamics) {
  const RunConfig cfg = preset("vehicle", 42);
  const BarrierPartition bp = make_partition(cfg);
  std::mt19937_64 rng(1);
  const Box clip{v2(-50, -5), v2(250, 5)};
  for (int i = 0; i < bp.size(); ++i) {
    for (const Vector& x : sample_uniform(bp.pieces[i], 20, rng, clip)) {
      const auto region = cfg.system.locate(x);
      ASSERT_TRUE(region.has_value());
      const int q = bp.parent[i];
      EXPECT_LT((cfg.system.dynamics[q](x) - cfg.system.dynamics[*region](x)).norm(), 1e-12);
    }
  }
}

TEST(Partition, PiecesCoverTheDomainWithoutOverlap) {
  const RunConfig cfg = preset("vehicle", 46);
  const BarrierPartition bp = make_partition(cfg);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> x1(-50, 250), x2(-5, 5);
  int overlaps = 0;
  for (int t = 0; t < 10000; ++t) {
    const Vector x = v2(x1(rng), x2(rng));
    int inside = 0;
    for (const Polyhedron& p : bp.pieces) inside += p.contains_point(x, -1e-9) ? 1 : 0;
    int loose = 0;
    for (const Polyhedron& p : bp.pieces) loose += p.contains_point(x, 1e-9) ? 1 : 0;
    EXPECT_GE(loose, 1);
    overlaps += inside > 1 ? 1 : 0;
  }
  EXPECT_EQ(overlaps, 0);
}

TEST(Validate, RejectsInitialOutsideSafe) {
  PwaSystem s = line_system(3.0, 2.5);
  EXPECT_THROW(validate(s), DomainError);
}

TEST(Validate, RejectsOverlappingRegions) {
  PwaSystem s = line_system(0.5, 2.5);
  s.regions = {Polyhedron::box(v1(-10), v1(1)), Polyhedron::box(v1(0), v1(10))};
  s.dynamics = {AffineMap::identity(1), AffineMap::identity(1)};
  EXPECT_THROW(validate(s), DomainError);
}

TEST(Validate, RejectsMismatchedDynamics) {
  PwaSystem s = line_system(0.5, 2.5);
  s.dynamics.push_back(AffineMap::identity(1));
  EXPECT_THROW(validate(s), DimensionError);
}

TEST(Locate, LowestIndexOnSharedFacet) {
  const RunConfig cfg = preset("vehicle", 18);
  EXPECT_EQ(cfg.system.locate(v2(80.0, 0.0)), 0);
  EXPECT_EQ(cfg.system.locate(v2(100.0, 0.0)), 1);
  EXPECT_EQ(cfg.system.locate(v2(150.0, 0.0)), 2);
}

TEST(UnsafeComplement, OneHalfSpacePerFacet) {
  const UnsafeDescription u = unsafe_complement(Polyhedron::box(v2(0, -2), v2(200, 2)));
  ASSERT_EQ(u.pieces.size(), 4u);
  for (const Polyhedron& p : u.pieces) {
    EXPECT_FALSE(p.contains_point(v2(100, 0), 0.0));
  }
  EXPECT_TRUE(u.pieces[0].contains_point(v2(300, 0)));
}

}  // namespace
}  // namespace sbf
