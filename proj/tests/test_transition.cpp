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

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "sbf/transition.hpp"

namespace sbf {
namespace {

struct Instance {
  std::vector<Polyhedron> sources;
  std::vector<AffineMap> maps;
  std::vector<Polyhedron> targets;
  NoiseDataset data;
};

// Grid targets over [-3, 3]^n, random box sources, and either a diagonal or
// a dense map.
Instance make_instance(std::mt19937_64& rng, int n, bool diagonal) {
  Instance in;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int s = 0; s < 3; ++s) {
    in.sources.push_back(oracle::random_box(n, 2.0, rng));
    Matrix A(n, n);
    for (int r = 0; r < n; ++r) {
      for (int k = 0; k < n; ++k) A(r, k) = diagonal ? (r == k ? 1.0 + 0.5 * unit(rng) : 0.0)
                                                     : unit(rng);
    }
    Vector b(n);
    for (int r = 0; r < n; ++r) b[r] = 0.3 * unit(rng);
    in.maps.emplace_back(A, b);
  }
  const std::vector<double> cuts{-3.0, -1.0, 0.5, 3.0};
  std::vector<int> idx(n, 0);
  while (true) {
    Vector lo(n), hi(n);
    for (int k = 0; k < n; ++k) {
      lo[k] = cuts[idx[k]];
      hi[k] = cuts[idx[k] + 1];
    }
    in.targets.push_back(Polyhedron::box(lo, hi));
    int k = 0;
    while (k < n && ++idx[k] == static_cast<int>(cuts.size()) - 1) idx[k++] = 0;
    if (k == n) break;
  }
  for (int w = 0; w < 6; ++w) in.data.samples.push_back(0.4 * Vector::Random(n));
  return in;
}

void cross_check(const Instance& in, bool expect_box) {
  const TransitionSets ts(in.sources, in.maps, in.targets, in.data);
  LpSolver solver;
  for (int s = 0; s < ts.num_sources(); ++s) {
    const auto& cand = ts.candidates(s);
    for (int j = 0; j < ts.num_targets(); ++j) {
      EXPECT_EQ(ts.is_box_pair(s, j), expect_box);
      const bool listed = std::binary_search(cand.begin(), cand.end(), j);
      for (int w = 0; w < ts.num_samples(); ++w) {
        const Polyhedron Q = preimage(in.sources[s], in.maps[s], in.data.samples[w],
                                      in.targets[j]);
        const bool truth = !is_empty(Q);
        if (!listed) {
          EXPECT_FALSE(truth) << s << ' ' << j << ' ' << w;
          continue;
        }
        EXPECT_EQ(ts.nonempty(s, j, w, solver), truth) << s << ' ' << j << ' ' << w;
        if (!truth) continue;
        const Vector dir = Vector::Random(in.sources[s].dim());
        EXPECT_NEAR(ts.support(s, j, w, dir, solver), maximize(Q, dir).value, 1e-7);
        EXPECT_NEAR(maximize(ts.set(s, j, w), dir).value, maximize(Q, dir).value, 1e-7);
      }
    }
  }
}

TEST(TransitionSets, BoxPathMatchesPreimage) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) cross_check(make_instance(rng, 1 + trial % 2, true), true);
}

TEST(TransitionSets, GenericPathMatchesPreimage) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) cross_check(make_instance(rng, 2, false), false);
}

TEST(TransitionSets, ShiftedOutBlockIsEmpty) {
  const Vector lo = Vector::Constant(1, 0.0), hi = Vector::Constant(1, 1.0);
  const std::vector<Polyhedron> targets{Polyhedron::box(lo, hi)};
  NoiseDataset data;
  data.samples.push_back(Vector::Constant(1, 5.0));
  const TransitionSets ts({Polyhedron::box(lo, hi)}, {AffineMap::identity(1)}, targets, data);
  LpSolver solver;
  EXPECT_TRUE(ts.candidates(0).empty() || !ts.nonempty(0, 0, 0, solver));
}

}  // namespace
}  // namespace sbf
