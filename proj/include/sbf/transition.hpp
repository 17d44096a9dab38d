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

// The one-step transition sets
//
//   Q_sj(w) = {x in S_s : A_s x + b_s + eta(w) in R_j}
//
// for a list of source sets S_s, the barrier pieces R_j and the noise
// samples. Targets whose bounding box cannot be reached from S_s under any
// sample are discarded up front. When S_s and R_j are boxes and every bounded
// axis of R_j depends on a single state coordinate, Q_sj(w) is a box and is
// handled in closed form; other pairs go through the LP solver.

#ifndef SBF_TRANSITION_HPP_
#define SBF_TRANSITION_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "sbf/lp.hpp"
#include "sbf/noise.hpp"
#include "sbf/polytope.hpp"

namespace sbf {

class TransitionSets {
 public:
  TransitionSets(std::vector<Polyhedron> sources, std::vector<AffineMap> maps,
                 std::span<const Polyhedron> targets, const NoiseDataset& data,
                 double tol = kGeometryTol);

  int num_sources() const { return static_cast<int>(sources_.size()); }
  int num_targets() const { return static_cast<int>(targets_.size()); }
  int num_samples() const { return static_cast<int>(data_.size()); }
  const Vector& sample(int w) const { return data_.samples[w]; }
  const Polyhedron& source(int s) const { return sources_[s]; }
  const AffineMap& map(int s) const { return maps_[s]; }

  // Targets that some sample may reach from source s, ascending.
  const std::vector<int>& candidates(int s) const { return candidates_[s]; }

  // Whether Q_sj(w) is nonempty within the tolerance.
  bool nonempty(int s, int j, int w, LpSolver& solver) const;

  // sup of dir.x over Q_sj(w): -inf if empty, +inf if unbounded.
  double support(int s, int j, int w, const Vector& dir, LpSolver& solver) const;

  // Half-space description with parallel rows merged.
  Polyhedron set(int s, int j, int w) const;

  // True when (s, j) is handled in closed form.
  bool is_box_pair(int s, int j) const;

 private:
  struct BoxData {
    Vector lower;
    Vector upper;
  };
  // Fills [lo, hi] with Q_sj(w) on the box path; returns false if empty
  // within the tolerance.
  bool box_block(int s, int j, int w, double* lo, double* hi) const;

  std::vector<Polyhedron> sources_;
  std::vector<AffineMap> maps_;
  std::span<const Polyhedron> targets_;
  const NoiseDataset& data_;
  double tol_;
  int n_;
  std::vector<std::vector<int>> candidates_;
  std::vector<std::uint8_t> source_is_box_;
  std::vector<std::uint8_t> target_is_box_;
  std::vector<BoxData> source_box_;
  std::vector<BoxData> target_box_;
  // Per source: for each axis r the single column of A's row r that is
  // nonzero, -1 for a zero row, -2 for a row with several nonzeros.
  std::vector<std::vector<int>> row_column_;
};

}  // namespace sbf

#endif  // SBF_TRANSITION_HPP_
