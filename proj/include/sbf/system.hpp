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

// Piece-wise affine stochastic systems x(k+1) = A_i x(k) + b_i + eta(k) for
// x(k) in region Q_i, and the barrier partition laid over them.

#ifndef SBF_SYSTEM_HPP_
#define SBF_SYSTEM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbf/polytope.hpp"

namespace sbf {

struct PwaSystem {
  std::vector<Polyhedron> regions;
  std::vector<AffineMap> dynamics;
  Polyhedron initial_set;
  Polyhedron safe_set;
  int horizon = 1;

  int dim() const { return safe_set.dim(); }
  int num_regions() const { return static_cast<int>(regions.size()); }

  // Lowest-index region containing x, if any.
  std::optional<int> locate(const Vector& x, double tol = 0.0) const;
};

// Shape checks, X0 within Xs, and a sampled check that region interiors do
// not overlap. Throws DomainError / DimensionError.
void validate(const PwaSystem& system, std::uint64_t seed = 0,
              int samples_per_region = 200);

// The unsafe set Xu = X \ Xs as a finite union of (possibly unbounded)
// polyhedra.
struct UnsafeDescription {
  std::vector<Polyhedron> pieces;
};

// One closed half-space {a.x >= h} per row of the safe set; their union is
// the closure of the complement.
UnsafeDescription unsafe_complement(const Polyhedron& safe_set);

struct IndexSets {
  std::vector<int> safe;     // I_s
  std::vector<int> unsafe;   // I_u
  std::vector<int> initial;  // I_0
};

struct BarrierPartition {
  std::vector<Polyhedron> pieces;
  std::vector<int> parent;  // refinement map r: piece -> dynamics region

  int size() const { return static_cast<int>(pieces.size()); }
  int dim() const { return pieces.empty() ? 0 : pieces.front().dim(); }
};

// Per-axis breakpoints; +-infinity are allowed at the ends and produce
// unbounded outer cells.
struct GridSpec {
  std::vector<std::vector<double>> breakpoints;
};

struct PartitionOptions {
  // Split cells that straddle a dynamics facet instead of rejecting them.
  bool split_along_regions = false;
  double tol = kGeometryTol;
};
// Grid cells aligned to the dynamics regions; index sets come from
// classify_indices. Throws PartitionError on a misaligned grid.
BarrierPartition build_partition(const PwaSystem& system, const GridSpec& grid,
                                 const PartitionOptions& options = {});

// Same checks for an explicit list of pieces.
BarrierPartition partition_from_pieces(const PwaSystem& system,
                                       std::vector<Polyhedron> pieces,
                                       const PartitionOptions& options = {});

// i is in a set when piece i meets it in a full-dimensional region; for a
// lower-dimensional set any contact counts.
IndexSets classify_indices(const BarrierPartition& partition,
                           const PwaSystem& system,
                           const UnsafeDescription& unsafe,
                           double tol = kGeometryTol);

// Whether piece and set meet in the sense used by classify_indices.
bool meets(const Polyhedron& piece, const Polyhedron& set, double tol = kGeometryTol);

}  // namespace sbf

#endif  // SBF_SYSTEM_HPP_
