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

#include "sbf/system.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "sbf/error.hpp"

namespace sbf {

std::optional<int> PwaSystem::locate(const Vector& x, double tol) const {
  for (int i = 0; i < num_regions(); ++i) {
    if (regions[i].contains_point(x, tol)) return i;
  }
  return std::nullopt;
}

namespace {

// A finite box around the interesting part of the state space, used to clip
// unbounded sets before sampling.
Box sampling_window(const PwaSystem& system) {
  Box box = bounding_box(system.safe_set);
  for (Eigen::Index k = 0; k < box.lower.size(); ++k) {
    const bool finite = std::isfinite(box.lower[k]) && std::isfinite(box.upper[k]);
    const double pad = finite ? 0.5 * (box.upper[k] - box.lower[k]) + 1.0 : 0.0;
    box.lower[k] = std::isfinite(box.lower[k]) ? box.lower[k] - pad : -1e3;
    box.upper[k] = std::isfinite(box.upper[k]) ? box.upper[k] + pad : 1e3;
  }
  return box;
}

std::string cell_name(const Polyhedron& cell) { return describe(cell); }

}  // namespace

void validate(const PwaSystem& system, std::uint64_t seed, int samples_per_region) {
  const int n = system.dim();
  if (system.regions.empty()) throw DomainError("system has no dynamics regions");
  if (system.regions.size() != system.dynamics.size()) {
    throw DimensionError("system has " + std::to_string(system.regions.size()) +
                         " regions but " + std::to_string(system.dynamics.size()) +
                         " affine maps");
  }
  if (system.horizon < 1) throw DomainError("horizon must be >= 1");
  if (system.initial_set.dim() != n) throw DimensionError("initial set dimension");
  for (int i = 0; i < system.num_regions(); ++i) {
    if (system.regions[i].dim() != n || system.dynamics[i].dim() != n) {
      throw DimensionError("region " + std::to_string(i) + " has the wrong dimension");
    }
  }
  if (const Containment c = contains(system.safe_set, system.initial_set); !c) {
    throw DomainError("initial set is not inside the safe set: " + c.diagnostic);
  }

  std::mt19937_64 rng(seed);
  const Box window = sampling_window(system);
  for (int i = 0; i < system.num_regions(); ++i) {
    for (const Vector& x :
         sample_uniform(system.regions[i], samples_per_region, rng, window)) {
      if (!system.regions[i].contains_point(x, -1e-9)) continue;  // near a facet
      for (int j = 0; j < system.num_regions(); ++j) {
        if (j != i && system.regions[j].contains_point(x, -1e-9)) {
          std::ostringstream os;
          os << "regions " << i << " and " << j << " overlap near x = "
             << x.transpose();
          throw DomainError(os.str());
        }
      }
    }
  }
}

UnsafeDescription unsafe_complement(const Polyhedron& safe_set) {
  UnsafeDescription out;
  for (Eigen::Index r = 0; r < safe_set.rows(); ++r) {
    if (safe_set.H().row(r).norm() == 0.0) continue;
    Matrix H = -safe_set.H().row(r);
    Vector h = Vector::Constant(1, -safe_set.h()[r]);
    out.pieces.emplace_back(std::move(H), std::move(h));
  }
  return out;
}

bool meets(const Polyhedron& piece, const Polyhedron& set, double tol) {
  const Polyhedron both = merge_parallel_rows(intersect(piece, set));
  if (interior_radius(set) > tol) return interior_radius(both) > tol;
  return !is_empty(both, tol);
}

namespace {

std::vector<Polyhedron> grid_cells(const GridSpec& grid, int n) {
  if (static_cast<int>(grid.breakpoints.size()) != n) {
    throw DimensionError("grid has " + std::to_string(grid.breakpoints.size()) +
                         " axes, system has " + std::to_string(n));
  }
  for (int k = 0; k < n; ++k) {
    const auto& b = grid.breakpoints[k];
    if (b.size() < 2) throw PartitionError("axis " + std::to_string(k) + " needs >= 2 breakpoints");
    for (std::size_t j = 1; j < b.size(); ++j) {
      if (!(b[j] > b[j - 1])) {
        throw PartitionError("breakpoints on axis " + std::to_string(k) +
                             " must be strictly increasing");
      }
    }
  }
  std::vector<Polyhedron> cells;
  std::vector<std::size_t> at(n, 0);
  while (true) {
    Vector lo(n), hi(n);
    for (int k = 0; k < n; ++k) {
      lo[k] = grid.breakpoints[k][at[k]];
      hi[k] = grid.breakpoints[k][at[k] + 1];
    }
    cells.push_back(Polyhedron::box(lo, hi));
    int k = n - 1;  // last axis varies fastest
    while (k >= 0 && ++at[k] + 1 == grid.breakpoints[k].size()) at[k--] = 0;
    if (k < 0) break;
  }
  return cells;
}

}  // namespace

BarrierPartition partition_from_pieces(const PwaSystem& system,
                                       std::vector<Polyhedron> candidates,
                                       const PartitionOptions& options) {
  BarrierPartition out;
  std::mt19937_64 rng(7);
  const Box window = sampling_window(system);
  for (Polyhedron& cell : candidates) {
    if (cell.dim() != system.dim()) throw DimensionError("piece dimension mismatch");
    if (interior_radius(cell) <= options.tol) continue;  // no interior: drop

    std::vector<int> touching;
    for (int j = 0; j < system.num_regions(); ++j) {
      if (interior_radius(merge_parallel_rows(intersect(cell, system.regions[j]))) >
          options.tol) {
        touching.push_back(j);
      }
    }
    if (touching.empty()) {
      throw PartitionError("cell " + cell_name(cell) + " lies in no dynamics region");
    }
    if (touching.size() == 1 && contains(system.regions[touching[0]], cell, options.tol)) {
      out.pieces.push_back(std::move(cell));
      out.parent.push_back(touching[0]);
      continue;
    }
    if (!options.split_along_regions) {
      std::ostringstream os;
      os << "cell " << cell_name(cell) << " is not contained in a single dynamics region"
         << " (meets regions";
      for (int j : touching) os << ' ' << j;
      os << ")";
      throw PartitionError(os.str());
    }
    // Every part of the cell must be covered by some region.
    for (const Vector& x : sample_uniform(cell, 200, rng, window)) {
      if (!system.locate(x, options.tol)) {
        throw PartitionError("cell " + cell_name(cell) + " leaves the dynamics domain");
      }
    }
    std::clog << "warning: splitting cell " << cell_name(cell) << " along "
              << touching.size() << " dynamics regions\n";
    for (int j : touching) {
      out.pieces.push_back(merge_parallel_rows(intersect(cell, system.regions[j])));
      out.parent.push_back(j);
    }
  }
  if (out.pieces.empty()) throw PartitionError("partition has no full-dimensional piece");
  std::vector<bool> hit(system.num_regions(), false);
  for (int p : out.parent) hit[p] = true;
  for (int j = 0; j < system.num_regions(); ++j) {
    if (!hit[j]) {
      throw PartitionError("dynamics region " + std::to_string(j) +
                           " contains no barrier piece");
    }
  }
  return out;
}

BarrierPartition build_partition(const PwaSystem& system, const GridSpec& grid,
                                 const PartitionOptions& options) {
  return partition_from_pieces(system, grid_cells(grid, system.dim()), options);
}

IndexSets classify_indices(const BarrierPartition& partition, const PwaSystem& system,
                           const UnsafeDescription& unsafe, double tol) {
  IndexSets out;
  for (int i = 0; i < partition.size(); ++i) {
    const Polyhedron& piece = partition.pieces[i];
    if (meets(piece, system.safe_set, tol)) out.safe.push_back(i);
    if (meets(piece, system.initial_set, tol)) out.initial.push_back(i);
    for (const Polyhedron& u : unsafe.pieces) {
      if (meets(piece, u, tol)) {
        out.unsafe.push_back(i);
        break;
      }
    }
  }
  return out;
}

}  // namespace sbf
