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

#include "sbf/transition.hpp"

#include <algorithm>
#include <cmath>

#include "sbf/error.hpp"

namespace sbf {

namespace {

// Prefilter margin for box separation; generous compared with the geometry
// tolerance so that it never discards a block the exact test would keep.
constexpr double kPrefilterMargin = 1e-6;

}  // namespace

TransitionSets::TransitionSets(std::vector<Polyhedron> sources, std::vector<AffineMap> maps,
                               std::span<const Polyhedron> targets, const NoiseDataset& data,
                               double tol)
    : sources_(std::move(sources)),
      maps_(std::move(maps)),
      targets_(targets),
      data_(data),
      tol_(tol),
      n_(targets.empty() ? 0 : targets.front().dim()) {
  if (sources_.size() != maps_.size()) {
    throw DimensionError("TransitionSets: one affine map per source is required");
  }
  if (data_.empty()) throw DomainError("TransitionSets: no noise samples");
  if (data_.dim() != n_) throw DimensionError("TransitionSets: noise dimension");

  Vector eta_lo = Vector::Constant(n_, kInf);
  Vector eta_hi = Vector::Constant(n_, -kInf);
  for (const Vector& eta : data_.samples) {
    eta_lo = eta_lo.cwiseMin(eta);
    eta_hi = eta_hi.cwiseMax(eta);
  }

  for (const Polyhedron& t : targets_) {
    target_is_box_.push_back(t.is_axis_aligned());
    const Box b = bounding_box(t);
    target_box_.push_back({b.lower, b.upper});
  }
  const int S = num_sources();
  candidates_.resize(S);
  row_column_.resize(S);
  for (int s = 0; s < S; ++s) {
    const Polyhedron& src = sources_[s];
    const AffineMap& f = maps_[s];
    if (src.dim() != n_ || f.dim() != n_) {
      throw DimensionError("TransitionSets: source dimension");
    }
    source_is_box_.push_back(src.is_axis_aligned());
    const Box sb = bounding_box(src);
    source_box_.push_back({sb.lower, sb.upper});
    std::vector<int>& cols = row_column_[s];
    cols.assign(n_, -1);
    for (int r = 0; r < n_; ++r) {
      for (int c = 0; c < n_; ++c) {
        if (f.A(r, c) == 0.0) continue;
        cols[r] = cols[r] == -1 ? c : -2;
      }
    }
    if (sb.empty()) continue;
    Box image = affine_image(sb, f, Vector::Zero(n_));
    image.lower += eta_lo;
    image.upper += eta_hi;
    for (int j = 0; j < num_targets(); ++j) {
      const Box tb{target_box_[j].lower, target_box_[j].upper};
      if (tb.empty()) continue;
      if (image.intersects(tb, kPrefilterMargin + tol_)) candidates_[s].push_back(j);
    }
  }
}

bool TransitionSets::is_box_pair(int s, int j) const {
  if (!source_is_box_[s] || !target_is_box_[j]) return false;
  const BoxData& tb = target_box_[j];
  for (int r = 0; r < n_; ++r) {
    const bool bounded = std::isfinite(tb.lower[r]) || std::isfinite(tb.upper[r]);
    if (bounded && row_column_[s][r] == -2) return false;
  }
  return true;
}

bool TransitionSets::box_block(int s, int j, int w, double* lo, double* hi) const {
  const BoxData& sb = source_box_[s];
  const BoxData& tb = target_box_[j];
  const AffineMap& f = maps_[s];
  const Vector& eta = data_.samples[w];
  for (int k = 0; k < n_; ++k) {
    lo[k] = sb.lower[k];
    hi[k] = sb.upper[k];
  }
  for (int r = 0; r < n_; ++r) {
    const double t_lo = tb.lower[r];
    const double t_hi = tb.upper[r];
    if (!std::isfinite(t_lo) && !std::isfinite(t_hi)) continue;
    const double offset = f.b[r] + eta[r];
    const int c = row_column_[s][r];
    if (c < 0) {
      if (offset < t_lo - tol_ || offset > t_hi + tol_) return false;
      continue;
    }
    const double a = f.A(r, c);
    double x_lo = (t_lo - offset) / a;
    double x_hi = (t_hi - offset) / a;
    if (a < 0) std::swap(x_lo, x_hi);
    lo[c] = std::max(lo[c], x_lo);
    hi[c] = std::min(hi[c], x_hi);
  }
  for (int k = 0; k < n_; ++k) {
    if (lo[k] > hi[k] + tol_) return false;
  }
  return true;
}

namespace {

// Scratch bounds on the stack for the usual small dimensions.
class Bounds {
 public:
  explicit Bounds(int n) {
    if (n > kStack) {
      heap_.resize(2 * static_cast<std::size_t>(n));
      lo_ = heap_.data();
      hi_ = heap_.data() + n;
    }
  }
  double* lo() { return lo_; }
  double* hi() { return hi_; }

 private:
  static constexpr int kStack = 8;
  double stack_[2 * kStack];
  std::vector<double> heap_;
  double* lo_ = stack_;
  double* hi_ = stack_ + kStack;
};

}  // namespace

bool TransitionSets::nonempty(int s, int j, int w, LpSolver& solver) const {
  if (is_box_pair(s, j)) {
    Bounds b(n_);
    return box_block(s, j, w, b.lo(), b.hi());
  }
  return !is_empty(set(s, j, w), solver, tol_);
}

double TransitionSets::support(int s, int j, int w, const Vector& dir, LpSolver& solver) const {
  if (is_box_pair(s, j)) {
    Bounds b(n_);
    double* plo = b.lo();
    double* phi = b.hi();
    if (!box_block(s, j, w, plo, phi)) return -kInf;
    double value = 0.0;
    for (int k = 0; k < n_; ++k) {
      if (dir[k] == 0.0) continue;
      const double end = dir[k] > 0 ? phi[k] : plo[k];
      if (!std::isfinite(end)) return kInf;
      // A block that is empty by less than the tolerance is evaluated at
      // the midpoint of its collapsed axis.
      const double x = plo[k] > phi[k] ? 0.5 * (plo[k] + phi[k]) : end;
      value += dir[k] * x;
    }
    return value;
  }
  const Support sup = maximize(set(s, j, w), dir, solver);
  switch (sup.status) {
    case LpStatus::kOptimal:
      return sup.value;
    case LpStatus::kUnbounded:
      return kInf;
    case LpStatus::kInfeasible:
      return -kInf;
    case LpStatus::kNumericalFailure:
      break;
  }
  throw SolverError("transition support LP failed");
}

Polyhedron TransitionSets::set(int s, int j, int w) const {
  return merge_parallel_rows(preimage(sources_[s], maps_[s], data_.samples[w], targets_[j]));
}

}  // namespace sbf
