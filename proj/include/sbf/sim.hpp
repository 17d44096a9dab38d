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

// Monte Carlo rollouts of a PWA stochastic system, used to cross-check
// certificates empirically.

#ifndef SBF_SIM_HPP_
#define SBF_SIM_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sbf/noise.hpp"
#include "sbf/polytope.hpp"
#include "sbf/system.hpp"

namespace sbf {

// Either a generator or a pool of samples drawn from uniformly with
// replacement.
struct NoiseSource {
  std::optional<GaussianNoise> generator;
  const NoiseDataset* pool = nullptr;
};

enum class StartStrategy { kUniform, kFixed, kGrid };

struct SimOptions {
  StartStrategy strategy = StartStrategy::kGrid;
  std::vector<Vector> starts;  // kFixed
  int grid_per_axis = 5;       // kGrid: points per axis over the X0 bounding box
  // Trajectories per start (kFixed, kGrid) or in total (kUniform).
  std::int64_t trials = 1000;
  int horizon = 1;
  std::uint64_t seed = 0;
  bool record_noise = false;
  int threads = 0;  // 0: hardware concurrency
};

struct TrajectoryBatch {
  std::vector<Vector> starts;          // distinct initial states
  std::vector<std::int32_t> start_of;  // per trajectory
  std::vector<Vector> initial_states;  // per trajectory
  std::vector<std::uint8_t> safe;      // per trajectory
  std::vector<std::int32_t> exit_time; // first k with x(k) outside Xs, -1 if safe
  std::vector<Vector> noise;           // per trajectory, horizon x n (record_noise)
  int horizon = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(safe.size()); }
};

// Rolls out trajectories: each step applies the affine map of the
// lowest-index region containing the state, then adds a noise draw. A
// trajectory is unsafe once some x(k), k in 0..T, leaves Xs. Bit-reproducible
// for a given seed regardless of the thread count. Throws DomainError if a
// state inside Xs lies in no dynamics region.
TrajectoryBatch simulate(const PwaSystem& system, const NoiseSource& noise,
                         const SimOptions& options);

struct SafetyEstimate {
  std::int64_t safe = 0;
  std::int64_t trials = 0;
  double estimate = 0.0;
  double lower = 0.0;  // 95% Clopper-Pearson
  double upper = 1.0;
};

SafetyEstimate clopper_pearson(std::int64_t safe, std::int64_t trials,
                               double confidence = 0.95);

SafetyEstimate empirical_safety(const TrajectoryBatch& batch);

struct SimSummary {
  SafetyEstimate overall;
  std::vector<SafetyEstimate> per_start;
  int worst_start = 0;  // start with the lowest empirical safety
  double min_safety = 1.0;
  double mean_safety = 1.0;
};

SimSummary summarize(const TrajectoryBatch& batch);

struct SoundnessCheck {
  bool passed = false;
  double unsafe_fraction = 0.0;  // at the worst start
  double bound = 0.0;            // gamma + c T
  double margin = 0.0;           // 3 sqrt(p (1 - p) / trials)
};

// Worst start's unsafe fraction against gamma + c T plus a 3-sigma margin.
SoundnessCheck soundness(const SimSummary& summary, double gamma, double c, int T);

void write_trajectories_csv(std::ostream& os, const TrajectoryBatch& batch);

}  // namespace sbf

#endif  // SBF_SIM_HPP_
