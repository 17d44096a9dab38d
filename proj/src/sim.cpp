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

#include "sbf/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "sbf/error.hpp"

namespace sbf {

namespace {

constexpr std::int64_t kChunk = 4096;

std::vector<Vector> grid_starts(const Polyhedron& X0, int per_axis) {
  if (per_axis < 1) throw DomainError("simulate: grid_per_axis must be >= 1");
  const Box box = bounding_box(X0);
  const int n = X0.dim();
  for (int k = 0; k < n; ++k) {
    if (!std::isfinite(box.lower[k]) || !std::isfinite(box.upper[k])) {
      throw DomainError("simulate: grid starts need a bounded initial set");
    }
  }
  std::vector<Vector> out;
  std::vector<int> idx(n, 0);
  while (true) {
    Vector x(n);
    for (int k = 0; k < n; ++k) {
      x[k] = per_axis == 1 ? 0.5 * (box.lower[k] + box.upper[k])
                           : box.lower[k] + (box.upper[k] - box.lower[k]) * idx[k] /
                                                (per_axis - 1);
    }
    if (X0.contains_point(x, 1e-12)) out.push_back(x);
    int k = n - 1;
    while (k >= 0 && ++idx[k] == per_axis) idx[k--] = 0;
    if (k < 0) break;
  }
  if (out.empty()) throw DomainError("simulate: no grid point lies in the initial set");
  return out;
}

Vector uniform_start(const Polyhedron& X0, const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Vector x(X0.dim());
    for (int k = 0; k < X0.dim(); ++k) {
      x[k] = box.lower[k] + (box.upper[k] - box.lower[k]) * unit(rng);
    }
    if (X0.contains_point(x, 0.0)) return x;
  }
  throw DomainError("simulate: rejection sampling of the initial set failed");
}

}  // namespace

TrajectoryBatch simulate(const PwaSystem& system, const NoiseSource& noise,
                         const SimOptions& options) {
  const int n = system.dim();
  if (options.trials < 1) throw DomainError("simulate: trials must be >= 1");
  if (options.horizon < 1) throw DomainError("simulate: horizon must be >= 1");
  if (noise.generator.has_value() == (noise.pool != nullptr)) {
    throw DomainError("simulate: give exactly one of a generator and a sample pool");
  }
  if (noise.generator && noise.generator->dim() != n) {
    throw DimensionError("simulate: generator dimension differs from the system");
  }
  if (noise.pool && (noise.pool->empty() || noise.pool->dim() != n)) {
    throw DimensionError("simulate: sample pool is empty or has the wrong dimension");
  }

  TrajectoryBatch batch;
  batch.horizon = options.horizon;
  Box x0_box;
  std::int64_t groups = 1;
  switch (options.strategy) {
    case StartStrategy::kFixed:
      if (options.starts.empty()) throw DomainError("simulate: no fixed starts given");
      for (const Vector& s : options.starts) {
        if (s.size() != n) throw DimensionError("simulate: start has the wrong dimension");
      }
      batch.starts = options.starts;
      groups = static_cast<std::int64_t>(batch.starts.size());
      break;
    case StartStrategy::kGrid:
      batch.starts = grid_starts(system.initial_set, options.grid_per_axis);
      groups = static_cast<std::int64_t>(batch.starts.size());
      break;
    case StartStrategy::kUniform:
      x0_box = bounding_box(system.initial_set);
      if (!x0_box.lower.allFinite() || !x0_box.upper.allFinite()) {
        throw DomainError("simulate: uniform starts need a bounded initial set");
      }
      break;
  }

  const std::int64_t total = groups * options.trials;
  batch.start_of.resize(total);
  batch.initial_states.resize(total);
  batch.safe.resize(total);
  batch.exit_time.resize(total);
  if (options.record_noise) batch.noise.resize(total);

  const std::int64_t chunks_per_group = (options.trials + kChunk - 1) / kChunk;
  const std::int64_t units = groups * chunks_per_group;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    std::uniform_int_distribution<std::int64_t> pick(
        0, noise.pool ? noise.pool->size() - 1 : 0);
    for (std::int64_t unit = next++; unit < units; unit = next++) {
      try {
        const std::int64_t g = unit / chunks_per_group;
        const std::int64_t chunk = unit % chunks_per_group;
        std::mt19937_64 rng(derive_seed(derive_seed(options.seed, g), chunk));
        const std::int64_t first = chunk * kChunk;
        const std::int64_t last = std::min(options.trials, first + kChunk);
        for (std::int64_t t = first; t < last; ++t) {
          const std::int64_t slot = g * options.trials + t;
          Vector x = options.strategy == StartStrategy::kUniform
                         ? uniform_start(system.initial_set, x0_box, rng)
                         : batch.starts[g];
          batch.start_of[slot] = static_cast<std::int32_t>(g);
          batch.initial_states[slot] = x;
          Matrix draws;
          if (options.record_noise) draws.resize(options.horizon, n);
          std::int32_t exit = system.safe_set.contains_point(x, 0.0) ? -1 : 0;
          for (int k = 0; k < options.horizon && exit < 0; ++k) {
            const auto region = system.locate(x);
            if (!region) {
              std::ostringstream os;
              os << "simulate: state [" << x.transpose()
                 << "] lies in the safe set but in no dynamics region";
              throw DomainError(os.str());
            }
            const Vector eta = noise.generator ? noise.generator->draw(rng)
                                               : noise.pool->samples[pick(rng)];
            if (options.record_noise) draws.row(k) = eta.transpose();
            x = system.dynamics[*region](x) + eta;
            if (!system.safe_set.contains_point(x, 0.0)) exit = k + 1;
          }
          batch.safe[slot] = exit < 0 ? 1 : 0;
          batch.exit_time[slot] = exit;
          if (options.record_noise) {
            batch.noise[slot] = Eigen::Map<const Vector>(draws.data(), draws.size());
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = units;
      }
    }
  };
  int threads = options.threads > 0 ? options.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = static_cast<int>(std::clamp<std::int64_t>(threads, 1, units));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return batch;
}

SafetyEstimate clopper_pearson(std::int64_t safe, std::int64_t trials, double confidence) {
  if (trials < 1 || safe < 0 || safe > trials) {
    throw DomainError("clopper_pearson: need 0 <= safe <= trials, trials >= 1");
  }
  const double alpha = 1.0 - confidence;
  SafetyEstimate out;
  out.safe = safe;
  out.trials = trials;
  out.estimate = static_cast<double>(safe) / static_cast<double>(trials);
  const double x = static_cast<double>(safe);
  const double nn = static_cast<double>(trials);
  out.lower = safe == 0 ? 0.0 : boost::math::ibeta_inv(x, nn - x + 1.0, alpha / 2.0);
  out.upper = safe == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, nn - x, 1.0 - alpha / 2.0);
  return out;
}

SafetyEstimate empirical_safety(const TrajectoryBatch& batch) {
  if (batch.size() == 0) throw DomainError("empirical_safety: empty batch");
  std::int64_t safe = 0;
  for (std::uint8_t s : batch.safe) safe += s;
  return clopper_pearson(safe, batch.size());
}

SimSummary summarize(const TrajectoryBatch& batch) {
  SimSummary out;
  out.overall = empirical_safety(batch);
  const std::size_t groups = std::max<std::size_t>(1, batch.starts.size());
  std::vector<std::int64_t> safe(groups, 0), count(groups, 0);
  for (std::int64_t t = 0; t < batch.size(); ++t) {
    ++count[batch.start_of[t]];
    safe[batch.start_of[t]] += batch.safe[t];
  }
  double sum = 0.0;
  out.min_safety = 2.0;
  for (std::size_t g = 0; g < groups; ++g) {
    out.per_start.push_back(clopper_pearson(safe[g], count[g]));
    sum += out.per_start.back().estimate;
    if (out.per_start.back().estimate < out.min_safety) {
      out.min_safety = out.per_start.back().estimate;
      out.worst_start = static_cast<int>(g);
    }
  }
  out.mean_safety = sum / static_cast<double>(groups);
  return out;
}

SoundnessCheck soundness(const SimSummary& summary, double gamma, double c, int T) {
  SoundnessCheck out;
  const SafetyEstimate& worst = summary.per_start.at(summary.worst_start);
  const double p = 1.0 - worst.estimate;
  out.unsafe_fraction = p;
  out.bound = gamma + c * T;
  out.margin = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(worst.trials));
  out.passed = p <= out.bound + out.margin;
  return out;
}

void write_trajectories_csv(std::ostream& os, const TrajectoryBatch& batch) {
  const auto old = os.precision(17);
  os << "trial,start,safe,exit_time";
  const int n = batch.initial_states.empty()
                    ? 0
                    : static_cast<int>(batch.initial_states.front().size());
  for (int k = 0; k < n; ++k) os << ",x0_" << k;
  os << '\n';
  for (std::int64_t t = 0; t < batch.size(); ++t) {
    os << t << ',' << batch.start_of[t] << ',' << int{batch.safe[t]} << ','
       << batch.exit_time[t];
    for (int k = 0; k < n; ++k) os << ',' << batch.initial_states[t][k];
    os << '\n';
  }
  os.precision(old);
}

}  // namespace sbf
