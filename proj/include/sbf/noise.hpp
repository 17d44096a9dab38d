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

#ifndef SBF_NOISE_HPP_
#define SBF_NOISE_HPP_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "sbf/polytope.hpp"

namespace sbf {

// N i.i.d. noise realizations. The synthesis never looks at where they came
// from; `provenance` is carried into reports only.
struct NoiseDataset {
  std::vector<Vector> samples;
  std::string provenance;

  std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
  bool empty() const { return samples.empty(); }
  int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().size()); }
};

// Zero-mean (by default) Gaussian with diagonal covariance.
struct GaussianNoise {
  Vector mean;
  Vector sigma;

  int dim() const { return static_cast<int>(sigma.size()); }
  Vector draw(std::mt19937_64& rng) const;
};

NoiseDataset draw_gaussian(const GaussianNoise& generator, std::int64_t count,
                           std::uint64_t seed);

// One sample per line, `dim` comma-separated decimals. Lines starting with
// '#' and blank lines are skipped. Reads at most `limit` samples when
// limit >= 0. Throws ConfigError with the offending line number.
NoiseDataset read_noise_csv(std::istream& is, int dim, std::int64_t limit = -1);
NoiseDataset read_noise_csv(const std::string& path, int dim, std::int64_t limit = -1);

void write_noise_csv(std::ostream& os, const NoiseDataset& data);

// Stream seed for worker/trial `index` derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace sbf

#endif  // SBF_NOISE_HPP_
