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

#include "sbf/noise.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "sbf/error.hpp"

namespace sbf {

Vector GaussianNoise::draw(std::mt19937_64& rng) const {
  std::normal_distribution<double> unit(0.0, 1.0);
  Vector out(dim());
  for (int k = 0; k < dim(); ++k) {
    out[k] = (mean.size() ? mean[k] : 0.0) + sigma[k] * unit(rng);
  }
  return out;
}

NoiseDataset draw_gaussian(const GaussianNoise& generator, std::int64_t count,
                           std::uint64_t seed) {
  if (count < 0) throw DomainError("draw_gaussian: negative sample count");
  if (generator.mean.size() != 0 && generator.mean.size() != generator.sigma.size()) {
    throw DimensionError("gaussian mean and sigma lengths differ");
  }
  std::mt19937_64 rng(seed);
  NoiseDataset out;
  out.samples.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) out.samples.push_back(generator.draw(rng));
  std::ostringstream os;
  os << "gaussian sigma=[" << generator.sigma.transpose() << "] seed=" << seed;
  out.provenance = os.str();
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

NoiseDataset read_noise_csv(std::istream& is, int dim, std::int64_t limit) {
  NoiseDataset out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (limit >= 0 && out.size() >= limit) break;
    Vector sample(dim);
    std::string_view rest = body;
    for (int k = 0; k < dim; ++k) {
      const auto comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ConfigError("noise CSV line " + std::to_string(line_no) + ": bad field '" +
                          std::string(field) + "'");
      }
      sample[k] = value;
      if (k + 1 < dim) {
        if (comma == std::string_view::npos) {
          throw ConfigError("noise CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(dim) + " fields");
        }
        rest.remove_prefix(comma + 1);
      } else if (comma != std::string_view::npos) {
        throw ConfigError("noise CSV line " + std::to_string(line_no) + ": more than " +
                          std::to_string(dim) + " fields");
      }
    }
    out.samples.push_back(std::move(sample));
  }
  return out;
}

NoiseDataset read_noise_csv(const std::string& path, int dim, std::int64_t limit) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open noise file " + path);
  NoiseDataset out = read_noise_csv(in, dim, limit);
  out.provenance = "file " + path;
  return out;
}

void write_noise_csv(std::ostream& os, const NoiseDataset& data) {
  const auto old = os.precision(17);
  os << "# " << data.provenance << '\n';
  for (const Vector& s : data.samples) {
    for (Eigen::Index k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
    os << '\n';
  }
  os.precision(old);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 over the pair
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace sbf
