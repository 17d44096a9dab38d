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

#include "sbf/scenario.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "sbf/error.hpp"

namespace sbf {

namespace {

constexpr std::int64_t kMaxSamples = 1'000'000'000;

// Comparisons against a target beta allow the same 1e-12 relative slack the
// log-space summation can be off by.
bool tail_within(double tail, double beta) { return tail <= beta * (1.0 + 1e-12); }

}  // namespace

double binomial_tail(std::int64_t N, double eps, std::int64_t d) {
  if (N < 1 || d < 1) throw DomainError("binomial_tail: need N >= 1 and d >= 1");
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("binomial_tail: eps outside [0, 1]");
  if (d - 1 >= N) return 1.0;
  if (eps == 0.0) return 1.0;
  if (eps == 1.0) return 0.0;  // all mass at i = N > d - 1

  const double log_eps = std::log(eps);
  const double log_rest = std::log1p(-eps);
  const std::int64_t last = std::min(d - 1, N);

  // log C(N, i) built incrementally; terms kept in log space, then summed
  // relative to the largest one.
  double log_choose = 0.0;
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(last + 1));
  for (std::int64_t i = 0; i <= last; ++i) {
    if (i > 0) {
      log_choose += std::log(static_cast<double>(N - i + 1)) -
                    std::log(static_cast<double>(i));
    }
    const double term = log_choose + static_cast<double>(i) * log_eps +
                        static_cast<double>(N - i) * log_rest;
    logs.push_back(term);
    max_log = std::max(max_log, term);
  }
  double scaled = 0.0;
  for (double l : logs) scaled += std::exp(l - max_log);
  const double tail = std::exp(max_log) * scaled;
  return std::clamp(tail, 0.0, 1.0);
}

std::int64_t required_samples(double eps, std::int64_t d, double beta_target) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("required_samples: eps outside (0, 1)");
  if (!(beta_target > 0.0 && beta_target < 1.0)) {
    throw DomainError("required_samples: beta outside (0, 1)");
  }
  if (d < 1) throw DomainError("required_samples: d must be >= 1");

  std::int64_t hi = std::max<std::int64_t>(d, 1);
  while (!tail_within(binomial_tail(hi, eps, d), beta_target)) {
    if (hi > kMaxSamples) {
      throw DomainError("required_samples: more than 1e9 samples needed");
    }
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // tail(lo) > beta, or lo == 0
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (tail_within(binomial_tail(mid, eps, d), beta_target)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (hi > kMaxSamples) throw DomainError("required_samples: more than 1e9 samples needed");
  // The search relies on the tail being nonincreasing in N.
  assert(hi == 1 || !tail_within(binomial_tail(hi - 1, eps, d), beta_target));
  return hi;
}

double max_violation_level(std::int64_t N, std::int64_t d, double beta_target) {
  if (!(beta_target > 0.0 && beta_target < 1.0)) {
    throw DomainError("max_violation_level: beta outside (0, 1)");
  }
  if (d < 1 || N < 1 || d - 1 >= N) {
    throw DomainError("max_violation_level: N = " + std::to_string(N) +
                      " samples cannot support d = " + std::to_string(d) +
                      " decision variables at any eps < 1");
  }
  double lo = 0.0;  // tail = 1 > beta
  double hi = 1.0;  // tail = 0 <= beta
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (tail_within(binomial_tail(N, mid, d), beta_target)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (hi >= 1.0) {
    throw DomainError("max_violation_level: no eps < 1 reaches the target beta");
  }
  return hi;
}

double tightening_margin(double eps, double M) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("tightening_margin: eps outside [0, 1)");
  if (!(M >= 1.0)) throw DomainError("tightening_margin: M must be >= 1");
  return eps * M / (1.0 - eps);
}

ScenarioParams resolve(const ScenarioRequest& request, std::int64_t d) {
  const int given = (request.eps ? 1 : 0) + (request.N ? 1 : 0) + (request.beta ? 1 : 0);
  if (given != 2) {
    throw ConfigError("scenario: give exactly two of eps, N, beta (got " +
                      std::to_string(given) + ")");
  }
  if (!(request.M >= 1.0)) throw ConfigError("scenario: M must be >= 1");
  ScenarioParams p;
  p.d = d;
  p.M = request.M;
  if (request.eps && request.beta) {
    p.eps = *request.eps;
    p.beta = *request.beta;
    p.N = required_samples(p.eps, d, p.beta);
    p.beta = binomial_tail(p.N, p.eps, d);
  } else if (request.eps && request.N) {
    p.eps = *request.eps;
    p.N = *request.N;
    if (!(p.eps > 0.0 && p.eps < 1.0)) throw ConfigError("scenario: eps outside (0, 1)");
    p.beta = binomial_tail(p.N, p.eps, d);
  } else {
    p.N = *request.N;
    p.eps = max_violation_level(p.N, d, *request.beta);
    p.beta = binomial_tail(p.N, p.eps, d);
  }
  const double minimal = tightening_margin(p.eps, p.M);
  p.delta = request.delta.value_or(minimal);
  if (p.delta < minimal - 1e-12) {
    throw ConfigError("scenario: delta " + std::to_string(p.delta) +
                      " is below eps*M/(1-eps) = " + std::to_string(minimal));
  }
  return p;
}

std::int64_t saa_reference_samples(double saa_constant, double beta) {
  // Strip the last-ulp noise of the division so that K / 1e-3 is 1000 K.
  return static_cast<std::int64_t>(std::ceil(saa_constant / beta * (1.0 - 1e-12)));
}

void write_sample_curve(std::ostream& os, double eps, std::int64_t d,
                        std::span<const double> betas, double saa_constant) {
  os << "beta,N_scenario,N_saa_reference\n";
  for (double beta : betas) {
    os << beta << ',' << required_samples(eps, d, beta) << ','
       << saa_reference_samples(saa_constant, beta) << '\n';
  }
}

}  // namespace sbf
