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

// Scenario-approach statistics. With N i.i.d. samples and d decision
// variables, the probability (over the draw) that the scenario optimum
// violates its chance constraint by more than eps is at most
//
//   beta = sum_{i=0}^{d-1} C(N, i) eps^i (1 - eps)^(N - i).
//
// Everything here is a pure function of its arguments.

#ifndef SBF_SCENARIO_HPP_
#define SBF_SCENARIO_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>

namespace sbf {

// Binomial CDF F(d-1; N, eps), summed in log space. Exactly 1 when d > N.
double binomial_tail(std::int64_t N, double eps, std::int64_t d);

// Smallest N with binomial_tail(N, eps, d) <= beta_target.
// Throws DomainError if N would exceed 1e9.
std::int64_t required_samples(double eps, std::int64_t d, double beta_target);

// Smallest violation level eps (to 1e-10) such that
// binomial_tail(N, eps, d) <= beta_target. Throws DomainError when no eps < 1
// qualifies (the tail is 1 whenever d > N).
double max_violation_level(std::int64_t N, std::int64_t d, double beta_target);

// Minimal admissible tightening eps * M / (1 - eps).
double tightening_margin(double eps, double M);

struct ScenarioParams {
  std::int64_t N = 0;
  double eps = 0.0;
  std::int64_t d = 0;
  double beta = 0.0;
  double M = 1.0;
  double delta = 0.0;
};

// Exactly two of {eps, N, beta} must be given; the third is derived.
struct ScenarioRequest {
  std::optional<double> eps;
  std::optional<std::int64_t> N;
  std::optional<double> beta;
  double M = 1.0;
  std::optional<double> delta;  // defaults to tightening_margin(eps, M)
};

ScenarioParams resolve(const ScenarioRequest& request, std::int64_t d);

// Decision-variable count of the scenario program for a PWA barrier with
// `pieces` pieces in dimension n: theta plus (gamma, c).
inline std::int64_t decision_dimension(std::int64_t pieces, std::int64_t n) {
  return pieces * (n + 1) + 2;
}

// ceil(saa_constant / beta): the 1/beta sample scaling of sample-average
// approximation, used only as a reference curve.
std::int64_t saa_reference_samples(double saa_constant, double beta);

// CSV with columns beta,N_scenario,N_saa_reference where the reference is
// ceil(saa_constant / beta).
void write_sample_curve(std::ostream& os, double eps, std::int64_t d,
                        std::span<const double> betas, double saa_constant);

}  // namespace sbf

#endif  // SBF_SCENARIO_HPP_
