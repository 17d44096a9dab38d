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

// Barrier certificates: evaluation, the safety bound, an independent primal
// re-check of every synthesis constraint, and JSON (de)serialization.

#ifndef SBF_CERTIFICATE_HPP_
#define SBF_CERTIFICATE_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sbf/noise.hpp"
#include "sbf/polytope.hpp"
#include "sbf/scenario.hpp"
#include "sbf/synth.hpp"
#include "sbf/system.hpp"

namespace sbf {

inline constexpr std::string_view kToolVersion = "sbf 1.0.0";

struct Timings {
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
  double verify_seconds = 0.0;
};

struct Certificate {
  std::vector<Polyhedron> pieces;
  std::vector<int> parent;
  BarrierTheta theta;
  double gamma = 0.0;
  double c = 0.0;
  int horizon = 1;
  ScenarioParams scenario;
  double safety_lower_bound = 0.0;
  double objective = 0.0;
  std::string fingerprint;
  std::uint64_t seed = 0;
  std::string tool_version{kToolVersion};
  // Written to JSON only when `record_timings` is set, so that certificates
  // from identical runs are byte-identical by default.
  Timings timings;
  bool record_timings = false;
};

// max over pieces containing x of u_i.x + v_i; 0 if no piece contains x.
double eval_barrier(const BarrierTheta& theta, std::span<const Polyhedron> pieces,
                    const Vector& x, double tol = kGeometryTol);
double eval_barrier(const Certificate& cert, const Vector& x, double tol = kGeometryTol);

// max(0, 1 - (gamma + c T)).
double safety_bound(double gamma, double c, int T);

// Hash over the partition pieces, the system data and the noise samples.
std::string fingerprint(const PwaSystem& system, std::span<const Polyhedron> pieces,
                        const NoiseDataset& data);

Certificate make_certificate(const SynthesisResult& result, const ScenarioParams& params,
                             int horizon, const BarrierPartition& partition,
                             std::string fingerprint, std::uint64_t seed);

// Checks the derived fields: the bound against (gamma, c, T), the scenario
// tuple against the binomial tail, and the shapes of theta and pieces.
// Returns an empty string when consistent, else the first problem found.
std::string consistency_error(const Certificate& cert);

struct FamilyWorst {
  RowFamily family = RowFamily::kNonNegative;
  double worst = -kInf;  // largest violation over all subproblems
  RowOrigin at;          // where it occurs
  std::int64_t subproblems = 0;
};

struct VerificationReport {
  std::array<FamilyWorst, 5> families;
  double tol = 0.0;
  bool passed = false;
  std::string failure;  // first failing family, empty on success
  double seconds = 0.0;

  const FamilyWorst& family(RowFamily f) const {
    return families[static_cast<int>(f)];
  }
};

struct VerifyOptions {
  double tol = 1e-6;
  bool paper_literal_unsafe = false;
  bool paper_literal_martingale = false;
  // Evaluate every transition block by the generic polyhedral route instead
  // of the closed form for boxes. Slower; used to cross-check.
  bool exact_geometry = false;
  int threads = 0;
};

// Recomputes the worst case of every constraint family by fresh primal
// maximizations. Throws DomainError on a fingerprint mismatch and
// SolverError if a subproblem cannot be solved.
VerificationReport verify_certificate(const Certificate& cert, const PwaSystem& system,
                                      const UnsafeDescription& unsafe,
                                      const NoiseDataset& data,
                                      const VerifyOptions& options = {});

std::string to_json(const VerificationReport& report);

// Randomized check that the tightened chance constraint implies the
// expectation constraint on finite-support noise, in exact arithmetic.
struct InnerApproxReport {
  int cases = 0;
  int premise_held = 0;  // cases where P{g + delta <= h} >= 1 - eps
  int counterexamples = 0;
  std::string first_counterexample;
};

InnerApproxReport inner_approx_oracle(int num_cases, std::uint64_t seed);

// Exact check of one instance: outcome values g, probabilities p (summing
// to 1), threshold h. Returns true unless the premise holds and E[g] > h.
bool inner_approx_holds(std::span<const double> g, std::span<const double> p, double h,
                        double eps, double M);

void write_certificate(std::ostream& os, const Certificate& cert);
Certificate read_certificate(std::istream& is);

}  // namespace sbf

#endif  // SBF_CERTIFICATE_HPP_
