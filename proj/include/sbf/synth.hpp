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

// Synthesis of a piece-wise affine stochastic barrier
//
//   B(x) = max { u_i.x + v_i : x in piece i },   0 outside every piece,
//
// by one linear program. Every requirement on B is a constraint of the form
// "a(z).x <= b(z) for all x in P" with z = (gamma, c, u, v) and P a
// polyhedron; each one is replaced by its LP dual
//
//   lambda >= 0,  h.lambda <= b(z),  H^T lambda = a(z).
//
// The families are: B_i >= 0 and B_i <= M on piece i; B_i <= gamma on
// piece i within X0; B_i >= 1 on piece i within Xu; and, for every sample
// w and pair (i, j) with i meeting Xs,
//
//   B_j(A x + b + eta(w)) + delta <= B_i(x) + c
//
// on Q_ij(w) = {x in piece i (within Xs) : A x + b + eta(w) in piece j}.
// Pairs whose Q_ij(w) is empty are skipped. The objective is gamma + c T.

#ifndef SBF_SYNTH_HPP_
#define SBF_SYNTH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbf/lp.hpp"
#include "sbf/noise.hpp"
#include "sbf/polytope.hpp"
#include "sbf/scenario.hpp"
#include "sbf/system.hpp"

namespace sbf {

struct BarrierTheta {
  Matrix slopes;      // pieces x n, row i is u_i
  Vector intercepts;  // v_i

  int pieces() const { return static_cast<int>(intercepts.size()); }
  int dim() const { return static_cast<int>(slopes.cols()); }
  double piece_value(int i, const Vector& x) const {
    return slopes.row(i).dot(x) + intercepts[i];
  }
};

enum class RowFamily { kNonNegative, kUpperBound, kInitial, kUnsafe, kMartingale };

std::string_view to_string(RowFamily family);

// Where an LP row came from. `j` is the target piece (martingale) or the
// unsafe component (unsafe rows); `sample` is the noise index.
struct RowOrigin {
  RowFamily family = RowFamily::kNonNegative;
  std::int32_t i = -1;
  std::int32_t j = -1;
  std::int32_t sample = -1;
};

struct DualizedRows {
  RowId inequality;
  RowId first_equality;
  VarId first_dual;
  int num_duals = 0;
};

// Adds the dual form of "a.x <= b for all x in P" to `model`: P.rows() new
// nonnegative variables, one inequality and n equalities. With
// `check_nonempty`, an empty P is rejected (callers prune those).
DualizedRows dualize_robust(std::span<const LinearExpr> a, const LinearExpr& b,
                            const Polyhedron& P, LpModel& model,
                            bool check_nonempty = true);

// How the martingale family enters the LP. Row generation starts from a
// few samples per pair, then repeatedly adds the most violated blocks until
// every block holds; its optimum is that of the full program.
enum class LbpStrategy { kAuto, kMonolithic, kRowGeneration };

struct SynthOptions {
  // B_i >= 1 is imposed on the whole piece instead of piece and Xu.
  bool paper_literal_unsafe = false;
  // Martingale rows quantify over the whole piece instead of piece and Xs.
  bool paper_literal_martingale = false;
  // Skip martingale pairs whose Q_ij(w) is empty.
  bool prune = true;
  double empty_tol = kGeometryTol;
  SolverOptions solver;
  int threads = 0;  // 0: hardware concurrency

  LbpStrategy strategy = LbpStrategy::kAuto;
  // kAuto builds the full program up to this many martingale blocks.
  std::int64_t monolithic_limit = 20000;
  int initial_samples = 4;   // per (i, j) pair in the first round
  int cuts_per_pair = 4;     // most violated blocks added per pair and round
  double cut_tol = 1e-9;     // block violation treated as satisfied
  int max_rounds = 2000;
};

struct LbpCounts {
  std::int64_t pieces = 0;
  std::int64_t initial = 0;  // |I_0|
  std::int64_t unsafe = 0;   // |I_u|
  std::int64_t safe = 0;     // |I_s|
  std::int64_t samples = 0;  // N
  std::int64_t candidate_pairs = 0;  // N |I_s| pieces
  std::int64_t martingale_blocks = 0;        // in the solved model
  std::int64_t nonempty_blocks = 0;          // in the full program
  std::int64_t pruned_pairs = 0;
  std::int64_t variables = 0;
  std::int64_t constraints = 0;
  std::int64_t nonzeros = 0;
};

struct LbpProblem {
  LpModel model;
  std::vector<RowOrigin> row_origin;  // one per model row
  VarId gamma;
  VarId c;
  VarId first_slope;      // u_i[k] at first_slope + i n + k
  VarId first_intercept;  // v_i at first_intercept + i
  int pieces = 0;
  int dim = 0;
  int horizon = 1;
  ScenarioParams params;
  LbpCounts counts;
  double build_seconds = 0.0;
  SolverOptions solver;

  VarId slope(int i, int k) const { return VarId{first_slope.index + i * dim + k}; }
  VarId intercept(int i) const { return VarId{first_intercept.index + i}; }
};

LbpProblem build_lbp(const PwaSystem& system, const BarrierPartition& partition,
                     const UnsafeDescription& unsafe, const NoiseDataset& data,
                     const ScenarioParams& params, const SynthOptions& options = {});

struct SynthesisResult {
  LpStatus status = LpStatus::kNumericalFailure;
  double gamma = 0.0;
  double c = 0.0;
  BarrierTheta theta;
  double objective = 0.0;  // gamma + c T
  double lp_objective = 0.0;
  double max_violation = 0.0;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
  std::string diagnostic;
  LbpCounts counts;
  bool row_generation = false;
  int rounds = 1;
  double max_block_violation = 0.0;  // over all martingale blocks (row generation)

  bool optimal() const { return status == LpStatus::kOptimal; }
};

SynthesisResult solve_lbp(const LbpProblem& problem);

// Builds and solves the program, choosing the strategy from the options.
SynthesisResult synthesize(const PwaSystem& system, const BarrierPartition& partition,
                           const UnsafeDescription& unsafe, const NoiseDataset& data,
                           const ScenarioParams& params, const SynthOptions& options = {});

// Per-family row counts, e.g. for diagnostics of infeasible models.
std::string family_summary(const LbpProblem& problem);

}  // namespace sbf

#endif  // SBF_SYNTH_HPP_
