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

#include "sbf/synth.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "sbf/error.hpp"
#include "sbf/transition.hpp"

namespace sbf {

std::string_view to_string(RowFamily family) {
  switch (family) {
    case RowFamily::kNonNegative:
      return "nonnegative";
    case RowFamily::kUpperBound:
      return "upper_bound";
    case RowFamily::kInitial:
      return "initial";
    case RowFamily::kUnsafe:
      return "unsafe";
    case RowFamily::kMartingale:
      return "martingale";
  }
  return "unknown";
}

DualizedRows dualize_robust(std::span<const LinearExpr> a, const LinearExpr& b,
                            const Polyhedron& P, LpModel& model, bool check_nonempty) {
  const int n = P.dim();
  const int m = P.rows();
  if (static_cast<int>(a.size()) != n) {
    throw DimensionError("dualize_robust: slope has " + std::to_string(a.size()) +
                         " entries for a set in dimension " + std::to_string(n));
  }
  if (check_nonempty && is_empty(P)) {
    throw DomainError("dualize_robust: empty polyhedron " + describe(P) +
                      " (empty sets must be pruned by the caller)");
  }
  DualizedRows out;
  out.num_duals = m;
  out.first_dual = model.add_variables(m, 0.0, kInf);

  // h.lambda - b(z) <= 0
  LinearExpr ineq;
  for (int r = 0; r < m; ++r) {
    if (P.h()[r] != 0.0) ineq.add(VarId{out.first_dual.index + r}, P.h()[r]);
  }
  ineq.add(b, -1.0);
  out.inequality = model.add_constraint(ineq, Relation::kLessEqual);

  // H^T lambda - a(z) = 0
  for (int k = 0; k < n; ++k) {
    LinearExpr eq;
    for (int r = 0; r < m; ++r) {
      if (P.H()(r, k) != 0.0) eq.add(VarId{out.first_dual.index + r}, P.H()(r, k));
    }
    eq.add(a[k], -1.0);
    const RowId row = model.add_constraint(eq, Relation::kEqual);
    if (k == 0) out.first_equality = row;
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int worker_count(int requested, std::size_t tasks) {
  int threads = requested > 0 ? requested
                              : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(threads, 1, std::max(1, static_cast<int>(tasks)));
}

// Runs body(k) for k in [0, tasks) on a small pool; body must only touch
// per-task state.
template <typename Body>
void parallel_for(std::size_t tasks, int requested, Body body) {
  const int threads = worker_count(requested, tasks);
  if (threads == 1) {
    for (std::size_t k = 0; k < tasks; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        for (std::size_t k = next++; k < tasks; k = next++) {
          try {
            body(k);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = tasks;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

struct Block {
  std::int32_t j;
  std::int32_t w;
};

class LbpBuilder {
 public:
  LbpBuilder(const PwaSystem& system, const BarrierPartition& partition,
             const UnsafeDescription& unsafe, const NoiseDataset& data,
             const ScenarioParams& params, const SynthOptions& options)
      : system_(system),
        partition_(partition),
        unsafe_(unsafe),
        data_(data),
        params_(params),
        options_(options),
        n_(system.dim()) {
    check_inputs();
    index_ = classify_indices(partition, system, unsafe, options.empty_tol);
  }

  // Variables and every family except the martingale rows.
  LbpProblem base() const {
    LbpProblem p;
    p.pieces = partition_.size();
    p.dim = n_;
    p.horizon = system_.horizon;
    p.params = params_;
    p.solver = options_.solver;

    p.gamma = p.model.add_variable(0.0, params_.M, "gamma");
    p.c = p.model.add_variable(0.0, kInf, "c");
    p.first_slope = VarId{p.model.num_variables()};
    for (int i = 0; i < p.pieces; ++i) {
      for (int k = 0; k < n_; ++k) {
        p.model.add_variable(-kInf, kInf, "u" + std::to_string(i) + "_" + std::to_string(k));
      }
    }
    p.first_intercept = VarId{p.model.num_variables()};
    for (int i = 0; i < p.pieces; ++i) p.model.add_variable(-kInf, kInf, "v" + std::to_string(i));
    p.model.set_objective(p.gamma, 1.0);
    p.model.set_objective(p.c, static_cast<double>(system_.horizon));

    const IndexSets& index = index_;
    // B_i >= 0 and B_i <= M on every piece.
    for (int i = 0; i < p.pieces; ++i) {
      add(p, {RowFamily::kNonNegative, i, -1, -1}, slope_exprs(p, i, -1.0),
          LinearExpr(p.intercept(i), 1.0), partition_.pieces[i]);
    }
    for (int i = 0; i < p.pieces; ++i) {
      LinearExpr b(params_.M);
      b.add(p.intercept(i), -1.0);
      add(p, {RowFamily::kUpperBound, i, -1, -1}, slope_exprs(p, i, 1.0), b,
          partition_.pieces[i]);
    }
    // B_i <= gamma on piece i within X0.
    for (int i : index.initial) {
      LinearExpr b(p.gamma, 1.0);
      b.add(p.intercept(i), -1.0);
      add(p, {RowFamily::kInitial, i, -1, -1}, slope_exprs(p, i, 1.0), b,
          merge_parallel_rows(intersect(partition_.pieces[i], system_.initial_set)));
    }
    // B_i >= 1 on piece i within Xu.
    for (int i : index.unsafe) {
      LinearExpr b(-1.0);
      b.add(p.intercept(i), 1.0);
      if (options_.paper_literal_unsafe) {
        add(p, {RowFamily::kUnsafe, i, -1, -1}, slope_exprs(p, i, -1.0), b,
            partition_.pieces[i]);
        continue;
      }
      for (int k = 0; k < static_cast<int>(unsafe_.pieces.size()); ++k) {
        if (!meets(partition_.pieces[i], unsafe_.pieces[k], options_.empty_tol)) continue;
        add(p, {RowFamily::kUnsafe, i, k, -1}, slope_exprs(p, i, -1.0), b,
            merge_parallel_rows(intersect(partition_.pieces[i], unsafe_.pieces[k])));
      }
    }
    p.counts.pieces = p.pieces;
    p.counts.initial = static_cast<std::int64_t>(index.initial.size());
    p.counts.unsafe = static_cast<std::int64_t>(index.unsafe.size());
    p.counts.safe = static_cast<std::int64_t>(index.safe.size());
    p.counts.samples = data_.size();
    p.counts.candidate_pairs = p.counts.samples * p.counts.safe * p.pieces;
    return p;
  }

  // Q_ij(w) for every i in I_s, indexed by position in I_s.
  TransitionSets transitions() const {
    std::vector<Polyhedron> sources;
    std::vector<AffineMap> maps;
    for (int i : index_.safe) {
      sources.push_back(options_.paper_literal_martingale
                            ? partition_.pieces[i]
                            : merge_parallel_rows(intersect(partition_.pieces[i], system_.safe_set)));
      maps.push_back(system_.dynamics[partition_.parent[i]]);
    }
    return TransitionSets(std::move(sources), std::move(maps), partition_.pieces, data_,
                          options_.empty_tol);
  }

  // B_j(A x + b + eta) + delta <= B_i(x) + c on `set`.
  void add_martingale(LbpProblem& p, int s, int j, int w, const Polyhedron& set) const {
    const int i = index_.safe[s];
    const AffineMap& f = system_.dynamics[partition_.parent[i]];
    const Vector& eta = data_.samples[w];
    // a(z) = A^T u_j - u_i
    std::vector<LinearExpr> slope(n_);
    for (int k = 0; k < n_; ++k) {
      for (int r = 0; r < n_; ++r) {
        if (f.A(r, k) != 0.0) slope[k].add(p.slope(j, r), f.A(r, k));
      }
      slope[k].add(p.slope(i, k), -1.0);
    }
    // b(z) = v_i - v_j - u_j.(b + eta) + c - delta
    LinearExpr b(-params_.delta);
    b.add(p.intercept(i), 1.0).add(p.intercept(j), -1.0).add(p.c, 1.0);
    const Vector offset = f.b + eta;
    for (int r = 0; r < n_; ++r) {
      if (offset[r] != 0.0) b.add(p.slope(j, r), -offset[r]);
    }
    add(p, {RowFamily::kMartingale, i, j, w}, slope, b, set);
    ++p.counts.martingale_blocks;
  }

  void finish_counts(LbpProblem& p) const {
    p.counts.variables = p.model.num_variables();
    p.counts.constraints = p.model.num_constraints();
    p.counts.nonzeros = static_cast<std::int64_t>(p.model.num_nonzeros());
  }

  const BarrierPartition& partition() const { return partition_; }
  const IndexSets& index() const { return index_; }
  const PwaSystem& system() const { return system_; }
  const NoiseDataset& data() const { return data_; }
  const SynthOptions& options() const { return options_; }

 private:
  void check_inputs() const {
    if (data_.empty()) throw DomainError("build_lbp: no noise samples");
    if (data_.dim() != n_) {
      throw DimensionError("noise samples have dimension " + std::to_string(data_.dim()) +
                           ", system has " + std::to_string(n_));
    }
    if (partition_.dim() != n_) throw DimensionError("partition dimension mismatch");
    if (static_cast<int>(partition_.parent.size()) != partition_.size()) {
      throw DimensionError("partition parent map has the wrong length");
    }
    if (!(params_.M >= 1.0)) throw DomainError("build_lbp: M must be >= 1");
    if (params_.delta < tightening_margin(params_.eps, params_.M) * (1.0 - 1e-12)) {
      throw DomainError("build_lbp: delta below eps*M/(1-eps)");
    }
    if (params_.d != decision_dimension(partition_.size(), n_)) {
      throw DomainError("build_lbp: scenario d = " + std::to_string(params_.d) +
                        " but the barrier family has " +
                        std::to_string(decision_dimension(partition_.size(), n_)) +
                        " decision variables");
    }
    if (params_.N != data_.size()) {
      throw DomainError("build_lbp: scenario N = " + std::to_string(params_.N) + " but " +
                        std::to_string(data_.size()) + " samples were given");
    }
  }

  std::vector<LinearExpr> slope_exprs(const LbpProblem& p, int i, double sign) const {
    std::vector<LinearExpr> out(n_);
    for (int k = 0; k < n_; ++k) out[k] = LinearExpr(p.slope(i, k), sign);
    return out;
  }

  static void add(LbpProblem& p, RowOrigin origin, std::span<const LinearExpr> a,
                  const LinearExpr& b, const Polyhedron& set) {
    dualize_robust(a, b, set, p.model, /*check_nonempty=*/false);
    p.row_origin.resize(static_cast<std::size_t>(p.model.num_constraints()), origin);
  }

  const PwaSystem& system_;
  const BarrierPartition& partition_;
  IndexSets index_;
  const UnsafeDescription& unsafe_;
  const NoiseDataset& data_;
  const ScenarioParams& params_;
  const SynthOptions& options_;
  const int n_;
};

// Nonempty blocks of every source, in (j, w) order.
std::vector<std::vector<Block>> nonempty_blocks(const TransitionSets& ts, int threads) {
  const std::size_t S = static_cast<std::size_t>(ts.num_sources());
  std::vector<std::vector<Block>> out(S);
  parallel_for(S, threads, [&](std::size_t s) {
    LpSolver solver;
    const int si = static_cast<int>(s);
    for (int j : ts.candidates(si)) {
      for (std::int32_t w = 0; w < ts.num_samples(); ++w) {
        if (ts.nonempty(si, j, w, solver)) out[s].push_back({j, w});
      }
    }
  });
  return out;
}

LbpProblem build_monolithic(const LbpBuilder& builder, const TransitionSets& ts) {
  const auto start = Clock::now();
  LbpProblem p = builder.base();
  const SynthOptions& options = builder.options();
  const int S = ts.num_sources();
  if (options.prune) {
    const auto blocks = nonempty_blocks(ts, options.threads);
    for (int s = 0; s < S; ++s) {
      for (const Block& b : blocks[s]) builder.add_martingale(p, s, b.j, b.w, ts.set(s, b.j, b.w));
    }
    p.counts.nonempty_blocks = p.counts.martingale_blocks;
    p.counts.pruned_pairs = p.counts.candidate_pairs - p.counts.martingale_blocks;
  } else {
    for (int s = 0; s < S; ++s) {
      for (int j = 0; j < ts.num_targets(); ++j) {
        for (std::int32_t w = 0; w < ts.num_samples(); ++w) {
          builder.add_martingale(p, s, j, w, ts.set(s, j, w));
        }
      }
    }
    p.counts.nonempty_blocks = -1;  // not determined
  }
  builder.finish_counts(p);
  p.build_seconds = seconds_since(start);
  return p;
}

SynthesisResult extract(const LbpProblem& problem, const LpSolution& sol) {
  SynthesisResult out;
  out.status = sol.status;
  out.counts = problem.counts;
  if (!sol.optimal()) {
    out.diagnostic = "LP " + std::string(to_string(sol.status)) +
                     (sol.message.empty() ? "" : " (" + sol.message + ")") +
                     "; rows by family: " + family_summary(problem);
    return out;
  }
  const double tol = problem.solver.feasibility_tol;
  out.gamma = std::clamp(sol.value(problem.gamma), 0.0, problem.params.M + tol);
  out.c = std::max(0.0, sol.value(problem.c));
  out.theta.slopes.resize(problem.pieces, problem.dim);
  out.theta.intercepts.resize(problem.pieces);
  for (int i = 0; i < problem.pieces; ++i) {
    for (int k = 0; k < problem.dim; ++k) out.theta.slopes(i, k) = sol.value(problem.slope(i, k));
    out.theta.intercepts[i] = sol.value(problem.intercept(i));
  }
  out.objective = out.gamma + out.c * problem.horizon;
  out.lp_objective = sol.objective;
  out.max_violation = sol.max_violation;
  return out;
}

struct Cut {
  double violation;
  std::int32_t j;
  std::int32_t w;
};

// Most violated blocks of one source at the current iterate, at most
// `per_pair` per target, in (j, w) order. Also reports the largest violation
// and, when requested, the number of nonempty blocks.
struct ScanResult {
  std::vector<Cut> cuts;
  double worst = -kInf;
  std::int64_t nonempty = 0;
};

ScanResult scan_source(const TransitionSets& ts, int s, int i, const SynthesisResult& z,
                       double delta, const std::vector<std::vector<std::uint8_t>>& in_model,
                       const std::vector<int>& cand_offset, int per_pair, double cut_tol,
                       LpSolver& solver) {
  ScanResult out;
  const AffineMap& f = ts.map(s);
  const Vector ui = z.theta.slopes.row(i).transpose();
  const double vi = z.theta.intercepts[i];
  const auto& cands = ts.candidates(s);
  std::vector<Cut> best;
  for (std::size_t ci = 0; ci < cands.size(); ++ci) {
    const int j = cands[ci];
    const Vector uj = z.theta.slopes.row(j).transpose();
    const Vector dir = f.A.transpose() * uj - ui;
    const double base = uj.dot(f.b) + z.theta.intercepts[j] - vi - z.c + delta;
    const auto& flags = in_model[cand_offset[s] + ci];
    best.clear();
    for (std::int32_t w = 0; w < ts.num_samples(); ++w) {
      const double sup = ts.support(s, j, w, dir, solver);
      if (sup == -kInf) continue;
      ++out.nonempty;
      const double violation = sup + base + uj.dot(ts.sample(w));
      out.worst = std::max(out.worst, violation);
      if (flags[w] || violation <= cut_tol) continue;
      if (static_cast<int>(best.size()) < per_pair) {
        best.push_back({violation, j, w});
        std::push_heap(best.begin(), best.end(),
                       [](const Cut& a, const Cut& b) { return a.violation > b.violation; });
      } else if (violation > best.front().violation) {
        std::pop_heap(best.begin(), best.end(),
                      [](const Cut& a, const Cut& b) { return a.violation > b.violation; });
        best.back() = {violation, j, w};
        std::push_heap(best.begin(), best.end(),
                       [](const Cut& a, const Cut& b) { return a.violation > b.violation; });
      }
    }
    std::sort(best.begin(), best.end(), [](const Cut& a, const Cut& b) { return a.w < b.w; });
    out.cuts.insert(out.cuts.end(), best.begin(), best.end());
  }
  return out;
}

SynthesisResult solve_row_generation(const LbpBuilder& builder, const TransitionSets& ts,
                                     const ScenarioParams& params) {
  const auto start = Clock::now();
  const SynthOptions& options = builder.options();
  const auto& safe = builder.index().safe;
  const int S = ts.num_sources();
  LbpProblem p = builder.base();

  // One flag per (source, candidate target, sample): block already in the model.
  std::vector<int> cand_offset(S + 1, 0);
  for (int s = 0; s < S; ++s) {
    cand_offset[s + 1] = cand_offset[s] + static_cast<int>(ts.candidates(s).size());
  }
  std::vector<std::vector<std::uint8_t>> in_model(
      cand_offset[S], std::vector<std::uint8_t>(static_cast<std::size_t>(ts.num_samples()), 0));

  LpSolver seed_solver;
  for (int s = 0; s < S; ++s) {
    const auto& cands = ts.candidates(s);
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
      int added = 0;
      for (std::int32_t w = 0; w < ts.num_samples() && added < options.initial_samples; ++w) {
        if (!ts.nonempty(s, cands[ci], w, seed_solver)) continue;
        builder.add_martingale(p, s, cands[ci], w, ts.set(s, cands[ci], w));
        in_model[cand_offset[s] + ci][w] = 1;
        ++added;
      }
    }
  }
  const double build_seconds = seconds_since(start);

  LpSolver solver(options.solver);
  LpSolution sol = solver.solve(p.model);
  SynthesisResult z;
  int rounds = 1;
  std::int64_t nonempty_total = -1;
  while (true) {
    z = extract(p, sol);
    if (!z.optimal()) break;
    std::vector<ScanResult> scans(static_cast<std::size_t>(S));
    parallel_for(static_cast<std::size_t>(S), options.threads, [&](std::size_t s) {
      LpSolver local;
      const int si = static_cast<int>(s);
      scans[s] = scan_source(ts, si, safe[s], z, params.delta, in_model, cand_offset,
                             options.cuts_per_pair, options.cut_tol, local);
    });
    double worst = -kInf;
    std::int64_t nonempty = 0;
    std::size_t cuts = 0;
    for (const ScanResult& r : scans) {
      worst = std::max(worst, r.worst);
      nonempty += r.nonempty;
      cuts += r.cuts.size();
    }
    if (nonempty_total < 0) nonempty_total = nonempty;
    z.max_block_violation = worst;
    if (cuts == 0) break;
    if (rounds >= options.max_rounds) {
      z.status = LpStatus::kNumericalFailure;
      z.diagnostic = "row generation did not converge in " + std::to_string(rounds) + " rounds";
      break;
    }
    const std::int32_t first_row = p.model.num_constraints();
    const std::int32_t first_var = p.model.num_variables();
    for (int s = 0; s < S; ++s) {
      const auto& cands = ts.candidates(s);
      for (const Cut& cut : scans[s].cuts) {
        const auto ci = std::lower_bound(cands.begin(), cands.end(), cut.j) - cands.begin();
        in_model[cand_offset[s] + ci][cut.w] = 1;
        builder.add_martingale(p, s, cut.j, cut.w, ts.set(s, cut.j, cut.w));
      }
    }
    solver.append_rows(p.model, first_row, first_var);
    sol = solver.resolve(p.model);
    ++rounds;
  }
  builder.finish_counts(p);
  p.counts.nonempty_blocks = nonempty_total;
  p.counts.pruned_pairs =
      nonempty_total < 0 ? 0 : p.counts.candidate_pairs - nonempty_total;
  z.counts = p.counts;
  z.row_generation = true;
  z.rounds = rounds;
  z.build_seconds = build_seconds;
  z.solve_seconds = seconds_since(start) - build_seconds;
  return z;
}

}  // namespace

LbpProblem build_lbp(const PwaSystem& system, const BarrierPartition& partition,
                     const UnsafeDescription& unsafe, const NoiseDataset& data,
                     const ScenarioParams& params, const SynthOptions& options) {
  const LbpBuilder builder(system, partition, unsafe, data, params, options);
  return build_monolithic(builder, builder.transitions());
}

std::string family_summary(const LbpProblem& problem) {
  std::map<RowFamily, std::int64_t> rows;
  for (const RowOrigin& o : problem.row_origin) ++rows[o.family];
  std::ostringstream os;
  bool first = true;
  for (const auto& [family, count] : rows) {
    os << (first ? "" : ", ") << to_string(family) << '=' << count;
    first = false;
  }
  return os.str();
}

SynthesisResult solve_lbp(const LbpProblem& problem) {
  const auto start = Clock::now();
  const LpSolution sol = solve(problem.model, problem.solver);
  SynthesisResult out = extract(problem, sol);
  out.build_seconds = problem.build_seconds;
  out.solve_seconds = seconds_since(start);
  return out;
}

SynthesisResult synthesize(const PwaSystem& system, const BarrierPartition& partition,
                           const UnsafeDescription& unsafe, const NoiseDataset& data,
                           const ScenarioParams& params, const SynthOptions& options) {
  const LbpBuilder builder(system, partition, unsafe, data, params, options);
  const TransitionSets ts = builder.transitions();
  bool row_generation = options.strategy == LbpStrategy::kRowGeneration;
  if (options.strategy == LbpStrategy::kAuto) {
    std::int64_t candidates = 0;
    for (int s = 0; s < ts.num_sources(); ++s) {
      candidates += static_cast<std::int64_t>(ts.candidates(s).size()) * ts.num_samples();
    }
    row_generation = candidates > options.monolithic_limit;
  }
  if (row_generation && !options.prune) {
    throw DomainError("row generation requires pruning of empty blocks");
  }
  if (row_generation) return solve_row_generation(builder, ts, params);
  return solve_lbp(build_monolithic(builder, ts));
}

}  // namespace sbf
