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

#include "sbf/certificate.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "sbf/error.hpp"
#include "sbf/transition.hpp"

namespace sbf {

double eval_barrier(const BarrierTheta& theta, std::span<const Polyhedron> pieces,
                    const Vector& x, double tol) {
  if (static_cast<int>(pieces.size()) != theta.pieces()) {
    throw DimensionError("eval_barrier: theta and partition sizes differ");
  }
  bool inside = false;
  double best = -kInf;
  for (int i = 0; i < theta.pieces(); ++i) {
    if (!pieces[i].contains_point(x, tol)) continue;
    inside = true;
    best = std::max(best, theta.piece_value(i, x));
  }
  return inside ? best : 0.0;
}

double eval_barrier(const Certificate& cert, const Vector& x, double tol) {
  return eval_barrier(cert.theta, cert.pieces, x, tol);
}

double safety_bound(double gamma, double c, int T) {
  return std::max(0.0, 1.0 - (gamma + c * T));
}

namespace {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < size; ++k) {
      state_ ^= p[k];
      state_ *= 0x100000001B3ULL;
    }
  }
  void integer(std::int64_t v) { bytes(&v, sizeof v); }
  void real(double v) {
    if (v == 0.0) v = 0.0;  // fold -0
    const auto bits = std::bit_cast<std::uint64_t>(v);
    bytes(&bits, sizeof bits);
  }
  void matrix(const Matrix& m) {
    integer(m.rows());
    integer(m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) real(m(r, c));
    }
  }
  void vector(const Vector& v) {
    integer(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) real(v[k]);
  }
  void polyhedron(const Polyhedron& p) {
    matrix(p.H());
    vector(p.h());
  }
  std::string hex() const {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << state_;
    return os.str();
  }

 private:
  std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

}  // namespace

std::string fingerprint(const PwaSystem& system, std::span<const Polyhedron> pieces,
                        const NoiseDataset& data) {
  Fnv1a hash;
  hash.integer(static_cast<std::int64_t>(pieces.size()));
  for (const Polyhedron& p : pieces) hash.polyhedron(p);
  hash.integer(system.num_regions());
  for (int r = 0; r < system.num_regions(); ++r) {
    hash.polyhedron(system.regions[r]);
    hash.matrix(system.dynamics[r].A);
    hash.vector(system.dynamics[r].b);
  }
  hash.polyhedron(system.initial_set);
  hash.polyhedron(system.safe_set);
  hash.integer(system.horizon);
  hash.integer(data.size());
  for (const Vector& s : data.samples) hash.vector(s);
  return hash.hex();
}

Certificate make_certificate(const SynthesisResult& result, const ScenarioParams& params,
                             int horizon, const BarrierPartition& partition, std::string print,
                             std::uint64_t seed) {
  if (!result.optimal()) throw DomainError("make_certificate: synthesis did not succeed");
  Certificate cert;
  cert.pieces = partition.pieces;
  cert.parent = partition.parent;
  cert.theta = result.theta;
  cert.gamma = result.gamma;
  cert.c = result.c;
  cert.horizon = horizon;
  cert.scenario = params;
  cert.safety_lower_bound = safety_bound(cert.gamma, cert.c, cert.horizon);
  cert.objective = cert.gamma + cert.c * cert.horizon;
  cert.fingerprint = std::move(print);
  cert.seed = seed;
  cert.timings.build_seconds = result.build_seconds;
  cert.timings.solve_seconds = result.solve_seconds;
  return cert;
}

std::string consistency_error(const Certificate& cert) {
  const int pieces = static_cast<int>(cert.pieces.size());
  if (pieces == 0) return "certificate has no pieces";
  const int n = cert.pieces.front().dim();
  if (cert.theta.pieces() != pieces || cert.theta.slopes.rows() != pieces ||
      cert.theta.dim() != n) {
    return "barrier coefficients do not match the partition";
  }
  if (static_cast<int>(cert.parent.size()) != pieces) return "parent map has the wrong length";
  if (cert.horizon < 1) return "horizon must be >= 1";
  if (!std::isfinite(cert.gamma) || !std::isfinite(cert.c)) return "gamma and c must be finite";
  const double bound = safety_bound(cert.gamma, cert.c, cert.horizon);
  if (std::abs(bound - cert.safety_lower_bound) > 1e-12) {
    std::ostringstream os;
    os << std::setprecision(17) << "safety_lower_bound " << cert.safety_lower_bound
       << " does not equal max(0, 1 - (gamma + c T)) = " << bound;
    return os.str();
  }
  const ScenarioParams& s = cert.scenario;
  if (s.d != decision_dimension(pieces, n)) {
    return "scenario d = " + std::to_string(s.d) + " does not match the barrier family";
  }
  const double tail = binomial_tail(s.N, s.eps, s.d);
  if (tail > s.beta * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << std::setprecision(17) << "binomial tail " << tail << " exceeds beta " << s.beta;
    return os.str();
  }
  if (s.delta < tightening_margin(s.eps, s.M) * (1.0 - 1e-12)) {
    return "delta is below eps M / (1 - eps)";
  }
  return {};
}

namespace {

// Folds a subproblem into the family record. Ties keep the earlier origin,
// so the result depends only on the visiting order.
void record(FamilyWorst& fw, const RowOrigin& origin, double value) {
  ++fw.subproblems;
  if (value > fw.worst) {
    fw.worst = value;
    fw.at = origin;
  }
}

double support_value(const Support& s) {
  switch (s.status) {
    case LpStatus::kOptimal:
      return s.value;
    case LpStatus::kUnbounded:
      return kInf;
    case LpStatus::kInfeasible:
      return -kInf;
    case LpStatus::kNumericalFailure:
      break;
  }
  throw SolverError("verification subproblem failed");
}

}  // namespace

VerificationReport verify_certificate(const Certificate& cert, const PwaSystem& system,
                                      const UnsafeDescription& unsafe,
                                      const NoiseDataset& data,
                                      const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (const std::string why = consistency_error(cert); !why.empty()) {
    throw DomainError("inconsistent certificate: " + why);
  }
  const std::string expected = fingerprint(system, cert.pieces, data);
  if (expected != cert.fingerprint) {
    throw DomainError("certificate fingerprint " + cert.fingerprint +
                      " does not match the inputs (" + expected + ")");
  }
  const int pieces = static_cast<int>(cert.pieces.size());
  const BarrierTheta& th = cert.theta;
  const double M = cert.scenario.M;
  const double delta = cert.scenario.delta;

  BarrierPartition bp;
  bp.pieces = cert.pieces;
  bp.parent = cert.parent;
  const IndexSets index = classify_indices(bp, system, unsafe);

  VerificationReport report;
  report.tol = options.tol;
  for (int f = 0; f < 5; ++f) report.families[f].family = static_cast<RowFamily>(f);
  auto& nonneg = report.families[static_cast<int>(RowFamily::kNonNegative)];
  auto& upper = report.families[static_cast<int>(RowFamily::kUpperBound)];
  auto& init = report.families[static_cast<int>(RowFamily::kInitial)];
  auto& uns = report.families[static_cast<int>(RowFamily::kUnsafe)];
  auto& mart = report.families[static_cast<int>(RowFamily::kMartingale)];

  LpSolver solver;
  for (int i = 0; i < pieces; ++i) {
    const Vector u = th.slopes.row(i).transpose();
    const double v = th.intercepts[i];
    record(nonneg, {RowFamily::kNonNegative, i, -1, -1},
           support_value(maximize(cert.pieces[i], -u, solver)) - v);
    record(upper, {RowFamily::kUpperBound, i, -1, -1},
           support_value(maximize(cert.pieces[i], u, solver)) + v - M);
  }
  for (int i : index.initial) {
    const Vector u = th.slopes.row(i).transpose();
    const Polyhedron set = intersect(cert.pieces[i], system.initial_set);
    record(init, {RowFamily::kInitial, i, -1, -1},
           support_value(maximize(set, u, solver)) + th.intercepts[i] - cert.gamma);
  }
  for (int i : index.unsafe) {
    const Vector u = th.slopes.row(i).transpose();
    if (options.paper_literal_unsafe) {
      record(uns, {RowFamily::kUnsafe, i, -1, -1},
             1.0 - th.intercepts[i] + support_value(maximize(cert.pieces[i], -u, solver)));
      continue;
    }
    for (int k = 0; k < static_cast<int>(unsafe.pieces.size()); ++k) {
      if (!meets(cert.pieces[i], unsafe.pieces[k])) continue;
      const Polyhedron set = intersect(cert.pieces[i], unsafe.pieces[k]);
      record(uns, {RowFamily::kUnsafe, i, k, -1},
             1.0 - th.intercepts[i] + support_value(maximize(set, -u, solver)));
    }
  }

  // Martingale family: sup over Q_ij(w) of
  //   (A^T u_j - u_i).x + u_j.(b + eta) + v_j - v_i - c + delta.
  const auto& safe = index.safe;
  std::vector<Polyhedron> sources;
  std::vector<AffineMap> maps;
  for (int i : safe) {
    sources.push_back(options.paper_literal_martingale
                          ? cert.pieces[i]
                          : intersect(cert.pieces[i], system.safe_set));
    maps.push_back(system.dynamics[cert.parent[i]]);
  }
  const TransitionSets ts(std::move(sources), std::move(maps), cert.pieces, data);
  std::vector<FamilyWorst> per_source(safe.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    LpSolver local;
    for (std::size_t s = next++; s < safe.size(); s = next++) {
      try {
        const int si = static_cast<int>(s);
        const int i = safe[s];
        const AffineMap& f = ts.map(si);
        const Vector ui = th.slopes.row(i).transpose();
        FamilyWorst& mine = per_source[s];
        for (int j : ts.candidates(si)) {
          const Vector uj = th.slopes.row(j).transpose();
          const Vector dir = f.A.transpose() * uj - ui;
          for (std::int32_t w = 0; w < data.size(); ++w) {
            double sup;
            if (options.exact_geometry) {
              const Polyhedron q = preimage(ts.source(si), f, data.samples[w], cert.pieces[j]);
              sup = support_value(maximize(q, dir, local));
            } else {
              sup = ts.support(si, j, w, dir, local);
            }
            if (sup == -kInf) continue;
            const double value = sup + uj.dot(f.b + data.samples[w]) + th.intercepts[j] -
                                 th.intercepts[i] - cert.c + delta;
            record(mine, {RowFamily::kMartingale, i, j, w}, value);
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int threads = options.threads > 0 ? options.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max(1, static_cast<int>(safe.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  for (const FamilyWorst& fw : per_source) {
    mart.subproblems += fw.subproblems;
    if (fw.worst > mart.worst) {
      mart.worst = fw.worst;
      mart.at = fw.at;
    }
  }

  report.passed = true;
  for (const FamilyWorst& fw : report.families) {
    if (fw.worst > options.tol) {
      report.passed = false;
      std::ostringstream os;
      os << std::setprecision(6) << to_string(fw.family) << " violation " << fw.worst
         << " at piece " << fw.at.i;
      if (fw.at.j >= 0) os << ", target " << fw.at.j;
      if (fw.at.sample >= 0) os << ", sample " << fw.at.sample;
      report.failure = os.str();
      break;
    }
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string to_json(const VerificationReport& report) {
  nlohmann::ordered_json j;
  j["passed"] = report.passed;
  j["tol"] = report.tol;
  auto& fams = j["families"];
  fams = nlohmann::ordered_json::object();
  for (const FamilyWorst& fw : report.families) {
    nlohmann::ordered_json f;
    f["subproblems"] = fw.subproblems;
    if (fw.subproblems > 0) {
      f["worst_violation"] = fw.worst;
      f["piece"] = fw.at.i;
      if (fw.at.j >= 0) f["target"] = fw.at.j;
      if (fw.at.sample >= 0) f["sample"] = fw.at.sample;
    }
    fams[std::string(to_string(fw.family))] = std::move(f);
  }
  if (!report.failure.empty()) j["failure"] = report.failure;
  return j.dump(2);
}

namespace {

using Rational = boost::multiprecision::cpp_rational;

Rational exact(double x) {
  // Every finite double is a dyadic rational; cpp_rational converts exactly.
  return Rational(x);
}

}  // namespace

bool inner_approx_holds(std::span<const double> g, std::span<const double> p, double h,
                        double eps, double M) {
  if (g.size() != p.size() || g.empty()) throw DimensionError("inner_approx: sizes differ");
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("inner_approx: eps outside [0, 1)");
  Rational total = 0;
  for (double q : p) total += exact(q);
  const Rational e = exact(eps);
  const Rational delta = e * exact(M) / (1 - e);
  Rational satisfied = 0;
  Rational mean = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Rational weight = exact(p[k]) / total;
    if (exact(g[k]) + delta <= exact(h)) satisfied += weight;
    mean += weight * exact(g[k]);
  }
  const bool premise = satisfied >= 1 - e;
  return !premise || mean <= exact(h);
}

InnerApproxReport inner_approx_oracle(int num_cases, std::uint64_t seed) {
  InnerApproxReport out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> support(1, 8);
  std::uniform_int_distribution<int> weight(1, 20);
  for (int c = 0; c < num_cases; ++c) {
    const int K = support(rng);
    const double M = 0.5 + 4.0 * unit(rng);
    const double eps = 0.3 * unit(rng);
    const double delta = eps * M / (1.0 - eps);
    // g(eta) = a.eta + a0 with eta in [0,1]^2, kept within [0, M].
    const double a1 = 0.25 * M * unit(rng);
    const double a2 = 0.25 * M * unit(rng);
    const double a0 = 0.5 * M * unit(rng);
    std::vector<double> g(K), p(K);
    for (int k = 0; k < K; ++k) {
      g[k] = a1 * unit(rng) + a2 * unit(rng) + a0;
      p[k] = weight(rng);
    }
    // Threshold near an order statistic shifted by delta, so that the
    // premise holds in a good share of the cases.
    std::vector<double> sorted = g;
    std::sort(sorted.begin(), sorted.end());
    const double h =
        sorted[std::uniform_int_distribution<int>(0, K - 1)(rng)] + delta +
        (unit(rng) < 0.5 ? 0.0 : 0.1 * M * (unit(rng) - 0.5));
    ++out.cases;
    double sat = 0.0, tot = 0.0;
    for (int k = 0; k < K; ++k) {
      tot += p[k];
      if (g[k] + delta <= h) sat += p[k];
    }
    if (sat >= (1.0 - eps) * tot) ++out.premise_held;
    if (!inner_approx_holds(g, p, h, eps, M)) {
      ++out.counterexamples;
      if (out.first_counterexample.empty()) {
        std::ostringstream os;
        os << std::setprecision(17) << "case " << c << ": eps=" << eps << " M=" << M
           << " h=" << h;
        out.first_counterexample = os.str();
      }
    }
  }
  return out;
}

namespace {

using Json = nlohmann::ordered_json;

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Vector vector_from(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[k] = j[k].get<double>();
  return v;
}

Matrix matrix_from(const Json& j, int cols, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array of rows");
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) {
      throw ConfigError(what + ": row " + std::to_string(r) + " must have " +
                        std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace

void write_certificate(std::ostream& os, const Certificate& cert) {
  Json j;
  j["meta"] = {{"tool_version", cert.tool_version},
               {"fingerprint", cert.fingerprint},
               {"seed", cert.seed}};
  const ScenarioParams& s = cert.scenario;
  j["scenario"] = {{"N", s.N}, {"eps", s.eps}, {"beta", s.beta},
                   {"delta", s.delta}, {"M", s.M}, {"d", s.d}};
  Json pieces = Json::array();
  for (std::size_t i = 0; i < cert.pieces.size(); ++i) {
    Json p;
    p["H"] = matrix_json(cert.pieces[i].H());
    p["h"] = vector_json(cert.pieces[i].h());
    p["u"] = vector_json(cert.theta.slopes.row(static_cast<Eigen::Index>(i)).transpose());
    p["v"] = cert.theta.intercepts[static_cast<Eigen::Index>(i)];
    p["parent"] = cert.parent[i];
    pieces.push_back(std::move(p));
  }
  j["barrier"] = {{"pieces", std::move(pieces)},
                  {"gamma", cert.gamma},
                  {"c", cert.c},
                  {"T", cert.horizon}};
  Json timings = Json::object();
  if (cert.record_timings) {
    timings["build_seconds"] = cert.timings.build_seconds;
    timings["solve_seconds"] = cert.timings.solve_seconds;
    timings["verify_seconds"] = cert.timings.verify_seconds;
  }
  j["result"] = {{"safety_lower_bound", cert.safety_lower_bound},
                 {"objective", cert.objective},
                 {"timings", std::move(timings)}};
  os << j.dump(2) << '\n';
}

Certificate read_certificate(std::istream& is) {
  Json j;
  try {
    j = Json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("certificate: ") + e.what());
  }
  try {
    Certificate cert;
    const Json& meta = j.at("meta");
    cert.tool_version = meta.at("tool_version").get<std::string>();
    cert.fingerprint = meta.at("fingerprint").get<std::string>();
    cert.seed = meta.at("seed").get<std::uint64_t>();
    const Json& s = j.at("scenario");
    cert.scenario.N = s.at("N").get<std::int64_t>();
    cert.scenario.eps = s.at("eps").get<double>();
    cert.scenario.beta = s.at("beta").get<double>();
    cert.scenario.delta = s.at("delta").get<double>();
    cert.scenario.M = s.at("M").get<double>();
    cert.scenario.d = s.at("d").get<std::int64_t>();
    const Json& b = j.at("barrier");
    const Json& pieces = b.at("pieces");
    if (!pieces.is_array() || pieces.empty()) {
      throw ConfigError("certificate: barrier.pieces must be a nonempty array");
    }
    const int n = static_cast<int>(pieces[0].at("u").size());
    cert.theta.slopes.resize(static_cast<Eigen::Index>(pieces.size()), n);
    cert.theta.intercepts.resize(static_cast<Eigen::Index>(pieces.size()));
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const std::string where = "certificate: barrier.pieces[" + std::to_string(i) + "]";
      const Json& p = pieces[i];
      cert.pieces.emplace_back(matrix_from(p.at("H"), n, where + ".H"),
                               vector_from(p.at("h"), where + ".h"));
      const Vector u = vector_from(p.at("u"), where + ".u");
      if (u.size() != n) throw ConfigError(where + ".u has the wrong length");
      cert.theta.slopes.row(static_cast<Eigen::Index>(i)) = u.transpose();
      cert.theta.intercepts[static_cast<Eigen::Index>(i)] = p.at("v").get<double>();
      cert.parent.push_back(p.at("parent").get<int>());
    }
    cert.gamma = b.at("gamma").get<double>();
    cert.c = b.at("c").get<double>();
    cert.horizon = b.at("T").get<int>();
    const Json& r = j.at("result");
    cert.safety_lower_bound = r.at("safety_lower_bound").get<double>();
    cert.objective = r.at("objective").get<double>();
    const Json& t = r.at("timings");
    if (!t.empty()) {
      cert.record_timings = true;
      cert.timings.build_seconds = t.value("build_seconds", 0.0);
      cert.timings.solve_seconds = t.value("solve_seconds", 0.0);
      cert.timings.verify_seconds = t.value("verify_seconds", 0.0);
    }
    return cert;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("certificate: ") + e.what());
  }
}

}  // namespace sbf
