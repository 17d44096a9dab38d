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

#include "sbf/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sbf/error.hpp"

namespace sbf {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config " + (path.empty() ? std::string("/") : path) + ": " + what);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) fail(path + "/" + key, "unknown field");
  }
}

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path + "/" + key, "missing");
  return j.at(key);
}

// A number, or one of the strings "inf", "+inf", "-inf".
double number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  fail(path, "expected a number or \"inf\"/\"-inf\"");
}

std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

double finite(const json& j, const std::string& path) {
  const double x = number(j, path);
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

Vector vector_of(const json& j, const std::string& path, int n, bool allow_inf) {
  if (!j.is_array()) fail(path, "expected an array");
  if (n >= 0 && static_cast<int>(j.size()) != n) {
    fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  }
  Vector v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = path + "/" + std::to_string(k);
    v[static_cast<Eigen::Index>(k)] = allow_inf ? number(j[k], p) : finite(j[k], p);
  }
  return v;
}

Matrix matrix_of(const json& j, const std::string& path, int cols) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    m.row(static_cast<Eigen::Index>(r)) =
        vector_of(j[r], path + "/" + std::to_string(r), cols, false).transpose();
  }
  return m;
}

Polyhedron set_of(const json& j, const std::string& path, int n) {
  if (!j.is_object()) fail(path, "expected a set");
  if (j.contains("H") || j.contains("h")) {
    check_keys(j, path, {"H", "h"});
    Matrix H = matrix_of(require(j, path, "H"), path + "/H", n);
    Vector h = vector_of(require(j, path, "h"), path + "/h", static_cast<int>(H.rows()), false);
    return Polyhedron(std::move(H), std::move(h));
  }
  check_keys(j, path, {"lower", "upper"});
  const Vector lo = vector_of(require(j, path, "lower"), path + "/lower", n, true);
  const Vector hi = vector_of(require(j, path, "upper"), path + "/upper", n, true);
  for (int k = 0; k < n; ++k) {
    if (lo[k] > hi[k]) fail(path, "lower exceeds upper on axis " + std::to_string(k));
  }
  return Polyhedron::box(lo, hi);
}

int scenario_fields(const ScenarioRequest& r) {
  return (r.eps ? 1 : 0) + (r.N ? 1 : 0) + (r.beta ? 1 : 0);
}

ScenarioRequest scenario_of(const json& j, const std::string& path) {
  check_keys(j, path, {"eps", "N", "beta", "M", "delta"});
  ScenarioRequest r;
  if (j.contains("eps")) r.eps = finite(j["eps"], path + "/eps");
  if (j.contains("N")) r.N = integer(j["N"], path + "/N");
  if (j.contains("beta")) r.beta = finite(j["beta"], path + "/beta");
  if (j.contains("M")) r.M = finite(j["M"], path + "/M");
  if (j.contains("delta")) r.delta = finite(j["delta"], path + "/delta");
  if (scenario_fields(r) == 3) {
    fail(path, "eps, N and beta are all given; give exactly two of them");
  }
  if (r.eps && !(*r.eps > 0.0 && *r.eps < 1.0)) fail(path + "/eps", "must lie in (0, 1)");
  if (r.beta && !(*r.beta > 0.0 && *r.beta < 1.0)) fail(path + "/beta", "must lie in (0, 1)");
  if (r.N && *r.N < 1) fail(path + "/N", "must be positive");
  if (!(r.M >= 1.0)) fail(path + "/M", "must be >= 1");
  return r;
}

LpAlgorithm algorithm_of(const json& j, const std::string& path) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "auto") return LpAlgorithm::kAuto;
  if (s == "dual") return LpAlgorithm::kDualSimplex;
  if (s == "primal") return LpAlgorithm::kPrimalSimplex;
  if (s == "ipm") return LpAlgorithm::kInteriorPoint;
  fail(path, "expected one of \"auto\", \"dual\", \"primal\", \"ipm\"");
}

std::string algorithm_name(LpAlgorithm a) {
  switch (a) {
    case LpAlgorithm::kAuto:
      return "auto";
    case LpAlgorithm::kDualSimplex:
      return "dual";
    case LpAlgorithm::kPrimalSimplex:
      return "primal";
    case LpAlgorithm::kInteriorPoint:
      return "ipm";
  }
  return "auto";
}

LbpStrategy strategy_of(const json& j, const std::string& path) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "auto") return LbpStrategy::kAuto;
  if (s == "monolithic") return LbpStrategy::kMonolithic;
  if (s == "row_generation") return LbpStrategy::kRowGeneration;
  fail(path, "expected one of \"auto\", \"monolithic\", \"row_generation\"");
}

std::string strategy_name(LbpStrategy s) {
  switch (s) {
    case LbpStrategy::kAuto:
      return "auto";
    case LbpStrategy::kMonolithic:
      return "monolithic";
    case LbpStrategy::kRowGeneration:
      return "row_generation";
  }
  return "auto";
}

ordered_json number_json(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return x;
}

ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(number_json(v[k]));
  return out;
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

ordered_json set_json(const Polyhedron& P) {
  if (P.is_axis_aligned()) {
    const Box b = bounding_box(P);
    if (!b.empty()) return {{"lower", vector_json(b.lower)}, {"upper", vector_json(b.upper)}};
  }
  return {{"H", matrix_json(P.H())}, {"h", vector_json(P.h())}};
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(root, "", {"name", "system", "barrier", "scenario", "noise", "seed", "solver",
                        "options", "simulation", "notes"});
  RunConfig cfg;
  if (root.contains("name")) {
    if (!root["name"].is_string()) fail("/name", "expected a string");
    cfg.name = root["name"].get<std::string>();
  }

  const json& sys = require(root, "", "system");
  check_keys(sys, "/system",
             {"dim", "regions", "initial_set", "safe_set", "unsafe_pieces", "horizon"});
  const std::int64_t n64 = integer(require(sys, "/system", "dim"), "/system/dim");
  if (n64 < 1 || n64 > 64) fail("/system/dim", "must lie in [1, 64]");
  const int n = static_cast<int>(n64);
  const json& regions = require(sys, "/system", "regions");
  if (!regions.is_array() || regions.empty()) fail("/system/regions", "expected a nonempty array");
  for (std::size_t q = 0; q < regions.size(); ++q) {
    const std::string p = "/system/regions/" + std::to_string(q);
    check_keys(regions[q], p, {"set", "A", "b"});
    Polyhedron region = regions[q].contains("set") ? set_of(regions[q]["set"], p + "/set", n)
                                                   : Polyhedron::whole_space(n);
    Matrix A = matrix_of(require(regions[q], p, "A"), p + "/A", n);
    if (A.rows() != n) fail(p + "/A", "expected a square matrix");
    Vector b = vector_of(require(regions[q], p, "b"), p + "/b", n, false);
    cfg.system.regions.push_back(std::move(region));
    cfg.system.dynamics.emplace_back(std::move(A), std::move(b));
  }
  cfg.system.initial_set =
      set_of(require(sys, "/system", "initial_set"), "/system/initial_set", n);
  cfg.system.safe_set = set_of(require(sys, "/system", "safe_set"), "/system/safe_set", n);
  const std::int64_t T = integer(require(sys, "/system", "horizon"), "/system/horizon");
  if (T < 1) fail("/system/horizon", "must be >= 1");
  cfg.system.horizon = static_cast<int>(T);
  if (sys.contains("unsafe_pieces")) {
    const json& u = sys["unsafe_pieces"];
    if (!u.is_array() || u.empty()) fail("/system/unsafe_pieces", "expected a nonempty array");
    for (std::size_t k = 0; k < u.size(); ++k) {
      cfg.unsafe.pieces.push_back(set_of(u[k], "/system/unsafe_pieces/" + std::to_string(k), n));
    }
  } else {
    cfg.unsafe = unsafe_complement(cfg.system.safe_set);
  }

  const json& bar = require(root, "", "barrier");
  check_keys(bar, "/barrier", {"grid", "pieces", "split_along_regions"});
  if (bar.contains("grid") == bar.contains("pieces")) {
    fail("/barrier", "give exactly one of grid and pieces");
  }
  if (bar.contains("grid")) {
    const json& g = bar["grid"];
    if (!g.is_array() || static_cast<int>(g.size()) != n) {
      fail("/barrier/grid", "expected one breakpoint list per axis");
    }
    GridSpec grid;
    for (int k = 0; k < n; ++k) {
      const Vector v = vector_of(g[k], "/barrier/grid/" + std::to_string(k), -1, true);
      grid.breakpoints.emplace_back(v.data(), v.data() + v.size());
    }
    cfg.grid = std::move(grid);
  } else {
    const json& pcs = bar["pieces"];
    if (!pcs.is_array() || pcs.empty()) fail("/barrier/pieces", "expected a nonempty array");
    for (std::size_t i = 0; i < pcs.size(); ++i) {
      cfg.pieces.push_back(set_of(pcs[i], "/barrier/pieces/" + std::to_string(i), n));
    }
  }
  if (bar.contains("split_along_regions")) {
    if (!bar["split_along_regions"].is_boolean()) {
      fail("/barrier/split_along_regions", "expected a boolean");
    }
    cfg.partition.split_along_regions = bar["split_along_regions"].get<bool>();
  }

  cfg.scenario = scenario_of(require(root, "", "scenario"), "/scenario");

  const json& noise = require(root, "", "noise");
  check_keys(noise, "/noise", {"samples", "gaussian"});
  if (noise.contains("samples") == noise.contains("gaussian")) {
    fail("/noise", "give exactly one of samples and gaussian");
  }
  if (noise.contains("samples")) {
    if (!noise["samples"].is_string()) fail("/noise/samples", "expected a path");
    std::filesystem::path p(noise["samples"].get<std::string>());
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p)) fail("/noise/samples", "file not found: " + p.string());
    cfg.noise.samples_path = p.string();
  } else {
    const json& g = noise["gaussian"];
    check_keys(g, "/noise/gaussian", {"sigma", "mean"});
    GaussianNoise gen;
    gen.sigma = vector_of(require(g, "/noise/gaussian", "sigma"), "/noise/gaussian/sigma", n,
                          false);
    if ((gen.sigma.array() < 0.0).any()) fail("/noise/gaussian/sigma", "must be >= 0");
    gen.mean = g.contains("mean")
                   ? vector_of(g["mean"], "/noise/gaussian/mean", n, false)
                   : Vector::Zero(n);
    cfg.noise.gaussian = std::move(gen);
  }
  if (!cfg.noise.samples_path && scenario_fields(cfg.scenario) != 2) {
    fail("/scenario", "give exactly two of eps, N, beta");
  }
  if (cfg.noise.samples_path && scenario_fields(cfg.scenario) == 0) {
    fail("/scenario", "give eps or beta together with a samples file");
  }

  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) fail("/seed", "expected an unsigned integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    check_keys(s, "/solver", {"feasibility_tol", "algorithm", "time_limit"});
    if (s.contains("feasibility_tol")) {
      cfg.synth.solver.feasibility_tol = finite(s["feasibility_tol"], "/solver/feasibility_tol");
    }
    if (s.contains("algorithm")) {
      cfg.synth.solver.algorithm = algorithm_of(s["algorithm"], "/solver/algorithm");
    }
    if (s.contains("time_limit")) {
      cfg.synth.solver.time_limit_seconds = number(s["time_limit"], "/solver/time_limit");
    }
  }

  if (root.contains("options")) {
    const json& o = root["options"];
    check_keys(o, "/options",
               {"paper_literal_unsafe", "paper_literal_martingale", "prune", "strategy",
                "threads", "verify_tol", "monolithic_limit"});
    auto flag = [&](const char* key, bool& out) {
      if (!o.contains(key)) return;
      if (!o[key].is_boolean()) fail(std::string("/options/") + key, "expected a boolean");
      out = o[key].get<bool>();
    };
    flag("paper_literal_unsafe", cfg.synth.paper_literal_unsafe);
    flag("paper_literal_martingale", cfg.synth.paper_literal_martingale);
    flag("prune", cfg.synth.prune);
    if (o.contains("strategy")) cfg.synth.strategy = strategy_of(o["strategy"], "/options/strategy");
    if (o.contains("threads")) {
      cfg.synth.threads = static_cast<int>(integer(o["threads"], "/options/threads"));
    }
    if (o.contains("verify_tol")) cfg.verify_tol = finite(o["verify_tol"], "/options/verify_tol");
    if (o.contains("monolithic_limit")) {
      cfg.synth.monolithic_limit = integer(o["monolithic_limit"], "/options/monolithic_limit");
    }
  }

  if (root.contains("simulation")) {
    const json& s = root["simulation"];
    check_keys(s, "/simulation", {"trials", "grid_per_axis"});
    if (s.contains("trials")) cfg.sim_trials = integer(s["trials"], "/simulation/trials");
    if (s.contains("grid_per_axis")) {
      cfg.sim_grid_per_axis =
          static_cast<int>(integer(s["grid_per_axis"], "/simulation/grid_per_axis"));
    }
    if (cfg.sim_trials < 1) fail("/simulation/trials", "must be positive");
    if (cfg.sim_grid_per_axis < 1) fail("/simulation/grid_per_axis", "must be positive");
  }

  if (root.contains("notes")) {
    if (!root["notes"].is_array()) fail("/notes", "expected an array of strings");
    for (const json& s : root["notes"]) {
      if (!s.is_string()) fail("/notes", "expected an array of strings");
      cfg.notes.push_back(s.get<std::string>());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::filesystem::path p(path);
  return parse_config(buffer.str(), p.has_parent_path() ? p.parent_path().string() : ".");
}

std::string config_to_json(const RunConfig& cfg) {
  const PwaSystem& sys = cfg.system;
  ordered_json root;
  root["name"] = cfg.name;
  ordered_json s;
  s["dim"] = sys.dim();
  s["regions"] = ordered_json::array();
  for (int q = 0; q < sys.num_regions(); ++q) {
    ordered_json r;
    r["set"] = set_json(sys.regions[q]);
    r["A"] = matrix_json(sys.dynamics[q].A);
    r["b"] = vector_json(sys.dynamics[q].b);
    s["regions"].push_back(std::move(r));
  }
  s["initial_set"] = set_json(sys.initial_set);
  s["safe_set"] = set_json(sys.safe_set);
  s["unsafe_pieces"] = ordered_json::array();
  for (const Polyhedron& u : cfg.unsafe.pieces) s["unsafe_pieces"].push_back(set_json(u));
  s["horizon"] = sys.horizon;
  root["system"] = std::move(s);

  ordered_json bar;
  if (cfg.grid) {
    bar["grid"] = ordered_json::array();
    for (const auto& axis : cfg.grid->breakpoints) {
      ordered_json a = ordered_json::array();
      for (double x : axis) a.push_back(number_json(x));
      bar["grid"].push_back(std::move(a));
    }
  } else {
    bar["pieces"] = ordered_json::array();
    for (const Polyhedron& p : cfg.pieces) bar["pieces"].push_back(set_json(p));
  }
  bar["split_along_regions"] = cfg.partition.split_along_regions;
  root["barrier"] = std::move(bar);

  ordered_json sc;
  if (cfg.scenario.eps) sc["eps"] = *cfg.scenario.eps;
  if (cfg.scenario.N) sc["N"] = *cfg.scenario.N;
  if (cfg.scenario.beta) sc["beta"] = *cfg.scenario.beta;
  sc["M"] = cfg.scenario.M;
  if (cfg.scenario.delta) sc["delta"] = *cfg.scenario.delta;
  root["scenario"] = std::move(sc);

  if (cfg.noise.samples_path) {
    root["noise"] = {{"samples", *cfg.noise.samples_path}};
  } else if (cfg.noise.gaussian) {
    root["noise"] = {{"gaussian",
                      {{"sigma", vector_json(cfg.noise.gaussian->sigma)},
                       {"mean", vector_json(cfg.noise.gaussian->mean)}}}};
  }
  root["seed"] = cfg.seed;
  ordered_json solver;
  solver["feasibility_tol"] = cfg.synth.solver.feasibility_tol;
  solver["algorithm"] = algorithm_name(cfg.synth.solver.algorithm);
  if (std::isfinite(cfg.synth.solver.time_limit_seconds)) {
    solver["time_limit"] = cfg.synth.solver.time_limit_seconds;
  }
  root["solver"] = std::move(solver);
  root["options"] = {{"paper_literal_unsafe", cfg.synth.paper_literal_unsafe},
                     {"paper_literal_martingale", cfg.synth.paper_literal_martingale},
                     {"prune", cfg.synth.prune},
                     {"strategy", strategy_name(cfg.synth.strategy)},
                     {"verify_tol", cfg.verify_tol}};
  root["simulation"] = {{"trials", cfg.sim_trials}, {"grid_per_axis", cfg.sim_grid_per_axis}};
  if (!cfg.notes.empty()) root["notes"] = cfg.notes;
  return root.dump(2) + "\n";
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.pieces) {
    // Only presets know how to re-partition; the caller rebuilds them.
    if (cfg.name.rfind("vehicle", 0) != 0) {
      throw ConfigError("--pieces: only the vehicle preset has a piece-count family");
    }
  }
  if (o.samples_path) {
    if (!std::filesystem::exists(*o.samples_path)) {
      throw ConfigError("--samples: file not found: " + *o.samples_path);
    }
    cfg.noise.samples_path = *o.samples_path;
    cfg.noise.gaussian.reset();
  }
  if (o.seed) cfg.seed = *o.seed;
  ScenarioRequest& r = cfg.scenario;
  if (o.eps) r.eps = *o.eps;
  if (o.beta) r.beta = *o.beta;
  if (o.n_samples) r.N = *o.n_samples;
  // Command-line fields win; config fields are dropped beta first, then
  // eps, then N until at most two remain.
  if (scenario_fields(r) == 3 && !o.beta) r.beta.reset();
  if (scenario_fields(r) == 3 && !o.eps) r.eps.reset();
  if (scenario_fields(r) == 3 && !o.n_samples) r.N.reset();
  if (scenario_fields(r) == 3) {
    throw ConfigError("--eps, --beta and --n-samples: give at most two of them");
  }
  if (o.paper_literal_unsafe) cfg.synth.paper_literal_unsafe = true;
  if (o.no_prune) cfg.synth.prune = false;
}

BarrierPartition make_partition(const RunConfig& cfg) {
  if (cfg.grid) return build_partition(cfg.system, *cfg.grid, cfg.partition);
  return partition_from_pieces(cfg.system, cfg.pieces, cfg.partition);
}

ScenarioParams resolve_scenario(const RunConfig& cfg, std::int64_t d) {
  ScenarioRequest r = cfg.scenario;
  if (cfg.noise.samples_path && !r.N && scenario_fields(r) == 1) {
    r.N = read_noise_csv(*cfg.noise.samples_path, cfg.system.dim()).size();
  }
  return resolve(r, d);
}

NoiseDataset load_noise(const RunConfig& cfg, std::int64_t N, std::uint64_t seed) {
  if (cfg.noise.samples_path) {
    NoiseDataset data = read_noise_csv(*cfg.noise.samples_path, cfg.system.dim(), N);
    if (data.size() < N) {
      throw ConfigError("samples: " + *cfg.noise.samples_path + " holds " +
                        std::to_string(data.size()) + " samples, " + std::to_string(N) +
                        " are required");
    }
    return data;
  }
  if (!cfg.noise.gaussian) throw ConfigError("noise: no source configured");
  return draw_gaussian(*cfg.noise.gaussian, N, seed);
}

SynthRun run_synth(const RunConfig& cfg, const RunOptions& options, std::ostream& log) {
  return run_synth(cfg, options, log, cfg.seed);
}

SynthRun run_synth(const RunConfig& cfg, const RunOptions& options, std::ostream& log,
                   std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  SynthRun run;
  auto finish = [&](int code, std::string message) {
    run.exit_code = code;
    run.message = std::move(message);
    run.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return run;
  };

  BarrierPartition partition;
  NoiseDataset data;
  try {
    validate(cfg.system, seed);
    partition = make_partition(cfg);
    const std::int64_t d = decision_dimension(partition.size(), cfg.system.dim());
    run.params = resolve_scenario(cfg, d);
    log << "resolved N=" << run.params.N << " eps=" << run.params.eps
        << " beta=" << run.params.beta << " delta=" << run.params.delta
        << " M=" << run.params.M << " d=" << run.params.d << " pieces=" << partition.size()
        << '\n';
    for (const std::string& note : cfg.notes) log << "note: " << note << '\n';
    data = load_noise(cfg, run.params.N, seed);
  } catch (const ConfigError& e) {
    return finish(kExitConfig, e.what());
  } catch (const ModelError& e) {
    return finish(kExitConfig, e.what());
  } catch (const PartitionError& e) {
    return finish(kExitConfig, e.what());
  } catch (const DimensionError& e) {
    return finish(kExitConfig, e.what());
  } catch (const DomainError& e) {
    return finish(kExitConfig, e.what());
  }

  try {
    if (options.dump_lp) {
      const LbpProblem full =
          build_lbp(cfg.system, partition, cfg.unsafe, data, run.params, cfg.synth);
      std::ofstream out(*options.dump_lp);
      if (!out) return finish(kExitConfig, "--dump-lp: cannot write " + *options.dump_lp);
      full.model.write_lp(out);
      log << "wrote " << full.model.num_variables() << " variables and "
          << full.model.num_constraints() << " rows to " << *options.dump_lp << '\n';
    }
    run.result = synthesize(cfg.system, partition, cfg.unsafe, data, run.params, cfg.synth);
  } catch (const SolverError& e) {
    return finish(kExitSolver, e.what());
  } catch (const Error& e) {
    return finish(kExitConfig, e.what());
  }

  const SynthesisResult& res = run.result;
  const LbpCounts& k = res.counts;
  log << "lbp pieces=" << k.pieces << " |I0|=" << k.initial << " |Iu|=" << k.unsafe
      << " |Is|=" << k.safe << " blocks=" << k.martingale_blocks
      << " nonempty=" << k.nonempty_blocks << " vars=" << k.variables
      << " rows=" << k.constraints << (res.row_generation ? " strategy=row_generation" : "")
      << " rounds=" << res.rounds << '\n';
  switch (res.status) {
    case LpStatus::kOptimal:
      break;
    case LpStatus::kInfeasible:
      return finish(kExitInfeasible, "LP infeasible: " + res.diagnostic);
    case LpStatus::kUnbounded:
      return finish(kExitSolver, "LP unbounded: " + res.diagnostic);
    case LpStatus::kNumericalFailure:
      return finish(kExitSolver, "LP solver failure: " + res.diagnostic);
  }

  Certificate cert = make_certificate(res, run.params, cfg.system.horizon, partition,
                                      fingerprint(cfg.system, partition.pieces, data), seed);
  cert.record_timings = options.record_timings;
  log << "gamma=" << cert.gamma << " c=" << cert.c << " bound=" << cert.safety_lower_bound
      << " build=" << format_double(res.build_seconds)
      << "s solve=" << format_double(res.solve_seconds) << "s\n";

  if (options.verify) {
    VerifyOptions vo;
    vo.tol = cfg.verify_tol;
    vo.paper_literal_unsafe = cfg.synth.paper_literal_unsafe;
    vo.paper_literal_martingale = cfg.synth.paper_literal_martingale;
    vo.threads = cfg.synth.threads;
    try {
      run.report = verify_certificate(cert, cfg.system, cfg.unsafe, data, vo);
    } catch (const SolverError& e) {
      return finish(kExitSolver, std::string("verification: ") + e.what());
    } catch (const Error& e) {
      return finish(kExitVerification, std::string("verification: ") + e.what());
    }
    cert.timings.verify_seconds = run.report->seconds;
    log << "verify " << (run.report->passed ? "passed" : "FAILED")
        << " in " << format_double(run.report->seconds) << "s";
    for (const FamilyWorst& f : run.report->families) {
      log << ' ' << to_string(f.family) << '=' << format_double(f.worst);
    }
    log << '\n';
    if (!run.report->passed) {
      return finish(kExitVerification, "verification failed: " + run.report->failure);
    }
  }
  run.certificate = std::move(cert);
  if (run.certificate->safety_lower_bound <= 0.0) {
    return finish(kExitOk, "trivial certificate: gamma + c T >= 1");
  }
  return finish(kExitOk, "");
}

std::string table_row(const RunConfig& cfg, const SynthRun& run) {
  std::ostringstream os;
  os << std::left << std::setw(12) << cfg.name << " n=" << cfg.system.dim()
     << " pieces=" << std::setw(4) << run.result.counts.pieces
     << " beta=" << std::setw(10) << format_double(run.params.beta) << " bound="
     << std::setw(10)
     << (run.certificate ? format_double(run.certificate->safety_lower_bound) : "-")
     << " time=" << std::fixed << std::setprecision(2) << run.wall_seconds << "s";
  return os.str();
}

SimulateRun run_simulate(const RunConfig& cfg, const Certificate& cert,
                         std::optional<std::int64_t> trials) {
  SimulateRun out;
  const std::string problem = consistency_error(cert);
  if (!problem.empty()) {
    out.exit_code = kExitVerification;
    out.message = "certificate inconsistent: " + problem;
    return out;
  }
  NoiseDataset data;
  try {
    data = load_noise(cfg, cert.scenario.N, cert.seed);
  } catch (const Error& e) {
    out.exit_code = kExitConfig;
    out.message = e.what();
    return out;
  }
  const std::string fp = fingerprint(cfg.system, cert.pieces, data);
  if (fp != cert.fingerprint) {
    out.exit_code = kExitVerification;
    out.message = "fingerprint mismatch: certificate " + cert.fingerprint + ", config " + fp;
    return out;
  }

  NoiseSource source;
  if (cfg.noise.gaussian) {
    source.generator = *cfg.noise.gaussian;
  } else {
    source.pool = &data;
  }
  SimOptions so;
  so.strategy = StartStrategy::kGrid;
  so.grid_per_axis = cfg.sim_grid_per_axis;
  so.trials = trials.value_or(cfg.sim_trials);
  so.horizon = cert.horizon;
  so.seed = derive_seed(cert.seed, 0x5157u);
  so.threads = cfg.synth.threads;
  const TrajectoryBatch batch = simulate(cfg.system, source, so);
  out.summary = summarize(batch);
  out.check = soundness(out.summary, cert.gamma, cert.c, cert.horizon);

  ordered_json j;
  j["fingerprint"] = cert.fingerprint;
  j["trials_per_start"] = so.trials;
  j["starts"] = static_cast<std::int64_t>(batch.starts.size());
  j["overall_safety"] = out.summary.overall.estimate;
  j["overall_ci"] = {out.summary.overall.lower, out.summary.overall.upper};
  j["min_safety"] = out.summary.min_safety;
  j["mean_safety"] = out.summary.mean_safety;
  j["worst_start"] = vector_json(batch.starts.at(out.summary.worst_start));
  j["certified_bound"] = cert.safety_lower_bound;
  j["unsafe_fraction"] = out.check.unsafe_fraction;
  j["gamma_plus_cT"] = out.check.bound;
  j["margin"] = out.check.margin;
  j["passed"] = out.check.passed;
  out.json = j.dump(2) + "\n";
  if (!out.check.passed) {
    out.exit_code = kExitVerification;
    out.message = "soundness check failed";
  }
  return out;
}

}  // namespace sbf
