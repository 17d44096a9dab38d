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

// Run configurations, benchmark presets and the end-to-end pipelines behind
// the command-line tool.

#ifndef SBF_CLI_HPP_
#define SBF_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbf/certificate.hpp"
#include "sbf/noise.hpp"
#include "sbf/scenario.hpp"
#include "sbf/sim.hpp"
#include "sbf/synth.hpp"
#include "sbf/system.hpp"

namespace sbf {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitInfeasible = 2,
  kExitVerification = 3,
  kExitSolver = 4,
};

struct NoiseSpec {
  std::optional<std::string> samples_path;  // CSV, one sample per line
  std::optional<GaussianNoise> gaussian;
};

struct RunConfig {
  std::string name = "custom";
  PwaSystem system;
  UnsafeDescription unsafe;  // complement of the safe set unless given
  std::optional<GridSpec> grid;
  std::vector<Polyhedron> pieces;  // used when no grid is given
  PartitionOptions partition;
  ScenarioRequest scenario;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  SynthOptions synth;
  double verify_tol = 1e-6;
  std::int64_t sim_trials = 100000;  // per start
  int sim_grid_per_axis = 3;
  std::vector<std::string> notes;  // printed with every run
};

// Parses a JSON configuration. Relative sample paths are resolved against
// `base_dir`. Throws ConfigError naming the offending field.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& config);

// Benchmark presets: "martingale", "drone", "vehicle". `pieces` selects the
// vehicle partition size.
RunConfig preset(const std::string& name, std::optional<int> pieces = std::nullopt);
std::vector<int> vehicle_piece_counts();

struct Overrides {
  std::optional<std::string> samples_path;
  std::optional<int> pieces;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  std::optional<double> beta;
  std::optional<std::int64_t> n_samples;
  bool paper_literal_unsafe = false;
  bool no_prune = false;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

BarrierPartition make_partition(const RunConfig& config);

// Resolves the scenario tuple for decision dimension d. A sample file with
// no explicit N fixes N to its line count.
ScenarioParams resolve_scenario(const RunConfig& config, std::int64_t d);

// The first N samples of the file, or N Gaussian draws from `seed`.
NoiseDataset load_noise(const RunConfig& config, std::int64_t N, std::uint64_t seed);

struct RunOptions {
  std::optional<std::string> dump_lp;  // write the full program in LP format
  bool record_timings = false;
  bool verify = true;
};

struct SynthRun {
  int exit_code = kExitOk;
  std::string message;
  ScenarioParams params;
  SynthesisResult result;
  std::optional<Certificate> certificate;
  std::optional<VerificationReport> report;
  double wall_seconds = 0.0;
};

// Loads samples, resolves the scenario, synthesizes, verifies. Progress
// lines go to `log`.
SynthRun run_synth(const RunConfig& config, const RunOptions& options, std::ostream& log);
SynthRun run_synth(const RunConfig& config, const RunOptions& options, std::ostream& log,
                   std::uint64_t seed);

// One line per run: system, n, pieces, beta, bound, wall time.
std::string table_row(const RunConfig& config, const SynthRun& run);

struct SimulateRun {
  int exit_code = kExitOk;
  std::string message;
  SimSummary summary;
  SoundnessCheck check;
  std::string json;
};

// Re-derives the fingerprint from the configuration, checks the certificate
// and compares it with Monte Carlo rollouts of the configured noise.
SimulateRun run_simulate(const RunConfig& config, const Certificate& cert,
                         std::optional<std::int64_t> trials = std::nullopt);

}  // namespace sbf

#endif  // SBF_CLI_HPP_
