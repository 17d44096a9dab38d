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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sbf/cli.hpp"
#include "sbf/error.hpp"

namespace sbf {
namespace {

using nlohmann::json;

json preset_json(const std::string& name) { return json::parse(config_to_json(preset(name))); }

std::string config_error(const json& j) {
  try {
    parse_config(j.dump());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(Presets, PieceCounts) {
  EXPECT_EQ(make_partition(preset("martingale")).size(), 7);
  EXPECT_EQ(make_partition(preset("drone")).size(), 33);
  for (int k : vehicle_piece_counts()) EXPECT_EQ(make_partition(preset("vehicle", k)).size(), k);
  EXPECT_THROW(preset("rocket"), ConfigError);
}

TEST(Presets, VehicleSharesSampleCount) {
  std::int64_t N = -1;
  for (int k : vehicle_piece_counts()) {
    const RunConfig cfg = preset("vehicle", k);
    const BarrierPartition bp = make_partition(cfg);
    const ScenarioParams p = resolve_scenario(cfg, bp.size() * 3 + 2);
    if (N < 0) N = p.N;
    EXPECT_EQ(p.N, N);
    EXPECT_LE(p.beta, 1e-9);
  }
}

TEST(Config, RoundTripKeepsEverything) {
  for (const char* name : {"martingale", "drone", "vehicle"}) {
    const std::string text = config_to_json(preset(name));
    EXPECT_EQ(config_to_json(parse_config(text)), text) << name;
  }
}

TEST(Config, OverlappingScenarioBlockNamesTheField) {
  json j = preset_json("martingale");
  j["scenario"]["N"] = 1000;
  const std::string msg = config_error(j);
  EXPECT_NE(msg.find("/scenario"), std::string::npos) << msg;
  EXPECT_NE(msg.find("exactly two"), std::string::npos) << msg;
}

TEST(Config, ErrorsPointAtTheField) {
  json unknown = preset_json("martingale");
  unknown["options"]["prnue"] = true;
  EXPECT_NE(config_error(unknown).find("prnue"), std::string::npos);

  json dims = preset_json("martingale");
  dims["system"]["initial_set"]["lower"] = {0.0, 0.0};
  EXPECT_NE(config_error(dims).find("initial_set"), std::string::npos);

  json eps = preset_json("martingale");
  eps["scenario"]["eps"] = 1.5;
  EXPECT_FALSE(config_error(eps).empty());

  json noise = preset_json("martingale");
  noise["noise"]["samples"] = "does_not_exist.csv";
  EXPECT_FALSE(config_error(noise).empty());

  EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Config, RunSynthReportsConfigErrors) {
  RunConfig cfg = preset("martingale");
  cfg.system.initial_set = Polyhedron::box(Vector::Constant(1, -3.0), Vector::Constant(1, 3.0));
  std::ostringstream log;
  const SynthRun run = run_synth(cfg, RunOptions{}, log);
  EXPECT_EQ(run.exit_code, kExitConfig);
  EXPECT_FALSE(run.certificate.has_value());
}

TEST(Overrides, CommandLineScenarioWins) {
  RunConfig cfg = preset("martingale");
  Overrides o;
  o.n_samples = 500;
  apply_overrides(cfg, o);
  EXPECT_EQ(cfg.scenario.N, 500);
  EXPECT_TRUE(cfg.scenario.eps.has_value());
  EXPECT_FALSE(cfg.scenario.beta.has_value());
  const ScenarioParams p = resolve_scenario(cfg, 16);
  EXPECT_EQ(p.N, 500);
  EXPECT_EQ(p.d, 16);
}

class SamplesFile : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "sbf_test_cli";
    std::filesystem::create_directories(dir_);
    path_ = (dir_ / "noise.csv").string();
    std::ofstream os(path_);
    os << "# drawn by hand\n";
    for (int k = 0; k < 400; ++k) os << 0.001 * ((k * 37) % 21 - 10) << '\n';
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
  std::string path_;
};

TEST_F(SamplesFile, LineCountBecomesN) {
  RunConfig cfg = preset("martingale");
  cfg.noise.gaussian.reset();
  cfg.noise.samples_path = path_;
  cfg.scenario.beta.reset();
  const ScenarioParams p = resolve_scenario(cfg, 16);
  EXPECT_EQ(p.N, 400);
  const NoiseDataset d = load_noise(cfg, p.N, cfg.seed);
  ASSERT_EQ(d.size(), 400);
  EXPECT_DOUBLE_EQ(d.samples[1][0], 0.001 * ((37 % 21) - 10));
  std::ostringstream log;
  const SynthRun run = run_synth(cfg, RunOptions{}, log);
  EXPECT_EQ(run.exit_code, kExitOk) << run.message;
  EXPECT_NE(log.str().find("N=400"), std::string::npos) << log.str();
}

TEST_F(SamplesFile, RelativePathResolvesAgainstConfig) {
  json j = preset_json("martingale");
  j["noise"] = {{"samples", "noise.csv"}};
  j["scenario"].erase("beta");
  const std::string cfg_path = (dir_ / "cfg.json").string();
  std::ofstream(cfg_path) << j.dump(2);
  const RunConfig cfg = load_config(cfg_path);
  ASSERT_TRUE(cfg.noise.samples_path.has_value());
  EXPECT_TRUE(std::filesystem::exists(*cfg.noise.samples_path));
}

TEST(RunSynth, LogsResolvedTupleAndIsDeterministic) {
  RunConfig cfg = preset("martingale");
  cfg.noise.gaussian->sigma = Vector::Constant(1, 0.01);
  cfg.scenario.N = 1000;
  cfg.scenario.beta.reset();
  std::ostringstream log1, log2;
  const SynthRun a = run_synth(cfg, RunOptions{}, log1);
  const SynthRun b = run_synth(cfg, RunOptions{}, log2);
  ASSERT_EQ(a.exit_code, kExitOk) << a.message;
  for (const char* key : {"N=1000", "eps=", "beta=", "delta=", "M=", "d=16"}) {
    EXPECT_NE(log1.str().find(key), std::string::npos) << key;
  }
  std::ostringstream c1, c2;
  write_certificate(c1, *a.certificate);
  write_certificate(c2, *b.certificate);
  EXPECT_EQ(c1.str(), c2.str());
  EXPECT_EQ(a.certificate->scenario.d, 7 * 2 + 2);
  EXPECT_NE(table_row(cfg, a).find("7"), std::string::npos);
}

TEST(RunSimulate, RejectsTamperedCertificate) {
  RunConfig cfg = preset("martingale");
  cfg.noise.gaussian->sigma = Vector::Constant(1, 0.01);
  cfg.scenario.N = 500;
  cfg.scenario.beta.reset();
  std::ostringstream log;
  const SynthRun run = run_synth(cfg, RunOptions{}, log);
  ASSERT_TRUE(run.certificate.has_value());
  const SimulateRun ok = run_simulate(cfg, *run.certificate, 2000);
  EXPECT_EQ(ok.exit_code, kExitOk) << ok.message;
  EXPECT_TRUE(ok.check.passed);

  Certificate inflated = *run.certificate;
  inflated.safety_lower_bound = 0.999;
  EXPECT_NE(run_simulate(cfg, inflated, 100).exit_code, kExitOk);

  RunConfig other = cfg;
  other.seed = 2;
  EXPECT_EQ(run_simulate(other, *run.certificate, 100).exit_code, kExitOk)
      << "the certificate's own seed drives the noise reload";
  Certificate wrong_seed = *run.certificate;
  wrong_seed.seed = 99;
  EXPECT_EQ(run_simulate(cfg, wrong_seed, 100).exit_code, kExitVerification);
}

}  // namespace
}  // namespace sbf
