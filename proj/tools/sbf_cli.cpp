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

// sbf: synthesize, verify and simulate piecewise-affine stochastic barrier
// certificates.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbf/certificate.hpp"
#include "sbf/cli.hpp"
#include "sbf/error.hpp"
#include "sbf/scenario.hpp"

namespace {

using namespace sbf;

struct Common {
  std::string config;
  std::string samples;
  std::string out;
  std::string dump_lp;
  std::optional<int> pieces;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  std::optional<double> beta;
  std::optional<std::int64_t> n_samples;
  bool paper_literal_unsafe = false;
  bool no_prune = false;
  bool timings = false;
  int trials = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--samples", c.samples, "noise samples CSV (overrides the config)");
  app->add_option("--out", c.out, "certificate output path");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--eps", c.eps, "violation level");
  app->add_option("--beta", c.beta, "confidence parameter");
  app->add_option("--n-samples", c.n_samples, "number of noise samples");
  app->add_flag("--paper-literal-unsafe", c.paper_literal_unsafe,
                "impose B >= 1 on whole pieces touching the unsafe set");
  app->add_flag("--no-prune", c.no_prune, "keep empty transition blocks");
  app->add_option("--dump-lp", c.dump_lp, "write the full program in LP format");
  app->add_flag("--timings", c.timings, "record timings in the certificate");
  app->add_option("--trials", c.trials, "repetitions with fresh samples")->check(
      CLI::PositiveNumber);
}

Overrides overrides_of(const Common& c) {
  Overrides o;
  if (!c.samples.empty()) o.samples_path = c.samples;
  o.seed = c.seed;
  o.eps = c.eps;
  o.beta = c.beta;
  o.n_samples = c.n_samples;
  o.paper_literal_unsafe = c.paper_literal_unsafe;
  o.no_prune = c.no_prune;
  return o;
}

int report_and_write(const RunConfig& cfg, const SynthRun& run, const Common& c) {
  if (!run.message.empty()) {
    std::cerr << (run.exit_code == kExitOk ? "warning: " : "error: ") << run.message << '\n';
  }
  if (run.exit_code != kExitOk || !run.certificate) return run.exit_code;
  std::cout << table_row(cfg, run) << '\n';
  if (!c.out.empty()) {
    std::ofstream out(c.out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << c.out << '\n';
      return kExitConfig;
    }
    write_certificate(out, *run.certificate);
    std::cerr << "certificate written to " << c.out << '\n';
  }
  return kExitOk;
}

// Runs `trials` syntheses; the first uses the configured seed.
int run_trials(const RunConfig& cfg, const Common& c) {
  RunOptions ro;
  if (!c.dump_lp.empty()) ro.dump_lp = c.dump_lp;
  ro.record_timings = c.timings;
  const SynthRun first = run_synth(cfg, ro, std::cerr, cfg.seed);
  const int code = report_and_write(cfg, first, c);
  if (c.trials <= 1 || code != kExitOk) return code;
  std::vector<double> bounds{first.certificate->safety_lower_bound};
  std::vector<double> times{first.wall_seconds};
  ro.dump_lp.reset();
  for (int t = 1; t < c.trials; ++t) {
    const SynthRun run = run_synth(cfg, ro, std::cerr, derive_seed(cfg.seed, t));
    if (run.exit_code != kExitOk || !run.certificate) {
      std::cerr << "error: trial " << t << ": " << run.message << '\n';
      return run.exit_code;
    }
    bounds.push_back(run.certificate->safety_lower_bound);
    times.push_back(run.wall_seconds);
  }
  auto mean_sd = [](const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::pair{m, std::sqrt(s / static_cast<double>(xs.size() - 1))};
  };
  const auto [bm, bs] = mean_sd(bounds);
  const auto [tm, ts] = mean_sd(times);
  std::cout << cfg.name << " trials=" << c.trials << " bound mean=" << bm << " sd=" << bs
            << " time mean=" << tm << "s sd=" << ts << "s\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise-affine stochastic barrier certificates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Common synth_opts;
  CLI::App* synth = app.add_subcommand("synth", "synthesize and verify a certificate");
  synth->add_option("--config", synth_opts.config, "run configuration (JSON)")->required();
  add_common(synth, synth_opts);

  Common bench_opts;
  std::string bench_name;
  CLI::App* bench = app.add_subcommand("benchmark", "run a built-in benchmark");
  bench->add_option("name", bench_name, "martingale, drone or vehicle")->required();
  bench->add_option("--pieces", bench_opts.pieces, "vehicle partition size");
  add_common(bench, bench_opts);

  std::string preset_name;
  std::optional<int> preset_pieces;
  CLI::App* pre = app.add_subcommand("preset", "print a benchmark configuration");
  pre->add_option("name", preset_name, "martingale, drone or vehicle")->required();
  pre->add_option("--pieces", preset_pieces, "vehicle partition size");

  double curve_eps = 0.1;
  std::int64_t curve_d = 1;
  std::vector<double> curve_betas{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9};
  double saa_constant = 10.0;
  CLI::App* curve = app.add_subcommand("samplecurve", "sample counts against beta (CSV)");
  curve->add_option("--eps", curve_eps, "violation level")->required();
  curve->add_option("--d", curve_d, "decision dimension")->required();
  curve->add_option("--beta-list", curve_betas, "confidence parameters")->delimiter(',');
  curve->add_option("--saa-constant", saa_constant,
                    "K in the reference curve ceil(K / beta)");

  std::string sim_config;
  std::string sim_cert;
  std::optional<std::int64_t> sim_trials;
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo check of a certificate");
  sim->add_option("--config", sim_config, "run configuration (JSON)")->required();
  sim->add_option("--cert", sim_cert, "certificate (JSON)")->required();
  sim->add_option("--trials", sim_trials, "trajectories per start");

  std::string ver_config;
  std::string ver_cert;
  double ver_tol = 1e-6;
  CLI::App* ver = app.add_subcommand("verify", "re-check a certificate");
  ver->add_option("--config", ver_config, "run configuration (JSON)")->required();
  ver->add_option("--cert", ver_cert, "certificate (JSON)")->required();
  ver->add_option("--tol", ver_tol, "violation tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      RunConfig cfg = load_config(synth_opts.config);
      if (synth_opts.pieces) throw ConfigError("--pieces applies to benchmark only");
      apply_overrides(cfg, overrides_of(synth_opts));
      return run_trials(cfg, synth_opts);
    }
    if (bench->parsed()) {
      RunConfig cfg = preset(bench_name, bench_opts.pieces);
      apply_overrides(cfg, overrides_of(bench_opts));
      return run_trials(cfg, bench_opts);
    }
    if (pre->parsed()) {
      std::cout << config_to_json(preset(preset_name, preset_pieces));
      return kExitOk;
    }
    if (curve->parsed()) {
      write_sample_curve(std::cout, curve_eps, curve_d, curve_betas, saa_constant);
      return kExitOk;
    }
    if (sim->parsed() || ver->parsed()) {
      const RunConfig cfg = load_config(sim->parsed() ? sim_config : ver_config);
      const std::string cert_path = sim->parsed() ? sim_cert : ver_cert;
      std::ifstream in(cert_path);
      if (!in) throw ConfigError("cannot open " + cert_path);
      const Certificate cert = read_certificate(in);
      if (sim->parsed()) {
        const SimulateRun run = run_simulate(cfg, cert, sim_trials);
        std::cout << run.json;
        if (!run.message.empty()) std::cerr << "error: " << run.message << '\n';
        return run.exit_code;
      }
      const std::string problem = consistency_error(cert);
      if (!problem.empty()) {
        std::cerr << "error: certificate inconsistent: " << problem << '\n';
        return kExitVerification;
      }
      const NoiseDataset data = load_noise(cfg, cert.scenario.N, cert.seed);
      VerifyOptions vo;
      vo.tol = ver_tol;
      vo.paper_literal_unsafe = cfg.synth.paper_literal_unsafe;
      vo.paper_literal_martingale = cfg.synth.paper_literal_martingale;
      vo.threads = cfg.synth.threads;
      const VerificationReport report = verify_certificate(cert, cfg.system, cfg.unsafe, data, vo);
      std::cout << to_json(report);
      return report.passed ? kExitOk : kExitVerification;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerification;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
