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

#include <array>
#include <cmath>

#include "sbf/cli.hpp"
#include "sbf/error.hpp"

namespace sbf {

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

Polyhedron box2(double x1_lo, double x1_hi, double x2_lo, double x2_hi) {
  return Polyhedron::box(vec({x1_lo, x2_lo}), vec({x1_hi, x2_hi}));
}

std::vector<double> uniform_breaks(double lo, double hi, int cells) {
  std::vector<double> out;
  for (int k = 0; k <= cells; ++k) out.push_back(lo + (hi - lo) * k / cells);
  return out;
}

// Random walk x+ = x + eta on the line.
RunConfig martingale() {
  RunConfig cfg;
  cfg.name = "martingale";
  cfg.system.regions = {Polyhedron::whole_space(1)};
  cfg.system.dynamics = {AffineMap::identity(1)};
  cfg.system.initial_set = Polyhedron::box(vec({-0.5}), vec({0.5}));
  cfg.system.safe_set = Polyhedron::box(vec({-2.5}), vec({2.5}));
  cfg.system.horizon = 10;
  cfg.unsafe = unsafe_complement(cfg.system.safe_set);
  cfg.grid = GridSpec{{{-kInf, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, kInf}}};
  cfg.scenario.eps = 0.01;
  cfg.scenario.beta = 1e-9;
  cfg.noise.gaussian = GaussianNoise{vec({0.0}), vec({0.1})};
  cfg.seed = 1;
  return cfg;
}

// Unit-mass double integrator (position, velocity) with zero thrust.
RunConfig drone() {
  RunConfig cfg;
  cfg.name = "drone";
  Matrix A(2, 2);
  A << 1.0, 1.0, 0.0, 1.0;
  cfg.system.regions = {Polyhedron::whole_space(2)};
  cfg.system.dynamics = {AffineMap(A, Vector::Zero(2))};
  cfg.system.initial_set = box2(-1.0, 1.0, -1.0, 1.0);
  cfg.system.safe_set = box2(-kInf, kInf, -10.0, 10.0);
  cfg.system.horizon = 10;
  cfg.unsafe = unsafe_complement(cfg.system.safe_set);
  std::vector<double> speed = uniform_breaks(-10.0, 10.0, 31);
  speed.insert(speed.begin(), -kInf);
  speed.push_back(kInf);
  cfg.grid = GridSpec{{{-kInf, kInf}, speed}};
  cfg.scenario.eps = 0.01;
  cfg.scenario.beta = 1e-9;
  cfg.noise.gaussian = GaussianNoise{vec({0.0, 0.0}), vec({0.1, 0.1})};
  cfg.seed = 1;
  cfg.notes = {
      "drone dynamics are implementer-supplied: unit-mass double integrator "
      "A = [[1, 1], [0, 1]], b = 0, safe set |velocity| <= 10"};
  return cfg;
}

// Longitudinal cells per road segment [0, 80], [80, 120], [120, 200]. The
// listed counts nest, so each partition refines the previous one.
std::array<int, 3> vehicle_cells(int pieces) {
  switch (pieces) {
    case 18:
      return {4, 2, 4};
    case 42:
      return {16, 2, 16};
    case 46:
      return {16, 6, 16};
    case 126:
      return {48, 6, 64};
    default:
      break;
  }
  const int inner = pieces - 8;
  if (inner < 3) throw ConfigError("--pieces: the vehicle preset needs at least 11 pieces");
  const int middle = std::max(1, inner / 5);
  const int left = (inner - middle) / 2;
  return {left, middle, inner - middle - left};
}

// Car at constant speed with lateral dynamics; a crosswind acts on [80, 120].
RunConfig vehicle(int pieces) {
  RunConfig cfg;
  cfg.name = "vehicle_" + std::to_string(pieces);
  const double v = 13.89;
  const double shift = 0.5 * 0.0626;
  Matrix A(2, 2);
  A << 1.0, 0.0, 0.0, 0.95;
  cfg.system.regions = {box2(-kInf, 80.0, -kInf, kInf), box2(80.0, 120.0, -kInf, kInf),
                        box2(120.0, kInf, -kInf, kInf)};
  cfg.system.dynamics = {AffineMap(A, vec({v, 0.0})), AffineMap(A, vec({v, shift})),
                         AffineMap(A, vec({v, 0.0}))};
  cfg.system.initial_set = box2(0.0, 10.0, -0.5, 0.5);
  cfg.system.safe_set = box2(0.0, 200.0, -2.0, 2.0);
  cfg.system.horizon = 10;
  cfg.unsafe = unsafe_complement(cfg.system.safe_set);

  const std::array<int, 3> cells = vehicle_cells(pieces);
  const std::array<double, 4> ends = {0.0, 80.0, 120.0, 200.0};
  cfg.pieces.push_back(box2(-kInf, 0.0, -kInf, kInf));
  for (int s = 0; s < 3; ++s) {
    const std::vector<double> x = uniform_breaks(ends[s], ends[s + 1], cells[s]);
    for (int k = 0; k < cells[s]; ++k) cfg.pieces.push_back(box2(x[k], x[k + 1], -2.0, 2.0));
  }
  cfg.pieces.push_back(box2(200.0, kInf, -kInf, kInf));
  for (int s = 0; s < 3; ++s) {
    cfg.pieces.push_back(box2(ends[s], ends[s + 1], 2.0, kInf));
    cfg.pieces.push_back(box2(ends[s], ends[s + 1], -kInf, -2.0));
  }

  // One sample size for every partition size, large enough for the finest,
  // so that all runs share the same samples and confidence.
  cfg.scenario.eps = 0.01;
  cfg.scenario.N = required_samples(0.01, decision_dimension(126, 2), 1e-9);
  cfg.noise.gaussian = GaussianNoise{vec({0.0, 0.0}), vec({0.1, 0.01})};
  cfg.seed = 1;
  cfg.notes = {
      "vehicle road geometry is implementer-chosen: longitudinal domain [0, 200], "
      "lateral bound |x2| <= 2, noise sigma (0.1, 0.01)"};
  return cfg;
}

}  // namespace

std::vector<int> vehicle_piece_counts() { return {18, 42, 46, 126}; }

RunConfig preset(const std::string& name, std::optional<int> pieces) {
  if (pieces && name != "vehicle") {
    throw ConfigError("--pieces: only the vehicle preset has a piece-count family");
  }
  if (name == "martingale") return martingale();
  if (name == "drone") return drone();
  if (name == "vehicle") return vehicle(pieces.value_or(126));
  throw ConfigError("unknown benchmark '" + name + "' (martingale, drone, vehicle)");
}

}  // namespace sbf
