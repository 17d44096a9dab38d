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

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "sbf/error.hpp"
#include "sbf/noise.hpp"
#include "sbf/scenario.hpp"

namespace sbf {
namespace {

TEST(BinomialTail, Examples) {
  EXPECT_DOUBLE_EQ(binomial_tail(5, 0.3, 6), 1.0);
  EXPECT_NEAR(binomial_tail(10, 0.1, 1), std::pow(0.9, 10), 1e-15);
  const double hand = std::pow(0.75, 20) + 20 * 0.25 * std::pow(0.75, 19) +
                      190 * 0.0625 * std::pow(0.75, 18);
  EXPECT_NEAR(binomial_tail(20, 0.25, 3), hand, 1e-14);
  EXPECT_NEAR(binomial_tail(20, 0.25, 3), 0.09126, 1e-5);
}

TEST(BinomialTail, MatchesExactRationalSum) {
  for (std::int64_t N = 1; N <= 30; ++N) {
    for (double eps : {0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.77, 0.9}) {
      for (std::int64_t d = 1; d <= N + 1; d += 3) {
        const double exact = oracle::binomial_tail(N, eps, d);
        const double got = binomial_tail(N, eps, d);
        EXPECT_LE(std::abs(got - exact), 1e-12 * exact) << N << ' ' << eps << ' ' << d;
      }
    }
  }
}

TEST(BinomialTail, Monotonicity) {
  for (double eps : {0.01, 0.1, 0.3}) {
    for (std::int64_t d : {1, 5, 20}) {
      double prev = 2.0;
      for (std::int64_t N = d; N < 400; N += 7) {
        const double t = binomial_tail(N, eps, d);
        EXPECT_LE(t, prev * (1 + 1e-12));
        prev = t;
        EXPECT_LE(binomial_tail(N, eps, d), binomial_tail(N, eps, d + 1) * (1 + 1e-12));
        EXPECT_NEAR(binomial_tail(N, eps + 1e-9, d), t, 1e-5);
      }
    }
  }
}

TEST(BinomialTail, SaturatesAndRejectsBadInput) {
  EXPECT_DOUBLE_EQ(binomial_tail(10, 0.0, 1), 1.0);
  EXPECT_DOUBLE_EQ(binomial_tail(10, 1.0, 1), 0.0);
  EXPECT_THROW(binomial_tail(0, 0.1, 1), DomainError);
  EXPECT_THROW(binomial_tail(10, 1.5, 1), DomainError);
}

// Independent log-space tail for large N.
double log_space_tail(std::int64_t N, double eps, std::int64_t d) {
  double sum = 0.0;
  for (std::int64_t i = 0; i < d; ++i) {
    const double lg = std::lgamma(N + 1.0) - std::lgamma(i + 1.0) - std::lgamma(N - i + 1.0) +
                      i * std::log(eps) + (N - i) * std::log1p(-eps);
    sum += std::exp(lg);
  }
  return sum;
}

TEST(RequiredSamples, Examples) {
  EXPECT_EQ(required_samples(0.5, 1, 0.5), 1);
  EXPECT_EQ(required_samples(0.1, 1, 1e-9), 197);
  EXPECT_EQ(required_samples(0.1, 1, 1e-9),
            static_cast<std::int64_t>(std::ceil(std::log(1e-9) / std::log(0.9))));
}

TEST(RequiredSamples, IsTheSmallestAdmissibleN) {
  for (double eps : {0.01, 0.02, 0.05}) {
    for (std::int64_t d : {16, 56, 101, 380}) {
      const std::int64_t N = required_samples(eps, d, 1e-9);
      EXPECT_LE(log_space_tail(N, eps, d), 1e-9 * (1 + 1e-9));
      EXPECT_GT(log_space_tail(N - 1, eps, d), 1e-9 * (1 - 1e-9));
    }
  }
}

TEST(RequiredSamples, LogarithmicInBeta) {
  const double ratio = static_cast<double>(required_samples(0.05, 23, 1e-9)) /
                       static_cast<double>(required_samples(0.05, 23, 1e-3));
  EXPECT_LE(ratio, 3.5);
  std::vector<double> x, y;
  for (int k = 1; k <= 9; ++k) {
    x.push_back(std::log(std::pow(10.0, k)));
    y.push_back(static_cast<double>(required_samples(0.05, 23, std::pow(10.0, -k))));
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
    syy += y[k] * y[k];
  }
  const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  EXPECT_GE(r * r, 0.99);
  for (std::size_t k = 1; k + 1 < y.size(); ++k) {
    EXPECT_GE(2 * y[k], y[k - 1] + y[k + 1] - 1.0) << "concave in ln(1/beta)";
  }
}

TEST(RequiredSamples, RejectsBadInput) {
  EXPECT_THROW(required_samples(0.0, 1, 0.1), DomainError);
  EXPECT_THROW(required_samples(0.1, 1, 1.0), DomainError);
  EXPECT_THROW(required_samples(1e-12, 1000, 1e-9), DomainError);
}

TEST(MaxViolationLevel, Examples) {
  const double eps = max_violation_level(197, 1, 1e-9);
  EXPECT_NEAR(eps, 1.0 - std::pow(1e-9, 1.0 / 197.0), 1e-9);
  EXPECT_THROW(max_violation_level(10, 20, 0.5), DomainError);
}

TEST(MaxViolationLevel, BisectionBoundary) {
  for (std::int64_t N : {197, 400, 1000}) {
    for (std::int64_t d : {1, 5}) {
      const double eps = max_violation_level(N, d, 1e-9);
      EXPECT_LE(binomial_tail(N, eps, d), 1e-9 * (1 + 1e-12));
      EXPECT_GT(binomial_tail(N, 0.99 * eps, d), 1e-9);
    }
  }
  EXPECT_GT(max_violation_level(197, 1, 1e-9), max_violation_level(400, 1, 1e-9));
}

TEST(TighteningMargin, Examples) {
  EXPECT_DOUBLE_EQ(tightening_margin(0.5, 1.0), 1.0);
  EXPECT_NEAR(tightening_margin(0.01, 1.0), 0.010101010101, 1e-12);
  EXPECT_LT(tightening_margin(1e-12, 2.0), 1e-11);
  EXPECT_THROW(tightening_margin(1.0, 1.0), DomainError);
}

TEST(Resolve, AllThreeVariants) {
  ScenarioRequest a;
  a.eps = 0.1;
  a.beta = 1e-9;
  const ScenarioParams pa = resolve(a, 1);
  EXPECT_EQ(pa.N, 197);
  EXPECT_LE(pa.beta, 1e-9);
  EXPECT_NEAR(pa.delta, 0.1 / 0.9, 1e-15);

  ScenarioRequest b;
  b.eps = 0.1;
  b.N = 197;
  EXPECT_NEAR(resolve(b, 1).beta, std::pow(0.9, 197), 1e-20);

  ScenarioRequest c;
  c.N = 197;
  c.beta = 1e-9;
  EXPECT_NEAR(resolve(c, 1).eps, 0.1, 1e-3);
}

TEST(Resolve, RejectsOverlapAndSmallDelta) {
  ScenarioRequest r;
  r.eps = 0.1;
  r.N = 100;
  r.beta = 1e-3;
  EXPECT_THROW(resolve(r, 1), ConfigError);
  ScenarioRequest s;
  s.eps = 0.1;
  s.beta = 1e-3;
  s.delta = 0.01;
  EXPECT_THROW(resolve(s, 1), ConfigError);
}

TEST(SampleCurve, Columns) {
  std::ostringstream os;
  const std::vector<double> betas{1e-3, 1e-9};
  write_sample_curve(os, 0.1, 1, betas, 10.0);
  std::istringstream is(os.str());
  std::string header, row3, row9;
  std::getline(is, header);
  std::getline(is, row3);
  std::getline(is, row9);
  EXPECT_EQ(header, "beta,N_scenario,N_saa_reference");
  EXPECT_EQ(row9, "1e-09,197,10000000000");
  EXPECT_EQ(saa_reference_samples(10.0, 1e-9) / saa_reference_samples(10.0, 1e-3), 1000000);
}

TEST(Noise, CsvRoundTripAndLimits) {
  std::istringstream is("# header\n0.5, -1\n\n2,3\n4,5\n");
  const NoiseDataset d = read_noise_csv(is, 2);
  ASSERT_EQ(d.size(), 3);
  EXPECT_DOUBLE_EQ(d.samples[0][1], -1.0);
  std::istringstream again("1,2\n3,4\n5,6\n");
  EXPECT_EQ(read_noise_csv(again, 2, 2).size(), 2);
  std::ostringstream os;
  write_noise_csv(os, d);
  std::istringstream back(os.str());
  const NoiseDataset e = read_noise_csv(back, 2);
  ASSERT_EQ(e.size(), d.size());
  for (int k = 0; k < 3; ++k) EXPECT_EQ(e.samples[k], d.samples[k]);
}

TEST(Noise, CsvErrors) {
  std::istringstream few("1\n");
  EXPECT_THROW(read_noise_csv(few, 2), ConfigError);
  std::istringstream many("1,2,3\n");
  EXPECT_THROW(read_noise_csv(many, 2), ConfigError);
  std::istringstream junk("1,x\n");
  EXPECT_THROW(read_noise_csv(junk, 2), ConfigError);
}

TEST(Noise, GaussianDrawsAreReproducible) {
  const GaussianNoise g{Vector::Zero(2), Vector::Constant(2, 0.1)};
  const NoiseDataset a = draw_gaussian(g, 100, 5);
  const NoiseDataset b = draw_gaussian(g, 100, 5);
  const NoiseDataset c = draw_gaussian(g, 100, 6);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.samples[k], b.samples[k]);
  EXPECT_NE(a.samples[0], c.samples[0]);
  const NoiseDataset prefix = draw_gaussian(g, 10, 5);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(prefix.samples[k], a.samples[k]);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

}  // namespace
}  // namespace sbf
