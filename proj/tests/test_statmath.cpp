// Copyright 2026 The ampkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ampkit/statmath.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "gtest/gtest.h"

using namespace ampkit;

namespace {

// Frequency must not exceed the bound by more than 3 binomial standard errors.
void expect_dominates(double freq, double bound, double trials) {
  const double slack = 3.0 * std::sqrt(std::max(bound * (1 - bound), 1e-12) / trials);
  EXPECT_LE(freq, bound + slack) << "bound " << bound;
}

double log_poisson_pmf(double lambda, int j) {
  return j * std::log(lambda) - lambda - std::lgamma(j + 1.0);
}

}  // namespace

TEST(statmath, kl_poisson_values) {
  EXPECT_EQ(kl_poisson(2, 2), 0.0);
  EXPECT_NEAR(kl_poisson(2, 1), 2 * std::log(2.0) - 1, 1e-15);
  EXPECT_NEAR(kl_poisson(2, 1), 0.386294, 1e-6);
  EXPECT_THROW(kl_poisson(0, 1), std::invalid_argument);
  EXPECT_THROW(kl_poisson(1, -1), std::invalid_argument);
}

TEST(statmath, kl_poisson_matches_series) {
  double series = 0;
  for (int j = 0; j <= 200; ++j) {
    const double l1 = log_poisson_pmf(0.5, j);
    series += std::exp(l1) * (l1 - log_poisson_pmf(3.0, j));
  }
  EXPECT_NEAR(kl_poisson(0.5, 3.0), series, 1e-9);
}

TEST(statmath, kl_poisson_grid_nonnegative) {
  for (double a = 0.25; a <= 8; a *= 1.5) {
    for (double b = 0.25; b <= 8; b *= 1.5) {
      const double kl = kl_poisson(a, b);
      EXPECT_GE(kl, 0.0);
      if (a == b) {
        EXPECT_EQ(kl, 0.0);
      } else {
        EXPECT_GT(kl, 0.0);
      }
    }
  }
}

TEST(statmath, chisq_tail_values) {
  EXPECT_NEAR(chisq_tail_upper(100, 2), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(chisq_tail_upper(100, 2), 0.135335, 1e-6);
  double prev = 1;
  for (double t = 0.5; t < 60; t *= 2) {
    EXPECT_LT(chisq_tail_upper(10, t), prev);
    prev = chisq_tail_upper(10, t);
  }
  EXPECT_LT(prev, 1e-13);
  EXPECT_THROW(chisq_tail_upper(10, 0), std::invalid_argument);
}

TEST(statmath, chisq_twosided_values) {
  EXPECT_THROW(chisq_twosided_upper(100, 1.0), std::invalid_argument);
  EXPECT_THROW(chisq_twosided_upper(100, 0.0), std::invalid_argument);
  EXPECT_NEAR(chisq_twosided_upper(400, 0.5), 2 * std::exp(-12.5), 1e-18);
  EXPECT_NEAR(chisq_twosided_upper(400, 0.5), 7.45e-6, 1e-8);
  EXPECT_EQ(chisq_twosided_upper(1, 0.1), 1.0);
}

TEST(statmath, chisq_bounds_dominate_simulation) {
  std::mt19937_64 gen(17);
  const int trials = 1000000;
  {
    boost::random::chi_squared_distribution<double> chi(50);
    const double d = 50, t = 2;
    int hits = 0;
    for (int i = 0; i < trials; ++i) hits += chi(gen) - d >= 2 * std::sqrt(d * t) + 2 * t;
    expect_dominates(static_cast<double>(hits) / trials, chisq_tail_upper(d, t), trials);
  }
  {
    boost::random::chi_squared_distribution<double> chi(64);
    const double d = 64, t = 0.5;
    int hits = 0;
    for (int i = 0; i < trials; ++i) hits += std::fabs(chi(gen) - d) >= d * t;
    expect_dominates(static_cast<double>(hits) / trials, chisq_twosided_upper(d, t), trials);
  }
}

TEST(statmath, poisson_tail_values) {
  EXPECT_NEAR(poisson_tail_upper(200, 200), std::exp(-100.0), 1e-55);
  EXPECT_NEAR(poisson_tail_upper(5, 1e-9), 1.0, 1e-12);
  EXPECT_THROW(poisson_tail_upper(0, 1), std::invalid_argument);
  EXPECT_THROW(poisson_tail_upper(1, 0), std::invalid_argument);

  // Instances the amplifier analysis relies on: total Poisson(2n) count
  // against 4n, fresh-sample count below r/8, first-part size below 3n/4.
  std::mt19937_64 gen(23);
  const int trials = 1000000;
  struct Point { double lambda, x; bool upper; };
  for (const Point& pt : {Point{10, 10, true}, Point{6, 5, false}, Point{40, 10, false}}) {
    boost::random::poisson_distribution<int, double> pois(pt.lambda);
    int hits = 0;
    for (int i = 0; i < trials; ++i) {
      const int v = pois(gen);
      hits += pt.upper ? v >= pt.lambda + pt.x : v <= pt.lambda - pt.x;
    }
    expect_dominates(static_cast<double>(hits) / trials, poisson_tail_upper(pt.lambda, pt.x), trials);
  }
}

TEST(statmath, poisson_tail_not_uniform_in_deviation) {
  // The stated form lacks the factor 2 of the Bernstein bound, so at moderate
  // deviations the exact upper tail exceeds it. The Bernstein form holds.
  for (auto [lambda, x] : {std::pair{50.0, 20.0}, std::pair{100.0, 25.0}, std::pair{1000.0, 100.0}}) {
    const boost::math::poisson_distribution<double> pois(lambda);
    const double exact = boost::math::cdf(boost::math::complement(pois, std::ceil(lambda + x) - 1));
    EXPECT_GT(exact, poisson_tail_upper(lambda, x));
    EXPECT_LT(exact, std::exp(-x * x / (2 * (lambda + x))));
  }
}

TEST(statmath, martingale_values) {
  EXPECT_NEAR(martingale_tail_upper(3, 0), std::exp(-4.5), 1e-15);
  EXPECT_NEAR(martingale_tail_upper(1, 1), std::exp(-0.375), 1e-15);
  EXPECT_THROW(martingale_tail_upper(1, -1), std::invalid_argument);
  EXPECT_THROW(martingale_tail_upper(0, 1), std::invalid_argument);

  // Upper tail of the unique count at n = 100, k = 400: both the direct
  // evaluation and the final step of the inequality chain are at most 1/8.
  const double n = 100, k = 400;
  const double lambda = 7 * n / std::sqrt(k);
  EXPECT_LE(martingale_tail_upper(lambda, n * n / k), 0.125);
  EXPECT_LE(std::exp(-49.0 / (2 * (1 + 28.0 / 3))), 0.125);
  // Lower tail with 8 n / sqrt(k) and the doubled variance.
  EXPECT_LE(martingale_tail_upper(8 * n / std::sqrt(k), 4 * n * n / k), 0.125);
}

TEST(statmath, birthday_values) {
  EXPECT_EQ(birthday_collision_upper(0, 100), 0.0);
  EXPECT_NEAR(birthday_collision_upper(std::sqrt(10000 / 2.0), 10000), 0.25, 1e-12);
  EXPECT_EQ(birthday_collision_upper(1000, 10), 1.0);

  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> pick(0, 9999);
  const int trials = 100000;
  int dup = 0;
  std::vector<int> draws(30);
  for (int t = 0; t < trials; ++t) {
    for (int& x : draws) x = pick(gen);
    std::sort(draws.begin(), draws.end());
    dup += std::adjacent_find(draws.begin(), draws.end()) != draws.end();
  }
  expect_dominates(static_cast<double>(dup) / trials, birthday_collision_upper(30, 10000), trials);
  EXPECT_LE(birthday_collision_upper(30, 10000), 900.0 / 20000.0);
}

TEST(statmath, expected_unique_enumeration) {
  // Four equiprobable ordered pairs over {0, 1}: unique counts 1, 2, 2, 1.
  EXPECT_NEAR(expected_unique(2, 2), 1.5, 1e-15);
  EXPECT_NEAR(expected_unique(1, 1000), 1.0, 1e-12);
  EXPECT_EQ(expected_unique(0, 50), 0.0);
}

TEST(statmath, chisq_random_points_dominate_simulation) {
  // 20 random admissible points, 10^6 draws each.
  std::mt19937_64 gen(2718);
  std::uniform_real_distribution<double> unit(0, 1);
  const int trials = 1000000;
  for (int p = 0; p < 20; ++p) {
    const int d = 2 + static_cast<int>(unit(gen) * 100);
    const double t = 0.2 + 3 * unit(gen);
    boost::random::chi_squared_distribution<double> chi(d);
    int hits = 0;
    for (int i = 0; i < trials; ++i) hits += chi(gen) - d >= 2 * std::sqrt(d * t) + 2 * t;
    expect_dominates(static_cast<double>(hits) / trials, chisq_tail_upper(d, t), trials);
  }
}

TEST(statmath, gaussian_tv_upper_values) {
  EXPECT_EQ(gaussian_tv_upper(50, 50, 7), 0.0);
  EXPECT_NEAR(gaussian_tv_upper(1000, 1010, 100), std::sqrt(300.0) * 10 / 1000, 1e-15);
  EXPECT_NEAR(gaussian_tv_upper(1000, 1010, 100), 0.17321, 1e-5);
  EXPECT_EQ(gaussian_tv_upper(10, 1000, 4), 1.0);
  EXPECT_THROW(gaussian_tv_upper(10, 9, 1), std::invalid_argument);
}

TEST(statmath, analytic_cov_entries) {
  const Eigen::MatrixXd s = analytic_output_cov(2, 3);
  ASSERT_EQ(s.rows(), 3);
  EXPECT_DOUBLE_EQ(s(0, 0), 1.25);
  EXPECT_DOUBLE_EQ(s(1, 1), 1.25);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(s(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(s(2, 2), 1.5);
  EXPECT_EQ(s(0, 2), 0.0);
  EXPECT_EQ(s(2, 1), 0.0);
  EXPECT_THROW(analytic_output_cov(3, 3), std::invalid_argument);
}

TEST(statmath, analytic_cov_frobenius_and_bound) {
  // ||Sigma - I||_F^2 = n^2 ((m-n)/n^2)^2 + (m-n)^2 (1/n)^2 = 2 (m-n)^2 / n^2.
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> pick_n(1, 40), pick_gap(1, 30);
  for (int i = 0; i < 50; ++i) {
    const int n = pick_n(gen);
    const int m = n + pick_gap(gen);
    const Eigen::MatrixXd s = analytic_output_cov(n, m);
    const double frob = (s - Eigen::MatrixXd::Identity(m, m)).norm();
    EXPECT_NEAR(frob, std::sqrt(2.0) * (m - n) / n, 1e-12);
    // The TV bound is sqrt(3/2) times the Frobenius norm of the md-dimensional
    // covariance gap (d independent copies).
    for (int d : {1, 4, 9}) {
      EXPECT_NEAR(gaussian_tv_upper(n, m, d), std::min(1.0, std::sqrt(1.5) * frob * std::sqrt(d)), 1e-12);
    }
    EXPECT_TRUE(s.isApprox(s.transpose(), 0));
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
  EXPECT_NEAR((analytic_output_cov(5, 7) - Eigen::MatrixXd::Identity(7, 7)).norm(), std::sqrt(2.0) * 2 / 5, 1e-15);
  EXPECT_NEAR((analytic_output_cov(10, 11) - Eigen::MatrixXd::Identity(11, 11)).norm(), std::sqrt(2.0) / 10, 1e-15);
}

TEST(statmath, posterior_values) {
  const auto post = posterior_mean_var(Eigen::VectorXd::Ones(4), 4, 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(post.mean(i), 8.0 / 9.0, 1e-15);
  EXPECT_NEAR(post.var, 2.0 / 9.0, 1e-15);
  const auto big = posterior_mean_var(Eigen::VectorXd::Ones(4), 100000000, 4);
  EXPECT_NEAR(big.mean(0), 1.0, 1e-8);
  EXPECT_LT(big.var, 1e-7);
  EXPECT_THROW(posterior_mean_var(Eigen::VectorXd::Ones(3), 4, 4), std::invalid_argument);
}

TEST(statmath, posterior_matches_joint_simulation) {
  const int d = 4, n = 4, trials = 100000;
  std::mt19937_64 gen(77);
  std::normal_distribution<double> normal;
  const double prior_sd = std::pow(d, 0.25);
  const double post_var = posterior_mean_var(Eigen::VectorXd::Zero(d), n, d).var;
  std::vector<double> sum(d, 0), sum2(d, 0);
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd mu(d), mu0 = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) mu(j) = prior_sd * normal(gen);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) mu0(j) += (mu(j) + normal(gen)) / n;
    }
    const Eigen::VectorXd resid = mu - posterior_mean_var(mu0, n, d).mean;
    for (int j = 0; j < d; ++j) {
      sum[j] += resid(j);
      sum2[j] += resid(j) * resid(j);
    }
  }
  for (int j = 0; j < d; ++j) {
    const double mean = sum[j] / trials;
    const double var = sum2[j] / trials - mean * mean;
    EXPECT_NEAR(mean, 0.0, 3 * std::sqrt(post_var / trials));
    EXPECT_NEAR(var, post_var, 3 * post_var * std::sqrt(2.0 / trials));
  }
}

TEST(statmath, hellinger_values) {
  EXPECT_EQ(hellinger_sq_gaussian_mixture(0, 3, 100).numeric, 0.0);
  const auto h = hellinger_sq_gaussian_mixture(1, 1, 100);
  EXPECT_NEAR(h.bound, 576.0 / 10000 * std::exp(3.0), 1e-12);
  EXPECT_NEAR(h.bound, 1.157, 1e-3);
  EXPECT_LE(h.numeric, h.bound);
  EXPECT_LT(h.quad_error, 1e-10);
  EXPECT_THROW(hellinger_sq_gaussian_mixture(1, 6, 100), std::invalid_argument);
}

TEST(statmath, hellinger_matches_stratified_importance_sampling) {
  // Proposal: mixture of N(0,1), N(mu,1), N(2mu,1), the three Gaussians the
  // integrand expands into for small weights. Each component is sampled by
  // stratified inversion, one point per stratum.
  const double mu = 1.0;
  const std::size_t r = 1, n = 100;
  const double w = 10.0 * r / (r + n / 2.0);
  const double a[3] = {1.0, 2.0, std::exp(mu * mu)};
  const double centers[3] = {0.0, mu, 2 * mu};
  const double atot = a[0] + a[1] + a[2];
  auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); };
  auto f = [&](double x) {
    const double p = phi(x);
    const double q = (1 - w) * p + w * phi(x - mu);
    const double s = std::sqrt(p) - std::sqrt(q);
    return s * s;
  };
  auto g = [&](double x) {
    double v = 0;
    for (int c = 0; c < 3; ++c) v += a[c] / atot * phi(x - centers[c]);
    return v;
  };
  const boost::math::normal_distribution<double> std_normal;
  const std::size_t total = 10000000;
  double estimate = 0;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int c = 0; c < 3; ++c) {
    const auto nc = static_cast<std::size_t>(std::llround(total * a[c] / atot));
    double acc = 0;
    for (std::size_t i = 0; i < nc; ++i) {
      const double u = (static_cast<double>(i) + unit(gen)) / static_cast<double>(nc);
      const double x = centers[c] + boost::math::quantile(std_normal, u);
      acc += f(x) / g(x);
    }
    estimate += a[c] / atot * acc / static_cast<double>(nc);
  }
  EXPECT_NEAR(hellinger_sq_gaussian_mixture(mu, r, n).numeric, estimate, 1e-6);
}

TEST(statmath, hellinger_below_bound_on_grid) {
  const std::size_t n = 1800;
  for (int i = 0; i < 10; ++i) {
    const double mu = 2.0 * i / 9.0;
    for (std::size_t r = 10; r <= 100; r += 10) {
      const auto h = hellinger_sq_gaussian_mixture(mu, r, n);
      EXPECT_GE(h.numeric, 0.0);
      EXPECT_LE(h.numeric, h.bound) << "mu=" << mu << " r=" << r;
    }
  }
}

TEST(statmath, tv_binomial_compound_matches_enumeration) {
  // Independent oracle: boost binomial pdf in a double loop over (h, j).
  auto oracle = [](int n, int extra, double p) {
    double tv = 0;
    for (int j = 0; j <= n + extra; ++j) {
      const double a = boost::math::pdf(boost::math::binomial(n + extra, p), j);
      double b = 0;
      for (int h = 0; h <= n; ++h) {
        const int i = j - h;
        if (i < 0 || i > extra) continue;
        b += boost::math::pdf(boost::math::binomial(n, p), h) *
             boost::math::pdf(boost::math::binomial(extra, static_cast<double>(h) / n), i);
      }
      tv += std::fabs(a - b);
    }
    return tv / 2;
  };
  const double fixture = 0.044660959349082624;
  EXPECT_NEAR(oracle(20, 2, 0.3), fixture, 1e-15);
  EXPECT_NEAR(tv_binomial_vs_compound(20, 2, 0.3), fixture, 1e-12);
  EXPECT_NEAR(tv_binomial_vs_compound(15, 7, 0.55), oracle(15, 7, 0.55), 1e-12);
}

TEST(statmath, tv_binomial_compound_edge_cases) {
  EXPECT_NEAR(tv_binomial_vs_compound(20, 0, 0.3), 0.0, 1e-14);
  for (std::size_t extra : {1u, 5u, 30u}) {
    EXPECT_EQ(tv_binomial_vs_compound(20, extra, 0.0), 0.0);
    EXPECT_EQ(tv_binomial_vs_compound(20, extra, 1.0), 0.0);
  }
  double prev = -1;
  for (std::size_t extra = 0; extra <= 10; ++extra) {
    const double tv = tv_binomial_vs_compound(20, extra, 0.3);
    EXPECT_GE(tv, prev - 1e-15);
    prev = tv;
  }
  const double big = tv_binomial_vs_compound(3000, 3000, 0.4);
  EXPECT_TRUE(std::isfinite(big));
  EXPECT_GE(big, 0.0);
  EXPECT_LE(big, 1.0);
}

TEST(statmath, wilson_interval_contains_rate) {
  auto [lo, hi] = wilson_interval(30, 100);
  EXPECT_LE(lo, 0.3);
  EXPECT_GE(hi, 0.3);
  auto [lo0, hi0] = wilson_interval(0, 50);
  EXPECT_EQ(lo0, 0.0);
  EXPECT_GT(hi0, 0.0);
  auto [lo1, hi1] = wilson_interval(50, 50);
  EXPECT_LT(lo1, 1.0);
  EXPECT_EQ(hi1, 1.0);
}

TEST(statmath, wilson_interval_coverage) {
  std::mt19937_64 gen(101);
  for (double p : {0.1, 0.5, 0.9}) {
    std::bernoulli_distribution coin(p);
    int covered = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      int s = 0;
      for (int i = 0; i < 200; ++i) s += coin(gen);
      auto [lo, hi] = wilson_interval(s, 200);
      covered += lo <= p && p <= hi;
    }
    EXPECT_GE(covered, 930) << "p=" << p;
  }
}
