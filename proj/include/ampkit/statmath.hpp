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

// Closed-form tail bounds, divergences and posterior formulas used by the
// amplifiers and verifiers. Everything here is a pure function.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ampkit/core.hpp"

namespace ampkit {

inline double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

/// KL(Poisson(l1) || Poisson(l2)).
inline double kl_poisson(double lambda1, double lambda2) {
  detail::require(lambda1 > 0 && lambda2 > 0, "kl_poisson: rates must be positive");
  if (lambda1 == lambda2) return 0.0;
  const double v = lambda1 * std::log(lambda1 / lambda2) + lambda2 - lambda1;
  return std::max(v, 0.0);
}

/// Bound on Pr[Z - d >= 2 sqrt(d t) + 2t] for Z ~ chi^2_d.
inline double chisq_tail_upper(double d, double t) {
  detail::require(d >= 1, "chisq_tail_upper: degrees must be >= 1");
  detail::require(t > 0, "chisq_tail_upper: t must be positive");
  return std::exp(-t);
}

/// Bound on Pr[|Z - d| >= d t] for Z ~ chi^2_d, 0 < t < 1.
inline double chisq_twosided_upper(double d, double t) {
  detail::require(d >= 1, "chisq_twosided_upper: degrees must be >= 1");
  detail::require(t > 0 && t < 1, "chisq_twosided_upper: t must lie in (0,1)");
  return clamp01(2.0 * std::exp(-d * t * t / 8.0));
}

/// Bound on either tail Pr[|X - lambda| >= x] for X ~ Poisson(lambda).
inline double poisson_tail_upper(double lambda, double x) {
  detail::require(lambda > 0 && x > 0, "poisson_tail_upper: inputs must be positive");
  return std::exp(-x * x / (lambda + x));
}

/// Bernstein-type martingale bound with unit-bounded differences.
inline double martingale_tail_upper(double lambda, double var_sum) {
  detail::require(lambda > 0, "martingale_tail_upper: lambda must be positive");
  detail::require(var_sum >= 0, "martingale_tail_upper: variance sum must be non-negative");
  return std::exp(-lambda * lambda / (2.0 * (var_sum + lambda / 3.0)));
}

/// Union bound on a repeat among n uniform draws from k values.
inline double birthday_collision_upper(double n, double k) {
  detail::require(k >= 1, "birthday_collision_upper: k must be >= 1");
  detail::require(n >= 0, "birthday_collision_upper: n must be non-negative");
  return std::min(1.0, n * n / (2.0 * k));
}

/// E[#distinct labels] among n uniform draws from k values.
inline double expected_unique(double n, double k) {
  detail::require(k >= 1, "expected_unique: k must be >= 1");
  if (k == 1) return n > 0 ? 1.0 : 0.0;
  return -k * std::expm1(n * std::log1p(-1.0 / k));
}

/// TV bound for the decorrelating amplifier, n -> m samples in d dimensions.
inline double gaussian_tv_upper(std::size_t n, std::size_t m, std::size_t d) {
  detail::require(n >= 1 && m >= n, "gaussian_tv_upper: need m >= n >= 1");
  const double gap = static_cast<double>(m - n);
  return std::min(1.0, std::sqrt(3.0 * static_cast<double>(d)) * gap / static_cast<double>(n));
}

/// Covariance of the decorrelated outputs for d = 1 (coordinates are independent
/// copies of this for larger d).
inline Eigen::MatrixXd analytic_output_cov(std::size_t n, std::size_t m) {
  detail::require(n >= 1 && m > n, "analytic_output_cov: need m > n >= 1");
  const auto ni = static_cast<Eigen::Index>(n);
  const auto mi = static_cast<Eigen::Index>(m);
  const double nd = static_cast<double>(n);
  const double extra = static_cast<double>(m - n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(mi, mi);
  cov.topLeftCorner(ni, ni).setConstant(extra / (nd * nd));
  cov.bottomRightCorner(mi - ni, mi - ni).setConstant(1.0 / nd);
  cov.diagonal().array() += 1.0;
  return cov;
}

struct Posterior {
  Eigen::VectorXd mean;
  double var;
};

/// Posterior of mu given the empirical mean mu0 of n draws of N(mu, I_d),
/// under the prior mu ~ N(0, sqrt(d) I).
inline Posterior posterior_mean_var(const Eigen::VectorXd& mu0, std::size_t n, std::size_t d) {
  detail::require(n >= 1, "posterior_mean_var: n must be >= 1");
  detail::require(static_cast<std::size_t>(mu0.size()) == d, "posterior_mean_var: dimension mismatch");
  const double prec = static_cast<double>(n) + 1.0 / std::sqrt(static_cast<double>(d));
  return {mu0 * (static_cast<double>(n) / prec), 1.0 / prec};
}

struct HellingerResult {
  double numeric;
  double bound;
  double quad_error;
};

/// Mixture weight of the fresh-sample component in the superset amplifier.
inline double superset_mixture_weight(std::size_t r, std::size_t n) {
  const double rd = static_cast<double>(r);
  return 10.0 * rd / (rd + static_cast<double>(n) / 2.0);
}

/// Unnormalised H^2 = int (sqrt p - sqrt q)^2 between N(0,1) and
/// (1-w) N(0,1) + w N(mu_norm, 1), with w the superset mixture weight.
inline HellingerResult hellinger_sq_gaussian_mixture(double mu_norm, std::size_t r, std::size_t n) {
  detail::require(mu_norm >= 0, "hellinger_sq_gaussian_mixture: mu_norm must be non-negative");
  detail::require(n >= 1, "hellinger_sq_gaussian_mixture: n must be >= 1");
  detail::require(18 * r <= n, "hellinger_sq_gaussian_mixture: requires r <= n/18");
  const double rn = static_cast<double>(r) / static_cast<double>(n);
  const double bound = 576.0 * rn * rn * std::exp(3.0 * mu_norm * mu_norm);
  if (r == 0 || mu_norm == 0) return {0.0, bound, 0.0};

  const double w = superset_mixture_weight(r, n);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  // sqrt(q) - sqrt(p) = (q - p) / (sqrt(q) + sqrt(p)) avoids cancellation.
  auto integrand = [=](double x) {
    const double p = inv_sqrt_2pi * std::exp(-0.5 * x * x);
    const double shifted = inv_sqrt_2pi * std::exp(-0.5 * (x - mu_norm) * (x - mu_norm));
    const double q = (1.0 - w) * p + w * shifted;
    const double denom = std::sqrt(p) + std::sqrt(q);
    if (denom == 0.0) return 0.0;
    const double diff = w * (shifted - p) / denom;
    return diff * diff;
  };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double split = mu_norm / 2.0;
  const double inf = std::numeric_limits<double>::infinity();
  double err_lo = 0, err_hi = 0;
  const double lo = Quad::integrate(integrand, -inf, split, 20, 1e-14, &err_lo);
  const double hi = Quad::integrate(integrand, split, inf, 20, 1e-14, &err_hi);
  const double err = err_lo + err_hi;
  if (!std::isfinite(lo + hi) || err >= 1e-10) {
    throw numeric_error("hellinger_sq_gaussian_mixture: quadrature did not converge");
  }
  return {lo + hi, bound, err};
}

/// log of the Binomial(trials, q) pmf at j, exact at the degenerate q = 0, 1.
inline double log_binomial_pmf(std::size_t trials, std::size_t j, double q) {
  if (j > trials) return -std::numeric_limits<double>::infinity();
  if (q <= 0.0) return j == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (q >= 1.0) return j == trials ? 0.0 : -std::numeric_limits<double>::infinity();
  const double N = static_cast<double>(trials);
  const double J = static_cast<double>(j);
  return std::lgamma(N + 1) - std::lgamma(J + 1) - std::lgamma(N - J + 1) + J * std::log(q) +
         (N - J) * std::log1p(-q);
}

/// Exact TV between Binomial(n + extra, p) and h + Binomial(extra, h/n) with
/// h ~ Binomial(n, p).
inline double tv_binomial_vs_compound(std::size_t n, std::size_t extra, double p) {
  detail::require(p >= 0 && p <= 1, "tv_binomial_vs_compound: p must lie in [0,1]");
  detail::require(n >= 1, "tv_binomial_vs_compound: n must be >= 1");
  const std::size_t total = n + extra;
  std::vector<double> compound(total + 1, 0.0);
  for (std::size_t h = 0; h <= n; ++h) {
    const double ph = std::exp(log_binomial_pmf(n, h, p));
    if (ph == 0.0) continue;
    const double q = static_cast<double>(h) / static_cast<double>(n);
    for (std::size_t j = 0; j <= extra; ++j) {
      compound[h + j] += ph * std::exp(log_binomial_pmf(extra, j, q));
    }
  }
  double l1 = 0;
  for (std::size_t j = 0; j <= total; ++j) {
    l1 += std::fabs(std::exp(log_binomial_pmf(total, j, p)) - compound[j]);
  }
  return clamp01(0.5 * l1);
}

/// Two-sided 95% Wilson score interval for `successes` out of `trials`.
inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials,
                                                 double z = 1.959963984540054) {
  detail::require(trials >= 1, "wilson_interval: trials must be >= 1");
  const double t = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / t;
  const double z2 = z * z;
  const double centre = (ph + z2 / (2 * t)) / (1 + z2 / t);
  const double half = z * std::sqrt(ph * (1 - ph) / t + z2 / (4 * t * t)) / (1 + z2 / t);
  return {std::max(0.0, std::min(ph, centre - half)), std::min(1.0, std::max(ph, centre + half))};
}

}  // namespace ampkit
