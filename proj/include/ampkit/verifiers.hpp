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

// Verifiers that know the true distribution. Gaussian verifiers assume the
// identity-covariance frame; whiten first for general covariance.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ampkit/core.hpp"
#include "ampkit/statmath.hpp"

namespace ampkit {

struct GaussianVerifierParams {
  double c_norm = 15.0;  // ||x - mu||^2 <= c_norm d
  double c_dev = 10.0;   // band half-width c_dev sqrt(d) / m
  double c_ip = 4.0;     // inner product >= d / (c_ip n)
  bool drop_last = false;  // mean-distance test on the first m - 1 samples only
};

struct DiscreteVerifierParams {
  double unique_slack = 7.0;  // margin unique_slack n / sqrt(k)
};

namespace detail {

inline void require_dim(const VecSampleSet& z, const Eigen::VectorXd& mu) {
  require(z.dim() == static_cast<std::size_t>(mu.size()), "verifier: dimension mismatch");
}

inline std::string indexed(const char* base, std::size_t i) {
  return std::string(base) + "[" + std::to_string(i) + "]";
}

}  // namespace detail

/// Single test: | ||mean(z) - mu||^2 - d/m | <= c_dev sqrt(d) / m.
inline VerifierReport verify_gaussian_mean_distance(const VecSampleSet& z, const Eigen::VectorXd& mu,
                                                    const GaussianVerifierParams& params = {}) {
  detail::require_dim(z, mu);
  const std::size_t m = params.drop_last ? z.size() - 1 : z.size();
  detail::require(!z.empty() && m >= 1, "verify_gaussian_mean_distance: too few samples");
  const double d = static_cast<double>(z.dim());
  const double md = static_cast<double>(m);
  const Eigen::VectorXd mean = z.items().topRows(static_cast<Eigen::Index>(m)).colwise().mean().transpose();
  const double stat = std::fabs((mean - mu).squaredNorm() - d / md);
  const double threshold = params.c_dev * std::sqrt(d) / md;
  VerifierReport report;
  report.add("mean_distance", stat, threshold, stat <= threshold);
  return report;
}

namespace detail {

/// The three tests with `extra` as the designated sample and mu_hat the mean of
/// the remaining n entries.
inline void three_tests(VerifierReport& report, const Eigen::Ref<const Eigen::RowVectorXd>& extra,
                        const Eigen::VectorXd& mu_hat, const Eigen::VectorXd& mu, std::size_t n,
                        const GaussianVerifierParams& params, std::size_t position, bool tag) {
  const double d = static_cast<double>(mu.size());
  const double nd = static_cast<double>(n);
  const Eigen::VectorXd x = extra.transpose();
  const double norm = (x - mu).squaredNorm();
  const double dev = std::fabs((mu_hat - mu).squaredNorm() - d / nd);
  const double ip = (x - mu_hat).dot(mu - mu_hat);
  const double t_norm = params.c_norm * d;
  const double t_dev = params.c_dev * std::sqrt(d) / nd;
  const double t_ip = d / (params.c_ip * nd);
  report.add(tag ? indexed("norm", position) : "norm", norm, t_norm, norm <= t_norm);
  report.add(tag ? indexed("mean_distance", position) : "mean_distance", dev, t_dev, dev <= t_dev);
  report.add(tag ? indexed("inner_product", position) : "inner_product", ip, t_ip, ip >= t_ip);
}

}  // namespace detail

/// Three tests on n + 1 samples with the last entry designated as the extra one.
inline VerifierReport verify_gaussian_three_test(const VecSampleSet& z, const Eigen::VectorXd& mu,
                                                 const GaussianVerifierParams& params = {}) {
  detail::require(z.size() >= 2, "verify_gaussian_three_test: need at least 2 samples");
  detail::require_dim(z, mu);
  const std::size_t n = z.size() - 1;
  const Eigen::VectorXd mu_hat =
      z.items().topRows(static_cast<Eigen::Index>(n)).colwise().mean().transpose();
  VerifierReport report;
  detail::three_tests(report, z.row(n), mu_hat, mu, n, params, n, false);
  return report;
}

/// Three tests repeated with every position in turn as the designated sample.
inline VerifierReport verify_gaussian_three_test_all(const VecSampleSet& z, const Eigen::VectorXd& mu,
                                                     const GaussianVerifierParams& params = {}) {
  detail::require(z.size() >= 2, "verify_gaussian_three_test: need at least 2 samples");
  detail::require_dim(z, mu);
  const std::size_t n = z.size() - 1;
  const Eigen::VectorXd total = z.sum();
  VerifierReport report;
  for (std::size_t i = 0; i <= n; ++i) {
    const Eigen::VectorXd mu_hat = (total - z.row(i).transpose()) / static_cast<double>(n);
    detail::three_tests(report, z.row(i), mu_hat, mu, n, params, i, true);
  }
  return report;
}

/// Leave-one-out mean of row i, from the column sums in O(d).
inline Eigen::VectorXd leave_one_out_mean(const VecSampleSet& z, const Eigen::VectorXd& total,
                                          std::size_t i) {
  return (total - z.row(i).transpose()) / static_cast<double>(z.size() - 1);
}

/// For every i: ||z_i - mu||^2 <= c_norm d and
/// <z_i - mean_{-i}, mu - mean_{-i}> >= d / (c_ip n), with n = |z| - 1.
inline VerifierReport verify_superset_inner_product(const VecSampleSet& z, const Eigen::VectorXd& mu,
                                                    const GaussianVerifierParams& params = {}) {
  detail::require(z.size() >= 2, "verify_superset_inner_product: need at least 2 samples");
  detail::require_dim(z, mu);
  const std::size_t n = z.size() - 1;
  const double d = static_cast<double>(z.dim());
  const double t_norm = params.c_norm * d;
  const double t_ip = d / (params.c_ip * static_cast<double>(n));
  const Eigen::VectorXd total = z.sum();
  VerifierReport report;
  for (std::size_t i = 0; i <= n; ++i) {
    const Eigen::VectorXd x = z.row(i).transpose();
    const Eigen::VectorXd loo = leave_one_out_mean(z, total, i);
    const double norm = (x - mu).squaredNorm();
    const double ip = (x - loo).dot(mu - loo);
    report.add(detail::indexed("norm", i), norm, t_norm, norm <= t_norm);
    report.add(detail::indexed("inner_product", i), ip, t_ip, ip >= t_ip);
  }
  return report;
}

namespace detail {

/// Unique-count test for samples that all lie in a uniform support of size k.
inline void unique_count_base(VerifierReport& report, std::vector<Label> items, double k,
                              std::size_t n_claimed, const DiscreteVerifierParams& params,
                              StreamEngine& eng) {
  const double nd = static_cast<double>(n_claimed);
  if (nd <= std::sqrt(k) / 2.0) {
    // Birthday regime: a random subsample of sqrt(k)/2 + 1 entries must be repeat-free.
    const auto take = std::min(items.size(), static_cast<std::size_t>(std::floor(std::sqrt(k) / 2.0)) + 1);
    for (std::size_t i = 0; i < take; ++i) {
      std::swap(items[i], items[i + uniform_index(eng, items.size() - i)]);
    }
    items.resize(take);
    std::sort(items.begin(), items.end());
    const auto repeats = static_cast<double>(items.size() - static_cast<std::size_t>(
                                                 std::unique(items.begin(), items.end()) - items.begin()));
    report.add("no_repeats", repeats, 0.0, repeats == 0);
    return;
  }
  std::sort(items.begin(), items.end());
  const auto unique = static_cast<double>(std::unique(items.begin(), items.end()) - items.begin());
  const double threshold = expected_unique(nd, k) + params.unique_slack * nd / std::sqrt(k);
  report.add("unique_count", unique, threshold, unique > threshold);
}

}  // namespace detail

/// Unique-count verifier for uniform distributions and for composites with one
/// heavy label over a uniform region. `n_claimed` is the amplifier's input size.
inline VerifierReport verify_discrete_unique_count(const SampleSet& z, const DiscreteDist& dist,
                                                   std::size_t n_claimed, StreamEngine& eng,
                                                   const DiscreteVerifierParams& params = {}) {
  detail::require(n_claimed >= 1, "verify_discrete_unique_count: n_claimed must be positive");
  detail::require(dist.shape() != DiscreteDist::Shape::general,
                  "verify_discrete_unique_count: distribution must be uniform or composite");
  VerifierReport report;
  std::size_t outside = 0;
  for (Label l : z) outside += dist.contains(l) ? 0 : 1;
  report.add("support", static_cast<double>(outside), 0.0, outside == 0);
  if (outside > 0) return report;

  switch (dist.shape()) {
    case DiscreteDist::Shape::uniform:
      detail::unique_count_base(report, z.items, static_cast<double>(dist.support_size()), n_claimed,
                                params, eng);
      return report;
    case DiscreteDist::Shape::composite: {
      const Label heavy = dist.labels()[dist.heavy_index()];
      const double region_mass = 1.0 - dist.probs()[dist.heavy_index()];
      const double k_region = static_cast<double>(dist.support_size() - 1);
      std::vector<Label> region;
      region.reserve(z.size());
      for (Label l : z) {
        if (l != heavy) region.push_back(l);
      }
      const double n_eff = static_cast<double>(n_claimed) * region_mass;
      const double gate = n_eff + params.unique_slack * n_eff / std::sqrt(k_region);
      const auto count = static_cast<double>(region.size());
      report.add("region_count", count, gate, count > gate);
      if (count <= gate) return report;
      const auto n_region = static_cast<std::size_t>(std::max(1.0, std::round(n_eff)));
      detail::unique_count_base(report, std::move(region), k_region, n_region, params, eng);
      return report;
    }
    case DiscreteDist::Shape::general:
      break;
  }
  return report;
}

}  // namespace ampkit
