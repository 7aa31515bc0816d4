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

#pragma once

#include <cstddef>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>

#include "ampkit/core.hpp"
#include "ampkit/statmath.hpp"

namespace ampkit {

struct DecorrelatedOutput {
  VecSampleSet samples;
  Eigen::VectorXd shift;
  RowMatrix fresh_noise;  // (m - n) x d, already in the frame of the input
};

/// Decorrelating amplifier with caller-supplied noise rows eps_{n+1..m}.
///
///   x'_i = x_i - sum(eps) / n      for i <= n
///   x'_i = mean(x) + eps_i         for i > n
///
/// The output mean equals the input mean exactly.
inline DecorrelatedOutput amplify_decorrelate_with_noise(const VecSampleSet& x, RowMatrix noise) {
  detail::require(!x.empty(), "amplify_decorrelate: empty input");
  detail::require(noise.rows() == 0 || static_cast<std::size_t>(noise.cols()) == x.dim(),
                  "amplify_decorrelate: noise dimension mismatch");
  const std::size_t n = x.size();
  const std::size_t d = x.dim();
  const std::size_t extra = static_cast<std::size_t>(noise.rows());
  const auto ni = static_cast<Eigen::Index>(n);
  const auto ei = static_cast<Eigen::Index>(extra);

  DecorrelatedOutput out;
  const Eigen::VectorXd mu_hat = x.mean();
  out.shift = extra == 0 ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d))
                         : Eigen::VectorXd(noise.colwise().sum().transpose() / static_cast<double>(n));
  out.samples = VecSampleSet(n + extra, d);
  RowMatrix& z = out.samples.items();
  z.topRows(ni) = x.items();
  if (extra > 0) {
    z.topRows(ni).rowwise() -= out.shift.transpose();
    z.bottomRows(ei) = noise;
    z.bottomRows(ei).rowwise() += mu_hat.transpose();
  }
  out.fresh_noise = std::move(noise);
  return out;
}

/// Decorrelating amplifier n -> m for N(mu, Sigma) data with Sigma = L L^T known.
///
/// Equivalent to whiten -> identity-covariance procedure -> unwhiten: the map
/// is affine-equivariant, so drawing eps ~ N(0, Sigma) directly gives the same
/// law without touching mu.
inline DecorrelatedOutput amplify_decorrelate(const VecSampleSet& x, std::size_t m,
                                              const GaussianSpec& spec, StreamEngine& eng) {
  detail::require(!x.empty(), "amplify_decorrelate: empty input");
  detail::require(m >= x.size(), "amplify_decorrelate: m must be >= n");
  detail::require(x.dim() == spec.dim(), "amplify_decorrelate: dimension mismatch");
  RowMatrix noise(static_cast<Eigen::Index>(m - x.size()), static_cast<Eigen::Index>(x.dim()));
  fill_standard_normal(noise, eng);
  if (!spec.is_identity()) noise = noise * spec.cov_factor().transpose();
  return amplify_decorrelate_with_noise(x, std::move(noise));
}

inline DecorrelatedOutput amplify_decorrelate(const VecSampleSet& x, std::size_t m, StreamEngine& eng) {
  detail::require(!x.empty(), "amplify_decorrelate: empty input");
  return amplify_decorrelate(x, m, GaussianSpec::identity(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.dim()))), eng);
}

struct SupersetTrace {
  VecSampleSet samples;
  std::size_t fresh_count = 0;
  bool exhausted = false;
};

/// Superset amplifier n -> n + r (n even, r <= n/18). Keeps the first half,
/// then fills n/2 + r slots: each independently a fresh N(mean of first half, I)
/// draw with probability `weight`, otherwise the next second-half sample in
/// random order; x_1 once the second half runs out.
inline SupersetTrace amplify_superset_mixture_traced(const VecSampleSet& x, std::size_t r,
                                                     StreamEngine& eng,
                                                     std::optional<double> weight = std::nullopt) {
  const std::size_t n = x.size();
  detail::require(n >= 2 && n % 2 == 0, "amplify_superset_mixture: n must be even and positive");
  detail::require(18 * r <= n, "amplify_superset_mixture: requires r <= n/18");
  const double w = weight.value_or(superset_mixture_weight(r, n));
  detail::require(w >= 0 && w <= 1, "amplify_superset_mixture: weight must lie in [0,1]");
  const std::size_t half = n / 2;
  const std::size_t d = x.dim();
  const auto hi = static_cast<Eigen::Index>(half);

  std::vector<std::size_t> pool(half);
  std::iota(pool.begin(), pool.end(), half);
  detail::shuffle(pool, 0, eng);

  SupersetTrace out;
  out.samples = VecSampleSet(n + r, d);
  RowMatrix& z = out.samples.items();
  z.topRows(hi) = x.items().topRows(hi);
  const Eigen::RowVectorXd mu_tilde = x.items().topRows(hi).colwise().mean();

  boost::random::normal_distribution<double> normal;
  std::size_t next = 0;
  for (std::size_t slot = half; slot < n + r; ++slot) {
    auto row = z.row(static_cast<Eigen::Index>(slot));
    if (eng.uniform01() < w) {
      for (std::size_t j = 0; j < d; ++j) row(static_cast<Eigen::Index>(j)) = mu_tilde(static_cast<Eigen::Index>(j)) + normal(eng);
      ++out.fresh_count;
    } else if (next < pool.size()) {
      row = x.row(pool[next++]);
    } else {
      row = x.row(0);
      out.exhausted = true;
    }
  }
  return out;
}

inline VecSampleSet amplify_superset_mixture(const VecSampleSet& x, std::size_t r, StreamEngine& eng) {
  return amplify_superset_mixture_traced(x, r, eng).samples;
}

namespace detail {

inline RowMatrix shuffled_rows(const RowMatrix& in, StreamEngine& eng) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(in.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  shuffle(order, 0, eng);
  RowMatrix out(in.rows(), in.cols());
  for (std::size_t i = 0; i < order.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = in.row(order[i]);
  return out;
}

}  // namespace detail

/// Shuffles the input together with m - n fresh draws from N(mean(x), I).
inline VecSampleSet amplify_naive_superset(const VecSampleSet& x, std::size_t m, StreamEngine& eng) {
  detail::require(!x.empty(), "amplify_naive_superset: empty input");
  detail::require(m >= x.size(), "amplify_naive_superset: m must be >= n");
  const auto ni = static_cast<Eigen::Index>(x.size());
  RowMatrix all(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(x.dim()));
  all.topRows(ni) = x.items();
  if (m > x.size()) {
    RowMatrix fresh(static_cast<Eigen::Index>(m - x.size()), all.cols());
    fill_standard_normal(fresh, eng);
    fresh.rowwise() += x.mean().transpose();
    all.bottomRows(fresh.rows()) = fresh;
  }
  return VecSampleSet(detail::shuffled_rows(all, eng));
}

/// Discards the input and returns m draws from N(mean(x), I).
inline VecSampleSet amplify_discard_resample(const VecSampleSet& x, std::size_t m, StreamEngine& eng) {
  detail::require(!x.empty(), "amplify_discard_resample: empty input");
  detail::require(m >= 1, "amplify_discard_resample: m must be >= 1");
  RowMatrix out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(x.dim()));
  fill_standard_normal(out, eng);
  out.rowwise() += x.mean().transpose();
  return VecSampleSet(std::move(out));
}

}  // namespace ampkit
