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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>

#include "ampkit/rng.hpp"

namespace ampkit {

/// Raised when a computation cannot produce a finite, trustworthy number.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Label = std::int64_t;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

/// Uniform index in [0, bound) by 128-bit multiply; bias is below 2^-64 * bound.
inline std::size_t uniform_index(StreamEngine& eng, std::size_t bound) {
  const unsigned __int128 wide = static_cast<unsigned __int128>(eng()) * bound;
  return static_cast<std::size_t>(wide >> 64);
}

template <class T>
void shuffle(std::vector<T>& v, std::size_t first, StreamEngine& eng) {
  for (std::size_t i = v.size(); i > first + 1; --i) {
    const std::size_t j = first + uniform_index(eng, i - first);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sample containers
// ---------------------------------------------------------------------------

/// Ordered multiset of discrete labels. Order matters: verifiers may look at
/// positions, and amplifiers promise specific prefix layouts.
struct SampleSet {
  std::vector<Label> items;

  std::size_t size() const noexcept { return items.size(); }
  bool empty() const noexcept { return items.empty(); }
  Label operator[](std::size_t i) const { return items[i]; }
  auto begin() const noexcept { return items.begin(); }
  auto end() const noexcept { return items.end(); }

  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

/// Ordered sequence of d-vectors, one per row.
class VecSampleSet {
 public:
  VecSampleSet() = default;
  VecSampleSet(std::size_t n, std::size_t d)
      : items_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)) {}
  explicit VecSampleSet(RowMatrix items) : items_(std::move(items)) {}

  std::size_t size() const noexcept { return static_cast<std::size_t>(items_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(items_.cols()); }
  bool empty() const noexcept { return items_.rows() == 0; }

  auto row(std::size_t i) { return items_.row(static_cast<Eigen::Index>(i)); }
  auto row(std::size_t i) const { return items_.row(static_cast<Eigen::Index>(i)); }

  RowMatrix& items() noexcept { return items_; }
  const RowMatrix& items() const noexcept { return items_; }

  Eigen::VectorXd mean() const {
    detail::require(!empty(), "mean of an empty sample set");
    return items_.colwise().mean().transpose();
  }

  Eigen::VectorXd sum() const { return items_.colwise().sum().transpose(); }

 private:
  RowMatrix items_;
};

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

/// Probability vector over integer labels with support-size bound k.
///
/// Immutable after construction. Supports above 64 labels get a Vose alias
/// table for O(1) draws; smaller supports use a linear scan.
class DiscreteDist {
 public:
  enum class Shape { general, uniform, composite };

  static constexpr std::size_t kAliasThreshold = 64;

  DiscreteDist(std::vector<Label> labels, std::vector<double> probs, std::size_t k)
      : labels_(std::move(labels)), probs_(std::move(probs)), k_(k) {
    detail::require(k_ >= 1, "DiscreteDist: k must be positive");
    detail::require(!labels_.empty(), "DiscreteDist: empty support");
    detail::require(labels_.size() == probs_.size(), "DiscreteDist: labels/probs length mismatch");
    detail::require(labels_.size() <= k_, "DiscreteDist: support larger than k");
    long double total = 0;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      detail::require(labels_[i] >= 0, "DiscreteDist: labels must be non-negative");
      detail::require(i == 0 || labels_[i - 1] < labels_[i],
                      "DiscreteDist: labels must be strictly increasing");
      detail::require(probs_[i] >= 0 && std::isfinite(probs_[i]),
                      "DiscreteDist: probabilities must be non-negative");
      total += probs_[i];
    }
    detail::require(std::fabs(static_cast<double>(total) - 1.0) <= 1e-12,
                    "DiscreteDist: probabilities must sum to 1");
    classify();
    if (labels_.size() > kAliasThreshold) build_alias();
  }

  static DiscreteDist uniform(std::vector<Label> labels, std::size_t k) {
    std::sort(labels.begin(), labels.end());
    const std::size_t s = labels.size();
    detail::require(s > 0, "DiscreteDist::uniform: empty support");
    std::vector<double> probs(s, 1.0 / static_cast<double>(s));
    return DiscreteDist(std::move(labels), std::move(probs), k);
  }

  /// One label with mass `heavy_mass`, the remainder spread uniformly.
  static DiscreteDist composite(Label heavy, double heavy_mass,
                                std::vector<Label> uniform_labels, std::size_t k) {
    detail::require(heavy_mass > 0 && heavy_mass < 1, "DiscreteDist::composite: mass in (0,1)");
    detail::require(!uniform_labels.empty(), "DiscreteDist::composite: empty uniform region");
    const double each = (1.0 - heavy_mass) / static_cast<double>(uniform_labels.size());
    std::vector<std::pair<Label, double>> entries;
    entries.reserve(uniform_labels.size() + 1);
    entries.emplace_back(heavy, heavy_mass);
    for (Label l : uniform_labels) entries.emplace_back(l, each);
    std::sort(entries.begin(), entries.end());
    std::vector<Label> labels;
    std::vector<double> probs;
    for (auto& [l, p] : entries) {
      labels.push_back(l);
      probs.push_back(p);
    }
    return DiscreteDist(std::move(labels), std::move(probs), k);
  }

  const std::vector<Label>& labels() const noexcept { return labels_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t support_size() const noexcept { return labels_.size(); }
  Shape shape() const noexcept { return shape_; }

  /// Index of the heavy label for composite distributions.
  std::size_t heavy_index() const noexcept { return heavy_index_; }

  bool contains(Label l) const {
    return std::binary_search(labels_.begin(), labels_.end(), l);
  }

  double prob_of(Label l) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), l);
    if (it == labels_.end() || *it != l) return 0.0;
    return probs_[static_cast<std::size_t>(it - labels_.begin())];
  }

  Label draw(StreamEngine& eng) const {
    if (alias_) {
      const std::size_t i = detail::uniform_index(eng, labels_.size());
      return eng.uniform01() < alias_->accept[i] ? labels_[i] : labels_[alias_->alias[i]];
    }
    double u = eng.uniform01();
    for (std::size_t i = 0; i + 1 < probs_.size(); ++i) {
      if (u < probs_[i]) return labels_[i];
      u -= probs_[i];
    }
    return labels_.back();
  }

 private:
  struct AliasTable {
    std::vector<double> accept;
    std::vector<std::size_t> alias;
  };

  void classify() {
    const double tol = 1e-12;
    const std::size_t s = probs_.size();
    auto near = [&](double a, double b) { return std::fabs(a - b) <= tol * std::max(1.0, b); };
    if (std::all_of(probs_.begin(), probs_.end(), [&](double p) { return near(p, probs_[0]); })) {
      shape_ = Shape::uniform;
      return;
    }
    if (s >= 3) {
      // Composite: exactly one entry differs from a common value shared by the rest.
      const double common = near(probs_[0], probs_[1]) ? probs_[0] : probs_[2];
      std::size_t odd = s;
      std::size_t odd_count = 0;
      for (std::size_t i = 0; i < s; ++i) {
        if (!near(probs_[i], common)) {
          odd = i;
          ++odd_count;
        }
      }
      if (odd_count == 1) {
        shape_ = Shape::composite;
        heavy_index_ = odd;
        return;
      }
    } else if (s == 2) {
      shape_ = Shape::composite;
      heavy_index_ = probs_[0] >= probs_[1] ? 0 : 1;
      return;
    }
    shape_ = Shape::general;
  }

  void build_alias() {
    const std::size_t s = probs_.size();
    auto table = std::make_shared<AliasTable>();
    table->accept.assign(s, 1.0);
    table->alias.resize(s);
    std::iota(table->alias.begin(), table->alias.end(), std::size_t{0});
    std::vector<double> scaled(s);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < s; ++i) {
      scaled[i] = probs_[i] * static_cast<double>(s);
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t lo = small.back();
      small.pop_back();
      const std::size_t hi = large.back();
      table->accept[lo] = scaled[lo];
      table->alias[lo] = hi;
      scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0;
      if (scaled[hi] < 1.0) {
        large.pop_back();
        small.push_back(hi);
      }
    }
    // Leftovers are 1 up to rounding.
    for (std::size_t i : small) table->accept[i] = 1.0;
    for (std::size_t i : large) table->accept[i] = 1.0;
    alias_ = std::move(table);
  }

  std::vector<Label> labels_;
  std::vector<double> probs_;
  std::size_t k_;
  Shape shape_ = Shape::general;
  std::size_t heavy_index_ = 0;
  std::shared_ptr<const AliasTable> alias_;
};

/// N(mu, L L^T) with L lower triangular and a positive diagonal.
class GaussianSpec {
 public:
  GaussianSpec(Eigen::VectorXd mu, Eigen::MatrixXd cov_factor)
      : mu_(std::move(mu)), factor_(std::move(cov_factor)) {
    const Eigen::Index d = mu_.size();
    detail::require(d >= 1, "GaussianSpec: dimension must be positive");
    detail::require(factor_.rows() == d && factor_.cols() == d,
                    "GaussianSpec: covariance factor must be d x d");
    bool identity = true;
    for (Eigen::Index i = 0; i < d; ++i) {
      detail::require(factor_(i, i) > 0, "GaussianSpec: factor diagonal must be positive");
      for (Eigen::Index j = 0; j < d; ++j) {
        if (j > i) detail::require(factor_(i, j) == 0, "GaussianSpec: factor must be lower triangular");
        if (factor_(i, j) != (i == j ? 1.0 : 0.0)) identity = false;
      }
    }
    identity_ = identity;
  }

  // Identity specs never materialise the d x d factor.
  static GaussianSpec identity(Eigen::VectorXd mu) {
    detail::require(mu.size() >= 1, "GaussianSpec: dimension must be positive");
    GaussianSpec spec;
    spec.mu_ = std::move(mu);
    return spec;
  }

  static GaussianSpec from_covariance(Eigen::VectorXd mu, const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    detail::require(llt.info() == Eigen::Success, "GaussianSpec: covariance is not positive definite");
    return GaussianSpec(std::move(mu), llt.matrixL());
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mu_.size()); }
  const Eigen::VectorXd& mu() const noexcept { return mu_; }
  Eigen::MatrixXd cov_factor() const {
    return identity_ ? Eigen::MatrixXd::Identity(mu_.size(), mu_.size()) : factor_;
  }
  bool is_identity() const noexcept { return identity_; }

 private:
  GaussianSpec() = default;

  Eigen::VectorXd mu_;
  Eigen::MatrixXd factor_;
  bool identity_ = true;
};

// ---------------------------------------------------------------------------
// Verifier output
// ---------------------------------------------------------------------------

enum class Verdict { accept, reject };

inline const char* to_string(Verdict v) { return v == Verdict::accept ? "accept" : "reject"; }

struct TestOutcome {
  std::string name;
  double statistic;
  double threshold;
  bool passed;
};

/// Verdict is accept iff every recorded test passed.
class VerifierReport {
 public:
  void add(std::string name, double statistic, double threshold, bool passed) {
    all_passed_ = all_passed_ && passed;
    tests_.push_back({std::move(name), statistic, threshold, passed});
  }

  Verdict verdict() const noexcept { return all_passed_ ? Verdict::accept : Verdict::reject; }
  bool accepted() const noexcept { return all_passed_; }
  const std::vector<TestOutcome>& tests() const noexcept { return tests_; }

 private:
  std::vector<TestOutcome> tests_;
  bool all_passed_ = true;
};

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

inline SampleSet sample_discrete(const DiscreteDist& dist, std::size_t n, StreamEngine& eng) {
  SampleSet out;
  out.items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.items.push_back(dist.draw(eng));
  return out;
}

inline SampleSet sample_discrete(const DiscreteDist& dist, std::size_t n, const SeedStream& rng) {
  StreamEngine eng = rng.engine();
  return sample_discrete(dist, n, eng);
}

/// Fills `out` with i.i.d. standard normals.
inline void fill_standard_normal(RowMatrix& out, StreamEngine& eng) {
  boost::random::normal_distribution<double> normal;
  double* p = out.data();
  const Eigen::Index total = out.size();
  for (Eigen::Index i = 0; i < total; ++i) p[i] = normal(eng);
}

inline VecSampleSet sample_gaussian(const GaussianSpec& spec, std::size_t n, StreamEngine& eng) {
  VecSampleSet out(n, spec.dim());
  fill_standard_normal(out.items(), eng);
  if (!spec.is_identity()) {
    out.items() = out.items() * spec.cov_factor().transpose();
  }
  out.items().rowwise() += spec.mu().transpose();
  return out;
}

inline VecSampleSet sample_gaussian(const GaussianSpec& spec, std::size_t n, const SeedStream& rng) {
  StreamEngine eng = rng.engine();
  return sample_gaussian(spec, n, eng);
}

/// Maps N(mu, L L^T) data into the N(mu, I) frame: x -> L^{-1}(x - mu) + mu.
inline VecSampleSet whiten(const VecSampleSet& samples, const GaussianSpec& spec) {
  detail::require(samples.empty() || samples.dim() == spec.dim(), "whiten: dimension mismatch");
  if (spec.is_identity() || samples.empty()) return samples;
  RowMatrix centered = samples.items().rowwise() - spec.mu().transpose();
  // Rows are x^T, so solve L y = x for every row via X L^{-T}.
  RowMatrix solved = spec.cov_factor()
                         .triangularView<Eigen::Lower>()
                         .solve(centered.transpose())
                         .transpose();
  solved.rowwise() += spec.mu().transpose();
  return VecSampleSet(std::move(solved));
}

/// Inverse of whiten: y -> L (y - mu) + mu.
inline VecSampleSet unwhiten(const VecSampleSet& samples, const GaussianSpec& spec) {
  detail::require(samples.empty() || samples.dim() == spec.dim(), "unwhiten: dimension mismatch");
  if (spec.is_identity() || samples.empty()) return samples;
  RowMatrix centered = samples.items().rowwise() - spec.mu().transpose();
  RowMatrix mapped = centered * spec.cov_factor().transpose();
  mapped.rowwise() += spec.mu().transpose();
  return VecSampleSet(std::move(mapped));
}

}  // namespace ampkit
