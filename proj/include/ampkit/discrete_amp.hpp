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
#include <utility>
#include <vector>

#include <boost/random/poisson_distribution.hpp>

#include "ampkit/core.hpp"

namespace ampkit {

inline constexpr double kDefaultEps = 2.0 / 15.0;

/// Per-label counts, sorted by label.
struct CountVector {
  std::vector<std::pair<Label, std::uint64_t>> counts;

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& c : counts) t += c.second;
    return t;
  }
  std::uint64_t count_of(Label l) const {
    auto it = std::lower_bound(counts.begin(), counts.end(), std::make_pair(l, std::uint64_t{0}));
    return (it != counts.end() && it->first == l) ? it->second : 0;
  }
};

inline CountVector count_labels(const std::vector<Label>& items) {
  std::vector<Label> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  CountVector cv;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    cv.counts.emplace_back(sorted[i], static_cast<std::uint64_t>(j - i));
    i = j;
  }
  return cv;
}

inline CountVector count_labels(const SampleSet& s) { return count_labels(s.items); }

/// Amplification budget r admitted for a 4n-sample input over support k.
inline std::size_t choose_r(std::size_t n, std::size_t k, double eps = kDefaultEps) {
  detail::require(n >= 1 && k >= 1, "choose_r: n and k must be positive");
  detail::require(eps > 0 && eps < 1, "choose_r: eps must lie in (0,1)");
  const double r = static_cast<double>(n) * std::pow(eps, 1.5) /
                   (4.0 * std::sqrt(static_cast<double>(k)));
  return static_cast<std::size_t>(std::floor(r));
}

struct PoissonSplit {
  SampleSet part1;
  SampleSet part2;
  bool overflow = false;
};

/// Slices 4n samples into Poisson(n)-sized halves given the two sizes.
inline PoissonSplit poisson_split_sized(const SampleSet& x, std::size_t n, std::size_t n1,
                                        std::size_t n2) {
  detail::require(n >= 1 && x.size() == 4 * n, "poisson_split: input must hold exactly 4n samples");
  PoissonSplit out;
  if (n1 + n2 <= 4 * n) {
    out.part1.items.assign(x.items.begin(), x.items.begin() + static_cast<std::ptrdiff_t>(n1));
    out.part2.items.assign(x.items.begin() + static_cast<std::ptrdiff_t>(n1),
                           x.items.begin() + static_cast<std::ptrdiff_t>(n1 + n2));
  } else {
    out.overflow = true;
    out.part1.items.assign(n1, x[0]);
    out.part2.items.assign(n2, x[0]);
  }
  return out;
}

inline PoissonSplit poisson_split(const SampleSet& x, std::size_t n, StreamEngine& eng) {
  detail::require(n >= 1 && x.size() == 4 * n, "poisson_split: input must hold exactly 4n samples");
  boost::random::poisson_distribution<std::int64_t, double> pois(static_cast<double>(n));
  const auto n1 = static_cast<std::size_t>(pois(eng));
  const auto n2 = static_cast<std::size_t>(pois(eng));
  return poisson_split_sized(x, n, n1, n2);
}

/// part1 ++ shuffle(part2 ++ fresh), fresh holding Poisson(r u_i / n) copies
/// of each label i seen u_i times in part1.
inline SampleSet amplify_poissonized(const SampleSet& part1, const SampleSet& part2, std::size_t n,
                                     double r, StreamEngine& eng) {
  detail::require(n >= 1, "amplify_poissonized: n must be positive");
  detail::require(r >= 0, "amplify_poissonized: r must be non-negative");
  SampleSet out;
  out.items.reserve(part1.size() + part2.size() + static_cast<std::size_t>(2 * r) + 16);
  out.items = part1.items;
  out.items.insert(out.items.end(), part2.items.begin(), part2.items.end());
  if (r > 0) {
    for (const auto& [label, u] : count_labels(part1).counts) {
      boost::random::poisson_distribution<std::int64_t, double> pois(
          r * static_cast<double>(u) / static_cast<double>(n));
      const auto extra = static_cast<std::size_t>(pois(eng));
      out.items.insert(out.items.end(), extra, label);
    }
  }
  detail::shuffle(out.items, part1.size(), eng);
  return out;
}

/// Amplifies 4n samples to 4n + floor(r/8) with an explicit budget r.
inline SampleSet amplify_discrete_with_budget(const SampleSet& x, std::size_t r, StreamEngine& eng) {
  detail::require(!x.empty() && x.size() % 4 == 0, "amplify_discrete: input size must be a positive multiple of 4");
  const std::size_t n = x.size() / 4;
  const std::size_t target = x.size() + r / 8;

  PoissonSplit split = poisson_split(x, n, eng);
  const std::size_t n_prime = split.part1.size() + split.part2.size();
  SampleSet out = amplify_poissonized(split.part1, split.part2, n, static_cast<double>(r), eng);

  // Pad with copies of x_1 up to N' + r/8.
  if (out.size() < n_prime + r / 8) out.items.resize(n_prime + r / 8, x[0]);

  // Top up from the untouched tail of the input, or trim from the end.
  if (out.size() < target) {
    const std::size_t need = target - out.size();
    out.items.insert(out.items.end(), x.items.begin() + static_cast<std::ptrdiff_t>(n_prime),
                     x.items.begin() + static_cast<std::ptrdiff_t>(n_prime + need));
  } else {
    out.items.resize(target);
  }
  return out;
}

/// Amplifies 4n samples over support size k using the budget choose_r(n, k, eps).
inline SampleSet amplify_discrete(const SampleSet& x, std::size_t k, double eps, StreamEngine& eng) {
  detail::require(!x.empty() && x.size() % 4 == 0, "amplify_discrete: input size must be a positive multiple of 4");
  detail::require(k >= count_labels(x).counts.size(), "amplify_discrete: more distinct labels than k");
  return amplify_discrete_with_budget(x, choose_r(x.size() / 4, k, eps), eng);
}

inline SampleSet amplify_discrete(const SampleSet& x, std::size_t k, StreamEngine& eng) {
  return amplify_discrete(x, k, kDefaultEps, eng);
}

/// Coin flips: appends floor(c n) tosses with the empirical bias, then shuffles.
inline SampleSet amplify_bernoulli(const SampleSet& bits, double c, StreamEngine& eng) {
  detail::require(!bits.empty(), "amplify_bernoulli: empty input");
  detail::require(c >= 0, "amplify_bernoulli: c must be non-negative");
  std::size_t heads = 0;
  for (Label b : bits) {
    detail::require(b == 0 || b == 1, "amplify_bernoulli: labels must be 0 or 1");
    heads += static_cast<std::size_t>(b);
  }
  const double n = static_cast<double>(bits.size());
  const auto extra = static_cast<std::size_t>(std::floor(c * n + 1e-9));
  const double p_hat = static_cast<double>(heads) / n;
  SampleSet out = bits;
  for (std::size_t i = 0; i < extra; ++i) out.items.push_back(eng.uniform01() < p_hat ? 1 : 0);
  detail::shuffle(out.items, 0, eng);
  return out;
}

}  // namespace ampkit
