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

#include "ampkit/verifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "ampkit/discrete_amp.hpp"
#include "ampkit/gaussian_amp.hpp"
#include "gtest/gtest.h"

using namespace ampkit;

namespace {

GaussianSpec standard(std::size_t d, double value = 0.0) {
  return GaussianSpec::identity(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), value));
}

std::vector<Label> iota_labels(std::size_t k) {
  std::vector<Label> v(k);
  std::iota(v.begin(), v.end(), Label{0});
  return v;
}

}  // namespace

TEST(verifiers, mean_distance_rejects_copies_of_mean) {
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(400, 0.5);
  RowMatrix z(100, 400);
  z.rowwise() = mu.transpose();
  const VerifierReport rep = verify_gaussian_mean_distance(VecSampleSet(z), mu);
  EXPECT_EQ(rep.verdict(), Verdict::reject);
  ASSERT_EQ(rep.tests().size(), 1u);
  EXPECT_DOUBLE_EQ(rep.tests()[0].statistic, 4.0);
  EXPECT_DOUBLE_EQ(rep.tests()[0].threshold, 2.0);
}

TEST(verifiers, mean_distance_accepts_iid_mostly) {
  const std::size_t d = 400, m = 100, trials = 3000;
  const SeedStream root(13);
  std::size_t accepted = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const VecSampleSet z = sample_gaussian(standard(d, 1.0), m, root.fork(t));
    accepted += verify_gaussian_mean_distance(z, Eigen::VectorXd::Constant(d, 1.0)).accepted();
  }
  EXPECT_GE(static_cast<double>(accepted) / trials, 0.84);
}

TEST(verifiers, mean_distance_drop_last_ignores_final_row) {
  const std::size_t d = 400;
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  VecSampleSet z = sample_gaussian(standard(d), 101, SeedStream(3));
  GaussianVerifierParams params;
  params.drop_last = true;
  const double before = verify_gaussian_mean_distance(z, mu, params).tests()[0].statistic;
  z.row(100).setConstant(1e6);
  EXPECT_EQ(verify_gaussian_mean_distance(z, mu, params).tests()[0].statistic, before);
  EXPECT_EQ(verify_gaussian_mean_distance(z, mu).verdict(), Verdict::reject);
}

TEST(verifiers, calibration_monotone_in_band) {
  const std::size_t d = 100, m = 50;
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  const SeedStream root(14);
  std::vector<VecSampleSet> sets;
  for (std::uint64_t t = 0; t < 400; ++t) sets.push_back(sample_gaussian(standard(d), m, root.fork(t)));
  std::size_t prev = 0;
  for (double c : {0.5, 1.0, 2.0, 4.0, 10.0}) {
    GaussianVerifierParams params;
    params.c_dev = c;
    std::size_t acc = 0;
    for (const auto& z : sets) acc += verify_gaussian_mean_distance(z, mu, params).accepted();
    EXPECT_GE(acc, prev);
    prev = acc;
  }
  EXPECT_EQ(prev, sets.size());
}

TEST(verifiers, three_test_rejects_repeated_mean) {
  // n = 1 and z = [mu, mu]: the designated sample has zero inner product.
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(9, 2.0);
  RowMatrix z(2, 9);
  z.rowwise() = mu.transpose();
  const VerifierReport rep = verify_gaussian_three_test(VecSampleSet(z), mu);
  EXPECT_EQ(rep.verdict(), Verdict::reject);
  ASSERT_EQ(rep.tests().size(), 3u);
  EXPECT_EQ(rep.tests()[2].name, "inner_product");
  EXPECT_FALSE(rep.tests()[2].passed);
}

TEST(verifiers, three_test_rejects_extra_at_sample_mean) {
  const std::size_t d = 200, n = 20;
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  const VecSampleSet x = sample_gaussian(standard(d), n, SeedStream(15));
  RowMatrix z(n + 1, d);
  z.topRows(n) = x.items();
  z.row(n) = x.mean().transpose();
  const VerifierReport rep = verify_gaussian_three_test(VecSampleSet(z), mu);
  EXPECT_EQ(rep.verdict(), Verdict::reject);
  EXPECT_NEAR(rep.tests()[2].statistic, 0.0, 1e-9);
}

TEST(verifiers, three_test_accepts_iid_mostly) {
  const std::size_t d = 400, n = 30, trials = 500;
  const SeedStream root(16);
  std::size_t acc = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    acc += verify_gaussian_three_test(sample_gaussian(standard(d), n + 1, root.fork(t)), Eigen::VectorXd::Zero(d))
               .accepted();
  }
  EXPECT_GE(static_cast<double>(acc) / trials, 0.75);
}

TEST(verifiers, leave_one_out_matches_direct_mean) {
  const VecSampleSet z = sample_gaussian(standard(7, 3.0), 12, SeedStream(17));
  const Eigen::VectorXd total = z.sum();
  for (std::size_t i = 0; i < z.size(); ++i) {
    Eigen::VectorXd direct = Eigen::VectorXd::Zero(7);
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (j != i) direct += z.row(j).transpose();
    }
    direct /= 11.0;
    EXPECT_LT((leave_one_out_mean(z, total, i) - direct).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(verifiers, all_position_verdicts_permutation_invariant) {
  const std::size_t d = 50;
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  const SeedStream root(18);
  for (std::uint64_t t = 0; t < 50; ++t) {
    const VecSampleSet z = sample_gaussian(standard(d), 8, root.fork(t));
    RowMatrix rev = z.items().colwise().reverse();
    EXPECT_EQ(verify_gaussian_three_test_all(z, mu).verdict(), verify_gaussian_three_test_all(VecSampleSet(rev), mu).verdict());
    EXPECT_EQ(verify_superset_inner_product(z, mu).verdict(), verify_superset_inner_product(VecSampleSet(rev), mu).verdict());
  }
  const VecSampleSet z = sample_gaussian(standard(d), 8, root);
  EXPECT_EQ(verify_gaussian_three_test_all(z, mu).tests().size(), 24u);
  EXPECT_EQ(verify_superset_inner_product(z, mu).tests().size(), 16u);
}

TEST(verifiers, superset_test_separates_naive_superset) {
  const std::size_t d = 4000, n = 30, trials = 100;
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  const SeedStream root(19);
  std::size_t iid_acc = 0, naive_acc = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const SeedStream trial = root.fork(t);
    iid_acc += verify_superset_inner_product(sample_gaussian(standard(d), n + 1, trial.fork(0)), mu).accepted();
    StreamEngine eng = trial.fork(2).engine();
    const VecSampleSet x = sample_gaussian(standard(d), n, trial.fork(1));
    naive_acc += verify_superset_inner_product(amplify_naive_superset(x, n + 1, eng), mu).accepted();
  }
  EXPECT_GE(iid_acc, 70u);
  EXPECT_LE(naive_acc, 40u);
}

TEST(verifiers, expected_unique_matches_simulation) {
  std::mt19937_64 gen(20);
  for (auto [n, k] : {std::pair{10, 100}, std::pair{100, 100}, std::pair{50, 2000}}) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    const int trials = 20000;
    double sum = 0, sum2 = 0;
    std::vector<int> draws(static_cast<std::size_t>(n));
    for (int t = 0; t < trials; ++t) {
      for (int& v : draws) v = pick(gen);
      std::sort(draws.begin(), draws.end());
      const double u = static_cast<double>(std::unique(draws.begin(), draws.end()) - draws.begin());
      sum += u;
      sum2 += u * u;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
    EXPECT_NEAR(expected_unique(n, k), mean, 4 * se) << n << "," << k;
  }
}

TEST(verifiers, unique_count_support_and_shape) {
  const DiscreteDist u = DiscreteDist::uniform(iota_labels(100), 200);
  StreamEngine eng = SeedStream(21).engine();
  const VerifierReport rep = verify_discrete_unique_count(SampleSet{{1, 2, 150}}, u, 2, eng);
  EXPECT_EQ(rep.verdict(), Verdict::reject);
  ASSERT_EQ(rep.tests().size(), 1u);
  EXPECT_EQ(rep.tests()[0].name, "support");
  EXPECT_EQ(rep.tests()[0].statistic, 1.0);

  const DiscreteDist general({0, 1, 2}, {0.2, 0.3, 0.5}, 3);
  EXPECT_THROW(verify_discrete_unique_count(SampleSet{{0}}, general, 1, eng), std::invalid_argument);
  EXPECT_THROW(verify_discrete_unique_count(SampleSet{{0}}, u, 0, eng), std::invalid_argument);
}

TEST(verifiers, unique_count_birthday_regime) {
  // k = 10000, n = 20 <= sqrt(k)/2: a repeat-free set passes, a constant one fails.
  const DiscreteDist u = DiscreteDist::uniform(iota_labels(10000), 10000);
  StreamEngine eng = SeedStream(22).engine();
  SampleSet distinct;
  for (Label l = 0; l < 60; ++l) distinct.items.push_back(l * 7);
  const VerifierReport ok = verify_discrete_unique_count(distinct, u, 20, eng);
  EXPECT_EQ(ok.verdict(), Verdict::accept);
  EXPECT_EQ(ok.tests().back().name, "no_repeats");
  const SampleSet same{std::vector<Label>(60, 5)};
  EXPECT_EQ(verify_discrete_unique_count(same, u, 20, eng).verdict(), Verdict::reject);
}

TEST(verifiers, unique_count_separates_amplified_output) {
  const std::size_t k = 40000, n = 10000, trials = 60;
  const DiscreteDist u = DiscreteDist::uniform(iota_labels(k), k);
  const std::size_t m = n + 30 * n / 200;
  const SeedStream root(23);
  std::size_t iid_acc = 0, amp_acc = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const SeedStream trial = root.fork(t);
    StreamEngine veng = trial.fork(3).engine();
    iid_acc += verify_discrete_unique_count(sample_discrete(u, m, trial.fork(0)), u, n, veng).accepted();
    // Repeating every 20th sample: the output has far fewer unique labels.
    SampleSet x = sample_discrete(u, n, trial.fork(1));
    for (std::size_t i = 0; i < m - n; ++i) x.items.push_back(x[i]);
    amp_acc += verify_discrete_unique_count(x, u, n, veng).accepted();
  }
  EXPECT_GE(iid_acc, 50u);
  EXPECT_EQ(amp_acc, 0u);
}

TEST(verifiers, unique_count_composite_gate) {
  // Heavy label 0 with mass 0.9 over a region of 400 labels.
  const DiscreteDist comp = DiscreteDist::composite(0, 0.9, [] {
    std::vector<Label> v(400);
    std::iota(v.begin(), v.end(), Label{1});
    return v;
  }(), 401);
  StreamEngine eng = SeedStream(24).engine();
  const VerifierReport heavy_only = verify_discrete_unique_count(SampleSet{std::vector<Label>(500, 0)}, comp, 400, eng);
  EXPECT_EQ(heavy_only.verdict(), Verdict::reject);
  EXPECT_EQ(heavy_only.tests().back().name, "region_count");

  SampleSet rich{std::vector<Label>(300, 0)};
  for (Label l = 1; l <= 100; ++l) rich.items.push_back(l);
  const VerifierReport passes = verify_discrete_unique_count(rich, comp, 400, eng);
  ASSERT_EQ(passes.tests().size(), 3u);
  EXPECT_EQ(passes.tests()[1].name, "region_count");
  EXPECT_TRUE(passes.tests()[1].passed);
  EXPECT_EQ(passes.verdict(), Verdict::accept);
}
