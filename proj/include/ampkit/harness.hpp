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
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/normal_distribution.hpp>
#include <json.hpp>

#include "ampkit/core.hpp"
#include "ampkit/discrete_amp.hpp"
#include "ampkit/gaussian_amp.hpp"
#include "ampkit/statmath.hpp"
#include "ampkit/verifiers.hpp"

namespace ampkit {

/// Invalid or inconsistent experiment configuration.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Parallel trials
// ---------------------------------------------------------------------------

/// Worker count: AMPKIT_THREADS if set and positive, else the hardware count.
inline unsigned thread_count() {
  if (const char* env = std::getenv("AMPKIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count). Results must be written to per-index slots
/// so the outcome does not depend on the worker count.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Game configuration
// ---------------------------------------------------------------------------

enum class AmplifierKind {
  identity,
  decorrelate,
  naive_superset,
  discard_resample,
  superset_mixture,
  discrete,
  discrete_budget,
  bernoulli,
};

enum class VerifierKind {
  mean_distance,
  three_test,
  three_test_all,
  superset_inner_product,
  unique_count,
};

enum class PriorKind { fixed, gaussian, uniform_ck, composite_ck };

NLOHMANN_JSON_SERIALIZE_ENUM(AmplifierKind, {
    {AmplifierKind::identity, "identity"},
    {AmplifierKind::decorrelate, "decorrelate"},
    {AmplifierKind::naive_superset, "naive_superset"},
    {AmplifierKind::discard_resample, "discard_resample"},
    {AmplifierKind::superset_mixture, "superset_mixture"},
    {AmplifierKind::discrete, "discrete"},
    {AmplifierKind::discrete_budget, "discrete_budget"},
    {AmplifierKind::bernoulli, "bernoulli"},
})

NLOHMANN_JSON_SERIALIZE_ENUM(VerifierKind, {
    {VerifierKind::mean_distance, "mean_distance"},
    {VerifierKind::three_test, "three_test"},
    {VerifierKind::three_test_all, "three_test_all"},
    {VerifierKind::superset_inner_product, "superset_inner_product"},
    {VerifierKind::unique_count, "unique_count"},
})

NLOHMANN_JSON_SERIALIZE_ENUM(PriorKind, {
    {PriorKind::fixed, "fixed"},
    {PriorKind::gaussian, "gaussian"},
    {PriorKind::uniform_ck, "uniform_ck"},
    {PriorKind::composite_ck, "composite_ck"},
})

struct GameConfig {
  AmplifierKind amplifier = AmplifierKind::identity;
  VerifierKind verifier = VerifierKind::mean_distance;
  PriorKind prior = PriorKind::fixed;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t d = 0;  // Gaussian games
  std::size_t k = 0;  // discrete games
  std::size_t trials = 1;
  std::uint64_t root_seed = 0;
  bool truth = false;  // feed i.i.d. X_m to the verifier instead of f(X_n)

  double eps = kDefaultEps;  // discrete budget parameter
  std::size_t r = 0;         // explicit budget (discrete_budget, superset_mixture)
  double mu_value = 0.0;     // fixed prior: every coordinate of mu
  GaussianVerifierParams gaussian_params;
  DiscreteVerifierParams discrete_params;

  bool gaussian() const noexcept { return d > 0; }
};

inline bool is_gaussian_amplifier(AmplifierKind a) {
  return a == AmplifierKind::decorrelate || a == AmplifierKind::naive_superset ||
         a == AmplifierKind::discard_resample || a == AmplifierKind::superset_mixture;
}

inline bool is_gaussian_verifier(VerifierKind v) { return v != VerifierKind::unique_count; }

/// Output size the amplifier produces from n inputs.
inline std::size_t amplified_size(const GameConfig& cfg) {
  switch (cfg.amplifier) {
    case AmplifierKind::identity: return cfg.n;
    case AmplifierKind::superset_mixture: return cfg.n + cfg.r;
    case AmplifierKind::discrete: return cfg.n + choose_r(cfg.n / 4, cfg.k, cfg.eps) / 8;
    case AmplifierKind::discrete_budget: return cfg.n + cfg.r / 8;
    case AmplifierKind::bernoulli:
    case AmplifierKind::decorrelate:
    case AmplifierKind::naive_superset:
    case AmplifierKind::discard_resample: return cfg.m;
  }
  return cfg.m;
}

inline void validate(const GameConfig& cfg) {
  auto fail = [](const std::string& what) { throw config_error("game config: " + what); };
  if (cfg.trials < 1) fail("trials must be >= 1");
  if (cfg.n < 1) fail("n must be >= 1");
  if ((cfg.d > 0) == (cfg.k > 0)) fail("set exactly one of d (Gaussian) or k (discrete)");
  if (cfg.m < cfg.n) fail("m must be >= n");
  const bool g = cfg.gaussian();
  if (cfg.amplifier != AmplifierKind::identity && is_gaussian_amplifier(cfg.amplifier) != g) {
    fail("amplifier family does not match d/k");
  }
  if (is_gaussian_verifier(cfg.verifier) != g) fail("verifier family does not match amplifier");
  if (g && (cfg.prior == PriorKind::uniform_ck || cfg.prior == PriorKind::composite_ck)) {
    fail("discrete prior used with a Gaussian game");
  }
  if (!g && cfg.prior == PriorKind::gaussian) fail("Gaussian prior used with a discrete game");
  if (cfg.prior == PriorKind::composite_ck && 4 * cfg.n <= cfg.k) fail("composite prior needs n > k/4");
  if (cfg.amplifier == AmplifierKind::identity && cfg.m != cfg.n) fail("identity amplifier needs m == n");
  if ((cfg.amplifier == AmplifierKind::discrete || cfg.amplifier == AmplifierKind::discrete_budget) &&
      cfg.n % 4 != 0) {
    fail("discrete amplifier needs n divisible by 4");
  }
  if (cfg.amplifier == AmplifierKind::superset_mixture && (cfg.n % 2 != 0 || 18 * cfg.r > cfg.n)) {
    fail("superset mixture needs even n and r <= n/18");
  }
  if (amplified_size(cfg) != cfg.m) fail("m does not match the amplifier's output size");
  if (cfg.eps <= 0 || cfg.eps >= 1) fail("eps must lie in (0,1)");
}

inline nlohmann::json to_json(const GameConfig& cfg) {
  nlohmann::json j;
  j["amplifier"] = cfg.amplifier;
  j["verifier"] = cfg.verifier;
  j["prior"] = cfg.prior;
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["d"] = cfg.d;
  j["k"] = cfg.k;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.root_seed;
  j["truth"] = cfg.truth;
  j["eps"] = cfg.eps;
  j["r"] = cfg.r;
  j["mu_value"] = cfg.mu_value;
  j["c_norm"] = cfg.gaussian_params.c_norm;
  j["c_dev"] = cfg.gaussian_params.c_dev;
  j["c_ip"] = cfg.gaussian_params.c_ip;
  j["drop_last"] = cfg.gaussian_params.drop_last;
  j["unique_slack"] = cfg.discrete_params.unique_slack;
  return j;
}

/// Reads a config; unknown keys are rejected so typos surface as errors.
inline GameConfig game_config_from_json(const nlohmann::json& j) {
  static const char* known[] = {"amplifier", "verifier", "prior", "n", "m", "d", "k", "trials",
                                "seed", "truth", "eps", "r", "mu_value", "c_norm", "c_dev",
                                "c_ip", "drop_last", "unique_slack"};
  if (!j.is_object()) throw config_error("game config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw config_error("game config: unknown key '" + key + "'");
    }
  }
  GameConfig cfg;
  try {
    auto enum_field = [&](const char* key, auto& out) {
      if (!j.contains(key)) return;
      using E = std::decay_t<decltype(out)>;
      const std::string name = j.at(key).template get<std::string>();
      const E parsed = nlohmann::json(name).template get<E>();
      if (nlohmann::json(parsed).template get<std::string>() != name) {
        throw config_error(std::string("game config: unknown ") + key + " '" + name + "'");
      }
      out = parsed;
    };
    enum_field("amplifier", cfg.amplifier);
    enum_field("verifier", cfg.verifier);
    enum_field("prior", cfg.prior);
    cfg.n = j.value("n", cfg.n);
    cfg.m = j.value("m", cfg.n);
    cfg.d = j.value("d", cfg.d);
    cfg.k = j.value("k", cfg.k);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.root_seed = j.value("seed", cfg.root_seed);
    cfg.truth = j.value("truth", cfg.truth);
    cfg.eps = j.value("eps", cfg.eps);
    cfg.r = j.value("r", cfg.r);
    cfg.mu_value = j.value("mu_value", cfg.mu_value);
    cfg.gaussian_params.c_norm = j.value("c_norm", cfg.gaussian_params.c_norm);
    cfg.gaussian_params.c_dev = j.value("c_dev", cfg.gaussian_params.c_dev);
    cfg.gaussian_params.c_ip = j.value("c_ip", cfg.gaussian_params.c_ip);
    cfg.gaussian_params.drop_last = j.value("drop_last", cfg.gaussian_params.drop_last);
    cfg.discrete_params.unique_slack = j.value("unique_slack", cfg.discrete_params.unique_slack);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("game config: ") + e.what());
  }
  return cfg;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = UINT64_C(0xcbf29ce484222325);
  for (unsigned char c : bytes) {
    h ^= c;
    h *= UINT64_C(0x100000001b3);
  }
  return h;
}

/// Hash of the canonical (sorted-key) JSON of everything except the seed.
inline std::string config_hash(const GameConfig& cfg) {
  nlohmann::json j = to_json(cfg);
  j.erase("seed");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

// ---------------------------------------------------------------------------
// Priors
// ---------------------------------------------------------------------------

/// k distinct labels from {0, ..., 8k}, in increasing order (Floyd's algorithm).
inline std::vector<Label> random_label_subset(std::size_t k, StreamEngine& eng) {
  const std::size_t universe = 8 * k + 1;
  std::vector<bool> chosen(universe, false);
  for (std::size_t j = universe - k; j < universe; ++j) {
    const std::size_t t = detail::uniform_index(eng, j + 1);
    chosen[chosen[t] ? j : t] = true;
  }
  std::vector<Label> labels;
  labels.reserve(k);
  for (std::size_t i = 0; i < universe; ++i) {
    if (chosen[i]) labels.push_back(static_cast<Label>(i));
  }
  return labels;
}

inline Eigen::VectorXd draw_gaussian_mean(const GameConfig& cfg, StreamEngine& eng) {
  const auto d = static_cast<Eigen::Index>(cfg.d);
  if (cfg.prior == PriorKind::fixed) return Eigen::VectorXd::Constant(d, cfg.mu_value);
  // mu ~ N(0, sqrt(d) I): per-coordinate standard deviation d^{1/4}.
  const double sd = std::pow(static_cast<double>(cfg.d), 0.25);
  boost::random::normal_distribution<double> normal;
  Eigen::VectorXd mu(d);
  for (Eigen::Index i = 0; i < d; ++i) mu(i) = sd * normal(eng);
  return mu;
}

inline DiscreteDist draw_discrete_dist(const GameConfig& cfg, StreamEngine& eng) {
  switch (cfg.prior) {
    case PriorKind::fixed: {
      std::vector<Label> labels(cfg.k);
      for (std::size_t i = 0; i < cfg.k; ++i) labels[i] = static_cast<Label>(i);
      return DiscreteDist::uniform(std::move(labels), cfg.k);
    }
    case PriorKind::uniform_ck:
      return DiscreteDist::uniform(random_label_subset(cfg.k, eng), cfg.k);
    case PriorKind::composite_ck: {
      std::vector<Label> labels = random_label_subset(cfg.k, eng);
      const std::size_t h = detail::uniform_index(eng, labels.size());
      const Label heavy = labels[h];
      labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(h));
      const double region = static_cast<double>(cfg.k) / (4.0 * static_cast<double>(cfg.n));
      return DiscreteDist::composite(heavy, 1.0 - region, std::move(labels), cfg.k);
    }
    case PriorKind::gaussian: break;
  }
  throw config_error("game config: prior does not define a discrete distribution");
}

// ---------------------------------------------------------------------------
// Game
// ---------------------------------------------------------------------------

struct GameResult {
  double accept_rate = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  std::size_t trials = 0;
  std::size_t accepted = 0;
  std::string config_hash;
  std::uint64_t seed = 0;
};

namespace detail {

inline VecSampleSet run_gaussian_amplifier(const GameConfig& cfg, const VecSampleSet& x, StreamEngine& eng) {
  switch (cfg.amplifier) {
    case AmplifierKind::identity: return x;
    case AmplifierKind::decorrelate: return amplify_decorrelate(x, cfg.m, eng).samples;
    case AmplifierKind::naive_superset: return amplify_naive_superset(x, cfg.m, eng);
    case AmplifierKind::discard_resample: return amplify_discard_resample(x, cfg.m, eng);
    case AmplifierKind::superset_mixture: return amplify_superset_mixture(x, cfg.r, eng);
    default: break;
  }
  throw config_error("game config: not a Gaussian amplifier");
}

inline SampleSet run_discrete_amplifier(const GameConfig& cfg, const SampleSet& x, StreamEngine& eng) {
  switch (cfg.amplifier) {
    case AmplifierKind::identity: return x;
    case AmplifierKind::discrete: return amplify_discrete(x, cfg.k, cfg.eps, eng);
    case AmplifierKind::discrete_budget: return amplify_discrete_with_budget(x, cfg.r, eng);
    case AmplifierKind::bernoulli:
      return amplify_bernoulli(x, static_cast<double>(cfg.m - cfg.n) / static_cast<double>(cfg.n), eng);
    default: break;
  }
  throw config_error("game config: not a discrete amplifier");
}

inline VerifierReport run_gaussian_verifier(const GameConfig& cfg, const VecSampleSet& z,
                                            const Eigen::VectorXd& mu) {
  switch (cfg.verifier) {
    case VerifierKind::mean_distance: return verify_gaussian_mean_distance(z, mu, cfg.gaussian_params);
    case VerifierKind::three_test: return verify_gaussian_three_test(z, mu, cfg.gaussian_params);
    case VerifierKind::three_test_all: return verify_gaussian_three_test_all(z, mu, cfg.gaussian_params);
    case VerifierKind::superset_inner_product:
      return verify_superset_inner_product(z, mu, cfg.gaussian_params);
    case VerifierKind::unique_count: break;
  }
  throw config_error("game config: not a Gaussian verifier");
}

}  // namespace detail

/// One trial. Streams: 0 prior, 1 data, 2 amplifier, 3 verifier.
inline bool run_trial(const GameConfig& cfg, const SeedStream& trial) {
  StreamEngine prior_eng = trial.fork(0).engine();
  StreamEngine data_eng = trial.fork(1).engine();
  StreamEngine amp_eng = trial.fork(2).engine();
  if (cfg.gaussian()) {
    const Eigen::VectorXd mu = draw_gaussian_mean(cfg, prior_eng);
    const GaussianSpec spec = GaussianSpec::identity(mu);
    VecSampleSet z = cfg.truth
                         ? sample_gaussian(spec, cfg.m, data_eng)
                         : detail::run_gaussian_amplifier(cfg, sample_gaussian(spec, cfg.n, data_eng), amp_eng);
    return detail::run_gaussian_verifier(cfg, z, mu).accepted();
  }
  const DiscreteDist dist = draw_discrete_dist(cfg, prior_eng);
  SampleSet z = cfg.truth ? sample_discrete(dist, cfg.m, data_eng)
                          : detail::run_discrete_amplifier(cfg, sample_discrete(dist, cfg.n, data_eng), amp_eng);
  StreamEngine ver_eng = trial.fork(3).engine();
  return verify_discrete_unique_count(z, dist, cfg.n, ver_eng, cfg.discrete_params).accepted();
}

inline GameResult run_game(const GameConfig& cfg) {
  validate(cfg);
  const SeedStream root(cfg.root_seed);
  std::vector<unsigned char> verdicts(cfg.trials, 0);
  parallel_for(cfg.trials, [&](std::size_t t) { verdicts[t] = run_trial(cfg, root.fork(t)) ? 1 : 0; });
  GameResult res;
  res.trials = cfg.trials;
  for (unsigned char v : verdicts) res.accepted += v;
  res.accept_rate = static_cast<double>(res.accepted) / static_cast<double>(res.trials);
  std::tie(res.ci_lo, res.ci_hi) = wilson_interval(res.accepted, res.trials);
  res.config_hash = config_hash(cfg);
  res.seed = cfg.root_seed;
  return res;
}

// ---------------------------------------------------------------------------
// TV estimation on count statistics
// ---------------------------------------------------------------------------

enum class CountStatistic {
  sorted,    // multiset of per-label counts; label-permutation invariant
  labelled,  // (label, count) pairs
};

struct TvEstimate {
  double tv = 0;
  double bias_bound = 0;  // sqrt(#distinct statistics / trials)
  std::size_t distinct = 0;
  std::size_t trials = 0;
};

using DiscreteSampler = std::function<SampleSet(const DiscreteDist&, StreamEngine&)>;

inline std::vector<std::uint64_t> count_statistic(const SampleSet& s, CountStatistic stat) {
  const CountVector cv = count_labels(s);
  std::vector<std::uint64_t> key;
  if (stat == CountStatistic::sorted) {
    for (const auto& c : cv.counts) key.push_back(c.second);
    std::sort(key.begin(), key.end(), std::greater<>());
  } else {
    for (const auto& c : cv.counts) {
      key.push_back(static_cast<std::uint64_t>(c.first));
      key.push_back(c.second);
    }
  }
  return key;
}

/// Plug-in TV between the count-statistic laws of `amplified` and of m i.i.d.
/// draws from dist, each estimated from `trials` runs.
inline TvEstimate estimate_tv_counts(const DiscreteSampler& amplified, const DiscreteDist& dist,
                                     std::size_t m, std::size_t trials, const SeedStream& rng,
                                     CountStatistic stat = CountStatistic::sorted) {
  detail::require(trials >= 10000, "estimate_tv_counts: need at least 10^4 trials");
  std::vector<std::vector<std::uint64_t>> amp_keys(trials), iid_keys(trials);
  const SeedStream amp_root = rng.fork(0);
  const SeedStream iid_root = rng.fork(1);
  parallel_for(trials, [&](std::size_t t) {
    StreamEngine a = amp_root.fork(t).engine();
    const SampleSet z = amplified(dist, a);
    if (z.size() != m) throw std::invalid_argument("estimate_tv_counts: amplifier output size differs from m");
    amp_keys[t] = count_statistic(z, stat);
    StreamEngine b = iid_root.fork(t).engine();
    iid_keys[t] = count_statistic(sample_discrete(dist, m, b), stat);
  });
  std::map<std::vector<std::uint64_t>, std::pair<std::size_t, std::size_t>> table;
  for (std::size_t t = 0; t < trials; ++t) {
    ++table[std::move(amp_keys[t])].first;
    ++table[std::move(iid_keys[t])].second;
  }
  if (table.size() * 10 > trials) {
    throw numeric_error("estimate_tv_counts: " + std::to_string(table.size()) +
                        " distinct statistics for " + std::to_string(trials) +
                        " trials; use a smaller instance or more trials");
  }
  double l1 = 0;
  for (const auto& [key, c] : table) {
    l1 += std::fabs(static_cast<double>(c.first) - static_cast<double>(c.second));
  }
  TvEstimate est;
  est.trials = trials;
  est.distinct = table.size();
  est.tv = 0.5 * l1 / static_cast<double>(trials);
  est.bias_bound = std::sqrt(static_cast<double>(est.distinct) / static_cast<double>(trials));
  return est;
}

// ---------------------------------------------------------------------------
// Exact TV for the decorrelating amplifier
// ---------------------------------------------------------------------------

/// Exact TV between m d-dimensional i.i.d. N(mu, I) draws and the decorrelated
/// output. The output covariance differs from I only on a 2-dimensional
/// eigenspace per coordinate with eigenvalue m/n, so the likelihood ratio
/// depends on a single chi^2 statistic S and the TV is
///   F(t) - F(t / lambda),   t = q ln(lambda) lambda / (lambda - 1),
/// with F the chi^2_q CDF, q = 2d and lambda = m/n. The eigenstructure is
/// confirmed numerically before the formula is used.
inline double exact_tv_decorrelate(std::size_t n, std::size_t m, std::size_t d) {
  detail::require(n >= 1 && m >= n, "exact_tv_decorrelate: need m >= n >= 1");
  detail::require(d >= 1, "exact_tv_decorrelate: d must be >= 1");
  detail::require(m <= 50, "exact_tv_decorrelate: m too large for the dense eigensolve (max 50)");
  if (m == n) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(analytic_output_cov(n, m), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw numeric_error("exact_tv_decorrelate: eigensolve failed");
  std::vector<double> off_unit;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double ev = eig.eigenvalues()(i);
    if (std::fabs(ev - 1.0) > 1e-9) off_unit.push_back(ev);
  }
  if (off_unit.empty()) return 0.0;
  const double lambda = off_unit.front();
  for (double ev : off_unit) {
    if (std::fabs(ev - lambda) > 1e-9 * lambda || ev <= 1.0) {
      throw numeric_error("exact_tv_decorrelate: unexpected eigenstructure");
    }
  }
  const double q = static_cast<double>(off_unit.size() * d);
  const double t = q * std::log(lambda) * lambda / (lambda - 1.0);
  const double tv = boost::math::gamma_p(q / 2.0, t / 2.0) - boost::math::gamma_p(q / 2.0, t / (2.0 * lambda));
  if (!std::isfinite(tv)) throw numeric_error("exact_tv_decorrelate: non-finite result");
  return clamp01(tv);
}

// ---------------------------------------------------------------------------
// Regression demo
// ---------------------------------------------------------------------------

struct RegressionRow {
  std::size_t n = 0;
  std::size_t d = 0;
  double mse_raw = 0;
  double se_raw = 0;
  double mse_amp = 0;
  double se_amp = 0;
};

namespace detail {

/// Residual sum of squares of the least-squares fit y ~ X theta.
inline double least_squares_rss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Eigen::VectorXd* theta) {
  Eigen::VectorXd th = X.colPivHouseholderQr().solve(y);
  const double rss = (y - X * th).squaredNorm();
  if (theta) *theta = std::move(th);
  return rss;
}

}  // namespace detail

/// Unexplained-variance estimation on n raw samples vs on n + 2 amplified ones.
///
/// Each trial: theta uniform on the unit sphere, x ~ N(0, I_d),
/// y = <theta, x> + N(0, noise_var). Raw estimate RSS/(n - d). Amplified: add two
/// points x ~ N(mean x, I) labelled by the fitted model plus noise of variance
/// (5/n) times the raw estimate, refit, and report RSS'/(n + 2 - d).
inline RegressionRow regression_demo(std::size_t n, std::size_t d, std::size_t trials,
                                     const SeedStream& rng, double noise_var = 0.25) {
  detail::require(n > d + 2, "regression_demo: need n > d + 2");
  detail::require(d >= 1 && trials >= 1, "regression_demo: d and trials must be positive");
  detail::require(noise_var >= 0, "regression_demo: noise variance must be non-negative");
  std::vector<double> err_raw(trials), err_amp(trials);
  const auto ni = static_cast<Eigen::Index>(n);
  const auto di = static_cast<Eigen::Index>(d);
  parallel_for(trials, [&](std::size_t t) {
    StreamEngine eng = rng.fork(t).engine();
    boost::random::normal_distribution<double> normal;
    Eigen::VectorXd theta(di);
    for (Eigen::Index j = 0; j < di; ++j) theta(j) = normal(eng);
    theta.normalize();
    Eigen::MatrixXd X(ni + 2, di);
    Eigen::VectorXd y(ni + 2);
    const double noise_sd = std::sqrt(noise_var);
    for (Eigen::Index i = 0; i < ni; ++i) {
      for (Eigen::Index j = 0; j < di; ++j) X(i, j) = normal(eng);
      y(i) = X.row(i).dot(theta) + noise_sd * normal(eng);
    }
    Eigen::VectorXd theta_hat;
    const double rss = detail::least_squares_rss(X.topRows(ni), y.head(ni), &theta_hat);
    const double raw = rss / static_cast<double>(n - d);

    const Eigen::RowVectorXd x_bar = X.topRows(ni).colwise().mean();
    const double label_sd = std::sqrt(5.0 / static_cast<double>(n) * raw);
    for (Eigen::Index i = ni; i < ni + 2; ++i) {
      for (Eigen::Index j = 0; j < di; ++j) X(i, j) = x_bar(j) + normal(eng);
      y(i) = X.row(i).dot(theta_hat) + label_sd * normal(eng);
    }
    const double amp = detail::least_squares_rss(X, y, nullptr) / static_cast<double>(n + 2 - d);
    err_raw[t] = (raw - noise_var) * (raw - noise_var);
    err_amp[t] = (amp - noise_var) * (amp - noise_var);
  });
  auto mean_se = [](const std::vector<double>& v) {
    const double T = static_cast<double>(v.size());
    double s = 0, s2 = 0;
    for (double e : v) {
      s += e;
      s2 += e * e;
    }
    const double mean = s / T;
    const double var = v.size() > 1 ? std::max(0.0, (s2 - T * mean * mean) / (T - 1)) : 0.0;
    return std::make_pair(mean, std::sqrt(var / T));
  };
  RegressionRow row;
  row.n = n;
  row.d = d;
  std::tie(row.mse_raw, row.se_raw) = mean_se(err_raw);
  std::tie(row.mse_amp, row.se_amp) = mean_se(err_amp);
  return row;
}

}  // namespace ampkit
