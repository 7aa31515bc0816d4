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

// Command-line front end. Exit codes: 0 success, 2 configuration or input
// error, 3 numeric failure, 1 anything else.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ampkit/core.hpp"
#include "ampkit/discrete_amp.hpp"
#include "ampkit/gaussian_amp.hpp"
#include "ampkit/harness.hpp"
#include "ampkit/io.hpp"
#include "ampkit/statmath.hpp"
#include "ampkit/verifiers.hpp"

namespace ampkit {

enum ExitCode : int { kExitOk = 0, kExitOther = 1, kExitConfig = 2, kExitNumeric = 3 };

namespace cli {

struct Options {
  // shared
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string output;

  // amplify
  std::string in_path, out_path, method, dist_path;
  std::size_t m = 0, k = 0, r = 0;
  double eps = kDefaultEps, c = 0;

  // verify
  std::string verifier;
  std::size_t n_claimed = 0;

  // game / calibrate
  std::string config_path;
  std::size_t trials = 0;
  bool truth = false;
  std::vector<std::size_t> sweep_m;

  // tv
  std::string tv_mode;
  std::size_t n = 0, d = 0, extra = 0;
  double p = 0.5;
  std::string tv_amplifier = "discrete";

  // demo
  std::size_t demo_d = 20, n_min = 23, n_max = 40;
  double noise_var = 0.25;
};

inline void emit_rows(std::ostream& out, const std::string& format, const std::vector<GameResult>& rows) {
  if (format == "jsonl") {
    for (const auto& r : rows) out << to_json(r).dump() << '\n';
    return;
  }
  out << game_csv_header() << '\n';
  for (const auto& r : rows) out << game_csv_row(r) << '\n';
}

/// Writes to --output when given, otherwise to `fallback`.
template <class Fn>
void with_output(const Options& o, std::ostream& fallback, Fn&& fn) {
  if (o.output.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(o.output);
  if (!f) throw config_error("cannot write '" + o.output + "'");
  fn(f);
}

inline int cmd_amplify(const Options& o, std::ostream& out) {
  SampleFile file = read_samples_file(o.in_path);
  StreamEngine eng = SeedStream(o.seed).fork(0).engine();
  std::ofstream dst(o.out_path);
  if (!dst) throw config_error("cannot write '" + o.out_path + "'");
  std::size_t n = 0, produced = 0;
  if (auto* df = std::get_if<DiscreteFile>(&file)) {
    n = df->samples.size();
    SampleSet z;
    if (o.method == "discrete") {
      z = o.r > 0 ? amplify_discrete_with_budget(df->samples, o.r, eng)
                  : amplify_discrete(df->samples, o.k ? o.k : df->k, o.eps, eng);
    } else if (o.method == "bernoulli") {
      z = amplify_bernoulli(df->samples, o.c, eng);
    } else {
      throw config_error("amplify: method '" + o.method + "' does not apply to discrete samples");
    }
    produced = z.size();
    write_samples(dst, z, df->k);
  } else {
    auto& vf = std::get<VectorFile>(file);
    n = vf.samples.size();
    const std::size_t m = o.m ? o.m : n;
    VecSampleSet z;
    if (o.method == "decorrelate") {
      if (!o.dist_path.empty()) {
        DistSpec spec = dist_from_json(read_json_file(o.dist_path));
        auto* g = std::get_if<GaussianSpec>(&spec);
        if (!g) throw config_error("amplify: --dist must describe a Gaussian");
        if (g->dim() != vf.d) throw config_error("amplify: --dist dimension differs from the sample file");
        z = amplify_decorrelate(vf.samples, m, *g, eng).samples;
      } else {
        z = amplify_decorrelate(vf.samples, m, eng).samples;
      }
    } else if (o.method == "naive-superset") {
      z = amplify_naive_superset(vf.samples, m, eng);
    } else if (o.method == "discard-resample") {
      z = amplify_discard_resample(vf.samples, m, eng);
    } else if (o.method == "superset-mixture") {
      z = amplify_superset_mixture(vf.samples, o.r, eng);
    } else {
      throw config_error("amplify: method '" + o.method + "' does not apply to vector samples");
    }
    produced = z.size();
    write_samples(dst, z);
  }
  out << nlohmann::json{{"method", o.method}, {"n", n}, {"m", produced}, {"seed", o.seed}, {"output", o.out_path}}.dump()
      << '\n';
  return kExitOk;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
  SampleFile file = read_samples_file(o.in_path);
  DistSpec spec = dist_from_json(read_json_file(o.dist_path));
  VerifierReport report;
  if (auto* df = std::get_if<DiscreteFile>(&file)) {
    auto* dist = std::get_if<DiscreteDist>(&spec);
    if (!dist) throw config_error("verify: discrete samples need a discrete distribution spec");
    if (o.verifier != "unique-count") throw config_error("verify: discrete samples support only 'unique-count'");
    if (o.n_claimed == 0) throw config_error("verify: unique-count needs --n-claimed");
    StreamEngine eng = SeedStream(o.seed).fork(0).engine();
    report = verify_discrete_unique_count(df->samples, *dist, o.n_claimed, eng);
  } else {
    auto& vf = std::get<VectorFile>(file);
    auto* g = std::get_if<GaussianSpec>(&spec);
    if (!g) throw config_error("verify: vector samples need a Gaussian distribution spec");
    if (g->dim() != vf.d) throw config_error("verify: distribution dimension differs from the sample file");
    const VecSampleSet z = whiten(vf.samples, *g);
    if (o.verifier == "mean-distance") {
      report = verify_gaussian_mean_distance(z, g->mu());
    } else if (o.verifier == "three-test") {
      report = verify_gaussian_three_test(z, g->mu());
    } else if (o.verifier == "three-test-all") {
      report = verify_gaussian_three_test_all(z, g->mu());
    } else if (o.verifier == "superset") {
      report = verify_superset_inner_product(z, g->mu());
    } else {
      throw config_error("verify: verifier '" + o.verifier + "' does not apply to vector samples");
    }
  }
  nlohmann::json j = to_json(report);
  j["seed"] = o.seed;
  out << j.dump() << '\n';
  return kExitOk;
}

inline GameConfig load_game(const Options& o, bool seed_given, bool trials_given) {
  GameConfig cfg = game_config_from_json(read_json_file(o.config_path));
  if (seed_given) cfg.root_seed = o.seed;
  if (trials_given) cfg.trials = o.trials;
  if (o.truth) cfg.truth = true;
  return cfg;
}

inline int cmd_game(const Options& o, bool seed_given, bool trials_given, std::ostream& out) {
  const GameConfig cfg = load_game(o, seed_given, trials_given);
  const GameResult res = run_game(cfg);
  with_output(o, out, [&](std::ostream& s) { emit_rows(s, o.format, {res}); });
  return kExitOk;
}

inline int cmd_calibrate(const Options& o, bool seed_given, bool trials_given, std::ostream& out) {
  GameConfig base = load_game(o, seed_given, trials_given);
  base.truth = true;
  base.amplifier = AmplifierKind::identity;
  const std::vector<std::size_t> ms = o.sweep_m.empty() ? std::vector<std::size_t>{base.m} : o.sweep_m;
  std::vector<GameResult> rows;
  for (std::size_t m : ms) {
    GameConfig cfg = base;
    cfg.n = cfg.m = m;
    rows.push_back(run_game(cfg));
  }
  with_output(o, out, [&](std::ostream& s) {
    if (o.format == "jsonl") {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        nlohmann::json j = to_json(rows[i]);
        j["m"] = ms[i];
        s << j.dump() << '\n';
      }
    } else {
      s << "m," << game_csv_header() << '\n';
      for (std::size_t i = 0; i < rows.size(); ++i) s << ms[i] << ',' << game_csv_row(rows[i]) << '\n';
    }
  });
  return kExitOk;
}

inline int cmd_tv(const Options& o, std::ostream& out) {
  nlohmann::json j{{"mode", o.tv_mode}, {"seed", o.seed}};
  if (o.tv_mode == "gaussian-exact") {
    j["n"] = o.n;
    j["m"] = o.m;
    j["d"] = o.d;
    j["tv"] = exact_tv_decorrelate(o.n, o.m, o.d);
    j["upper"] = gaussian_tv_upper(o.n, o.m, o.d);
  } else if (o.tv_mode == "bernoulli-exact") {
    j["n"] = o.n;
    j["extra"] = o.extra;
    j["p"] = o.p;
    j["tv"] = tv_binomial_vs_compound(o.n, o.extra, o.p);
  } else if (o.tv_mode == "counts") {
    if (o.trials == 0) throw config_error("tv: counts mode needs --trials");
    DiscreteSampler sampler;
    std::size_t m = 0;
    std::optional<DiscreteDist> dist;
    auto stat = CountStatistic::sorted;
    if (o.tv_amplifier == "discrete") {
      if (o.k == 0 || o.n == 0) throw config_error("tv: counts mode needs --k and --n");
      std::vector<Label> labels(o.k);
      for (std::size_t i = 0; i < o.k; ++i) labels[i] = static_cast<Label>(i);
      dist = DiscreteDist::uniform(std::move(labels), o.k);
      const std::size_t n = o.n;
      const std::size_t k = o.k;
      const double eps = o.eps;
      m = n + choose_r(n / 4, k, eps) / 8;
      sampler = [n, k, eps](const DiscreteDist& dd, StreamEngine& eng) {
        return amplify_discrete(sample_discrete(dd, n, eng), k, eps, eng);
      };
    } else if (o.tv_amplifier == "bernoulli") {
      if (o.n == 0) throw config_error("tv: counts mode needs --n");
      dist = DiscreteDist({0, 1}, {1.0 - o.p, o.p}, 2);
      const std::size_t n = o.n;
      const double c = o.c;
      m = n + static_cast<std::size_t>(std::floor(c * static_cast<double>(n) + 1e-9));
      sampler = [n, c](const DiscreteDist& dd, StreamEngine& eng) {
        return amplify_bernoulli(sample_discrete(dd, n, eng), c, eng);
      };
      stat = CountStatistic::labelled;
    } else {
      throw config_error("tv: unknown --amplifier '" + o.tv_amplifier + "'");
    }
    const TvEstimate est = estimate_tv_counts(sampler, *dist, m, o.trials, SeedStream(o.seed), stat);
    j["amplifier"] = o.tv_amplifier;
    j["n"] = o.n;
    j["m"] = m;
    j["trials"] = est.trials;
    j["tv"] = est.tv;
    j["bias_bound"] = est.bias_bound;
    j["distinct"] = est.distinct;
  } else {
    throw config_error("tv: unknown --mode '" + o.tv_mode + "'");
  }
  with_output(o, out, [&](std::ostream& s) { s << j.dump() << '\n'; });
  return kExitOk;
}

inline int cmd_demo_regression(const Options& o, std::ostream& out) {
  if (o.n_min > o.n_max) throw config_error("demo regression: --n-min exceeds --n-max");
  const std::size_t trials = o.trials ? o.trials : 10000;
  std::vector<RegressionRow> rows;
  const SeedStream root(o.seed);
  for (std::size_t n = o.n_min; n <= o.n_max; ++n) {
    rows.push_back(regression_demo(n, o.demo_d, trials, root.fork(n), o.noise_var));
  }
  with_output(o, out, [&](std::ostream& s) {
    if (o.format == "jsonl") {
      for (const auto& r : rows) {
        s << nlohmann::json{{"n", r.n}, {"d", r.d}, {"trials", trials}, {"seed", o.seed},
                            {"mse_raw", r.mse_raw}, {"se_raw", r.se_raw},
                            {"mse_amp", r.mse_amp}, {"se_amp", r.se_amp}}.dump()
          << '\n';
      }
      return;
    }
    s << "n,d,trials,seed,mse_raw,se_raw,mse_amp,se_amp\n";
    for (const auto& r : rows) {
      s << r.n << ',' << r.d << ',' << trials << ',' << o.seed << ',' << format_double(r.mse_raw) << ','
        << format_double(r.se_raw) << ',' << format_double(r.mse_amp) << ',' << format_double(r.se_amp) << '\n';
    }
  });
  return kExitOk;
}

}  // namespace cli

/// Entry point shared by the binary and the tests.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  cli::Options o;
  CLI::App app{"ampkit: sample amplification, verifiers and Monte Carlo games"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"csv", "jsonl"};

  auto* amplify = app.add_subcommand("amplify", "Amplify a sample file");
  amplify->add_option("--in", o.in_path, "Input sample file")->required();
  amplify->add_option("--out", o.out_path, "Output sample file")->required();
  amplify->add_option("--method", o.method, "Amplifier")
      ->required()
      ->check(CLI::IsMember({"discrete", "bernoulli", "decorrelate", "naive-superset", "discard-resample",
                             "superset-mixture"}));
  amplify->add_option("--m", o.m, "Output size (Gaussian amplifiers)");
  amplify->add_option("--k", o.k, "Support bound (defaults to the file header)");
  amplify->add_option("--eps", o.eps, "Budget parameter for the discrete amplifier");
  amplify->add_option("--r", o.r, "Explicit budget (discrete, superset-mixture)");
  amplify->add_option("--c", o.c, "Extra fraction (bernoulli)");
  amplify->add_option("--dist", o.dist_path, "Gaussian spec JSON for non-identity covariance");
  amplify->add_option("--seed", o.seed, "Root seed");

  auto* verify = app.add_subcommand("verify", "Run a verifier against a known distribution");
  verify->add_option("--in", o.in_path, "Sample file")->required();
  verify->add_option("--dist", o.dist_path, "Distribution spec JSON")->required();
  verify->add_option("--verifier", o.verifier, "Verifier")
      ->required()
      ->check(CLI::IsMember({"mean-distance", "three-test", "three-test-all", "superset", "unique-count"}));
  verify->add_option("--n-claimed", o.n_claimed, "Amplifier input size (unique-count)");
  verify->add_option("--seed", o.seed, "Root seed");

  auto* game = app.add_subcommand("game", "Run an amplifier-vs-verifier game");
  auto* calibrate = app.add_subcommand("calibrate", "Truth-mode acceptance sweep");
  for (auto* sub : {game, calibrate}) {
    sub->add_option("--config", o.config_path, "Game config JSON")->required();
    sub->add_option("--trials", o.trials, "Override trial count");
    sub->add_option("--seed", o.seed, "Override root seed");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember(formats));
    sub->add_option("--output", o.output, "Write results here instead of stdout");
  }
  game->add_flag("--truth", o.truth, "Feed i.i.d. samples to the verifier");
  calibrate->add_option("--sweep-m", o.sweep_m, "Sample sizes to sweep")->delimiter(',');

  auto* tv = app.add_subcommand("tv", "Total variation computations");
  tv->add_option("--mode", o.tv_mode, "Mode")
      ->required()
      ->check(CLI::IsMember({"gaussian-exact", "bernoulli-exact", "counts"}));
  tv->add_option("--n", o.n, "Input size");
  tv->add_option("--m", o.m, "Output size");
  tv->add_option("--d", o.d, "Dimension");
  tv->add_option("--extra", o.extra, "Extra tosses (bernoulli-exact)");
  tv->add_option("--p", o.p, "Coin bias");
  tv->add_option("--c", o.c, "Extra fraction (counts, bernoulli)");
  tv->add_option("--k", o.k, "Support size (counts, discrete)");
  tv->add_option("--eps", o.eps, "Budget parameter (counts, discrete)");
  tv->add_option("--amplifier", o.tv_amplifier, "counts mode amplifier")->check(CLI::IsMember({"discrete", "bernoulli"}));
  tv->add_option("--trials", o.trials, "Monte Carlo trials (counts)");
  tv->add_option("--seed", o.seed, "Root seed");
  tv->add_option("--output", o.output, "Write results here instead of stdout");

  auto* demo = app.add_subcommand("demo", "Demonstrations");
  demo->require_subcommand(1);
  auto* regression = demo->add_subcommand("regression", "Unexplained-variance estimation with amplified samples");
  regression->add_option("--d", o.demo_d, "Dimension");
  regression->add_option("--n-min", o.n_min, "Smallest n");
  regression->add_option("--n-max", o.n_max, "Largest n");
  regression->add_option("--trials", o.trials, "Trials per n (default 10000)");
  regression->add_option("--noise-var", o.noise_var, "Label noise variance");
  regression->add_option("--seed", o.seed, "Root seed");
  regression->add_option("--format", o.format, "Output format")->check(CLI::IsMember(formats));
  regression->add_option("--output", o.output, "Write results here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*amplify) return cli::cmd_amplify(o, out);
    if (*verify) return cli::cmd_verify(o, out);
    if (*game) return cli::cmd_game(o, game->count("--seed") > 0, game->count("--trials") > 0, out);
    if (*calibrate) {
      return cli::cmd_calibrate(o, calibrate->count("--seed") > 0, calibrate->count("--trials") > 0, out);
    }
    if (*tv) return cli::cmd_tv(o, out);
    if (*regression) return cli::cmd_demo_regression(o, out);
  } catch (const numeric_error& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}

}  // namespace ampkit
