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

// Sample files and distribution specs.
//
// A sample file is a header line followed by one sample per line:
//
//   ampkit-samples discrete k=40        ampkit-samples vector d=3
//   17                                  0.5,-1.25,3
//   4                                   ...
//
// Blank lines and lines starting with '#' are skipped.

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ampkit/core.hpp"
#include "ampkit/harness.hpp"

namespace ampkit {

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct DiscreteFile {
  std::size_t k = 0;
  SampleSet samples;
};

struct VectorFile {
  std::size_t d = 0;
  VecSampleSet samples;
};

using SampleFile = std::variant<DiscreteFile, VectorFile>;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
  throw config_error(source + ":" + std::to_string(line) + ": " + what);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

}  // namespace detail

inline SampleFile read_samples(std::istream& in, const std::string& source = "<input>") {
  std::string line;
  std::size_t lineno = 0;
  std::string header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    header = detail::trim(line);
    if (!header.empty() && header[0] == '#') header.clear();
  }
  if (header.empty()) detail::parse_fail(source, lineno, "missing header line");

  std::istringstream hs(header);
  std::string magic, kind, param;
  hs >> magic >> kind >> param;
  if (magic != "ampkit-samples") detail::parse_fail(source, lineno, "header must start with 'ampkit-samples'");
  std::size_t size_param = 0;
  const std::string want = kind == "discrete" ? "k=" : "d=";
  if ((kind != "discrete" && kind != "vector") || param.rfind(want, 0) != 0 ||
      !detail::parse_number(param.substr(2), size_param) || size_param == 0) {
    detail::parse_fail(source, lineno, "header must be 'ampkit-samples discrete k=<k>' or 'ampkit-samples vector d=<d>'");
  }

  if (kind == "discrete") {
    DiscreteFile f;
    f.k = size_param;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      Label v = 0;
      if (!detail::parse_number(t, v) || v < 0) detail::parse_fail(source, lineno, "expected a non-negative integer label");
      f.samples.items.push_back(v);
    }
    return f;
  }

  VectorFile f;
  f.d = size_param;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      const std::string field = detail::trim(t.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      double v = 0;
      if (!detail::parse_number(field, v)) detail::parse_fail(source, lineno, "malformed number '" + field + "'");
      values.push_back(v);
      ++count;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (count != f.d) {
      detail::parse_fail(source, lineno, "expected " + std::to_string(f.d) + " values, found " + std::to_string(count));
    }
    ++rows;
  }
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(f.d));
  std::copy(values.begin(), values.end(), m.data());
  f.samples = VecSampleSet(std::move(m));
  return f;
}

inline SampleFile read_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open sample file '" + path + "'");
  return read_samples(in, path);
}

inline void write_samples(std::ostream& out, const SampleSet& s, std::size_t k) {
  out << "ampkit-samples discrete k=" << k << '\n';
  for (Label l : s) out << l << '\n';
}

inline void write_samples(std::ostream& out, const VecSampleSet& s) {
  out << "ampkit-samples vector d=" << s.dim() << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.dim(); ++j) {
      if (j) out << ',';
      out << format_double(s.items()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Distribution specs (JSON)
// ---------------------------------------------------------------------------
//
//   {"family": "gaussian", "mu": [..], "cov": [[..], ..]}     cov optional
//   {"family": "discrete", "k": 10, "labels": [..], "probs": [..]}
//   {"family": "uniform",  "k": 10, "labels": [..]}

using DistSpec = std::variant<DiscreteDist, GaussianSpec>;

inline DistSpec dist_from_json(const nlohmann::json& j) {
  try {
    const std::string family = j.at("family").get<std::string>();
    if (family == "gaussian") {
      const auto mu_v = j.at("mu").get<std::vector<double>>();
      Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(mu_v.data(), static_cast<Eigen::Index>(mu_v.size()));
      if (!j.contains("cov")) return GaussianSpec::identity(std::move(mu));
      const auto rows = j.at("cov").get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd cov(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw config_error("dist spec: cov must be square");
        for (std::size_t c = 0; c < rows.size(); ++c) {
          cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
        }
      }
      if (cov.rows() != mu.size()) throw config_error("dist spec: cov and mu dimensions differ");
      return GaussianSpec::from_covariance(std::move(mu), cov);
    }
    const auto k = j.at("k").get<std::size_t>();
    auto labels = j.at("labels").get<std::vector<Label>>();
    if (family == "uniform") return DiscreteDist::uniform(std::move(labels), k);
    if (family == "discrete") return DiscreteDist(std::move(labels), j.at("probs").get<std::vector<double>>(), k);
    throw config_error("dist spec: unknown family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("dist spec: ") + e.what());
  } catch (const config_error&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("dist spec: ") + e.what());
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Result rows
// ---------------------------------------------------------------------------

inline const char* game_csv_header() { return "config_hash,seed,trials,accept_rate,ci_lo,ci_hi"; }

inline std::string game_csv_row(const GameResult& r) {
  return r.config_hash + "," + std::to_string(r.seed) + "," + std::to_string(r.trials) + "," +
         format_double(r.accept_rate) + "," + format_double(r.ci_lo) + "," + format_double(r.ci_hi);
}

inline nlohmann::json to_json(const GameResult& r) {
  return {{"config_hash", r.config_hash}, {"seed", r.seed},       {"trials", r.trials},
          {"accepted", r.accepted},       {"accept_rate", r.accept_rate},
          {"ci_lo", r.ci_lo},             {"ci_hi", r.ci_hi}};
}

inline nlohmann::json to_json(const VerifierReport& rep) {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : rep.tests()) {
    tests.push_back({{"name", t.name}, {"statistic", t.statistic}, {"threshold", t.threshold}, {"passed", t.passed}});
  }
  return {{"verdict", to_string(rep.verdict())}, {"tests", tests}};
}

}  // namespace ampkit
