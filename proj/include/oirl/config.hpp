// Copyright 2026 The OnlineIRL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Experiment configuration and its key = value file format.
//
//   # comment
//   [simulation]
//   Ts = 0.005
//   x0 = 1, 1
//
// Every field has a default, so an empty file reproduces the reference
// benchmark run.

#ifndef OIRL_CONFIG_HPP_
#define OIRL_CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oirl/dynamics.hpp"
#include "oirl/errors.hpp"
#include "oirl/linalg.hpp"
#include "oirl/purging.hpp"
#include "oirl/sysid.hpp"

namespace oirl {

struct ExperimentConfig {
  // [simulation]
  double Ts = 0.005;
  double T_end = 30.0;
  Vec x0 = Vec::Ones(2);

  // [sysid]
  double tau1 = 1.0;
  double tau2 = 0.6;
  std::optional<double> k_theta;  // defaults to 0.5 / N
  double beta1 = 1.0;
  double Gamma0_scale = 1.0;
  std::size_t M = 100;
  double c_lower = 1e-6;

  // [irl]
  std::size_t N = 150;
  double xi1 = 1.1;
  double xi2 = 1e-3;
  double r1 = 1.0;

  // [purging]
  double T1 = 1.0;
  double kappa1_lower = 1e6;
  double kappa2_lower = 1e6;
  PurgeMode purge_mode = PurgeMode::kMetric;
  double epsilon_time = 5.0;
  Vec W0 = Vec::Zero(5);

  // [query]
  int query_count = 1;  // demonstrator queries per sample step
  double query_inflation = 0.2;

  // [run]
  std::uint64_t seed = 0;

  double k_theta_value() const { return k_theta ? *k_theta : 0.5 / double(N); }

  // Checks the invariants for a model with p unknown parameters and K IRL
  // unknowns. Throws ConfigError.
  void validate(int p = 3, int K = 5, int state_dim = 2) const {
    auto fail = [](const std::string& why) { throw ConfigError(why); };
    if (!(Ts > 0.0) || !std::isfinite(Ts)) fail("Ts must be positive");
    try {
      step_count(Ts, T_end);
      window_samples(tau1, Ts, "tau1");
      window_samples(tau2, Ts, "tau2");
      window_samples(T1, Ts, "T1");
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
    if (tau1 > T_end || tau2 > T_end || T1 > T_end) fail("an estimator window exceeds T_end");
    if (x0.size() != state_dim || !x0.allFinite()) fail("x0 has the wrong dimension");
    if (!(k_theta_value() > 0.0) || !(beta1 > 0.0) || !(Gamma0_scale > 0.0) || !(c_lower > 0.0)) {
      fail("estimator gains must be positive");
    }
    if (M < std::size_t(p)) fail("M is smaller than the number of unknown dynamics parameters");
    if (N < std::size_t(K)) fail("N is smaller than the number of unknown weights");
    if (!(xi1 >= 0.0) || !(xi2 > 0.0) || !(r1 > 0.0)) fail("xi1 >= 0, xi2 > 0 and r1 > 0 required");
    if (!(kappa1_lower > 0.0) || !(kappa2_lower > 0.0)) fail("kappa thresholds must be positive");
    if (purge_mode == PurgeMode::kTime && !(epsilon_time > 0.0)) {
      fail("epsilon_time must be positive in time mode");
    }
    if (W0.size() != K) fail("W0 must have " + std::to_string(K) + " entries");
    if (query_count < 0) fail("query_count must be non-negative");
    if (!(query_inflation >= 0.0)) fail("query_inflation must be non-negative");
  }

  nlohmann::ordered_json to_json() const {
    auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    nlohmann::ordered_json j;
    j["simulation"] = {{"Ts", Ts}, {"T_end", T_end}, {"x0", vec(x0)}};
    j["sysid"] = {{"tau1", tau1},       {"tau2", tau2},
                  {"k_theta", k_theta_value()}, {"beta1", beta1},
                  {"Gamma0_scale", Gamma0_scale}, {"M", M},
                  {"c_lower", c_lower}};
    j["irl"] = {{"N", N}, {"xi1", xi1}, {"xi2", xi2}, {"r1", r1}};
    j["purging"] = {{"T1", T1},
                    {"kappa1_lower", kappa1_lower},
                    {"kappa2_lower", kappa2_lower},
                    {"mode", to_string(purge_mode)},
                    {"epsilon_time", epsilon_time},
                    {"W0", vec(W0)}};
    j["query"] = {{"count", query_count}, {"inflation", query_inflation}};
    j["run"] = {{"seed", seed}};
    return j;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("line " + std::to_string(line) + ": '" + text + "' is not a finite number");
}

inline long long parse_integer(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("line " + std::to_string(line) + ": '" + text + "' is not an integer");
}

inline Vec parse_vector(const std::string& text, std::size_t line) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(parse_double(trim(item), line));
  Vec v(Eigen::Index(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(Eigen::Index(i)) = vals[i];
  return v;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  using detail::parse_double;
  using detail::parse_integer;
  using detail::trim;
  ExperimentConfig cfg;
  std::string section;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find_first_of("#;"));
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(line) + ": bad section");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;

    auto count = [&](long long lo) {
      const long long v = parse_integer(value, line);
      if (v < lo) throw ConfigError("line " + std::to_string(line) + ": " + key + " too small");
      return v;
    };

    if (full == "simulation.Ts") cfg.Ts = parse_double(value, line);
    else if (full == "simulation.T_end") cfg.T_end = parse_double(value, line);
    else if (full == "simulation.x0") cfg.x0 = detail::parse_vector(value, line);
    else if (full == "sysid.tau1") cfg.tau1 = parse_double(value, line);
    else if (full == "sysid.tau2") cfg.tau2 = parse_double(value, line);
    else if (full == "sysid.k_theta") cfg.k_theta = parse_double(value, line);
    else if (full == "sysid.beta1") cfg.beta1 = parse_double(value, line);
    else if (full == "sysid.Gamma0_scale") cfg.Gamma0_scale = parse_double(value, line);
    else if (full == "sysid.M") cfg.M = std::size_t(count(1));
    else if (full == "sysid.c_lower") cfg.c_lower = parse_double(value, line);
    else if (full == "irl.N") cfg.N = std::size_t(count(1));
    else if (full == "irl.xi1") cfg.xi1 = parse_double(value, line);
    else if (full == "irl.xi2") cfg.xi2 = parse_double(value, line);
    else if (full == "irl.r1") cfg.r1 = parse_double(value, line);
    else if (full == "purging.T1") cfg.T1 = parse_double(value, line);
    else if (full == "purging.kappa1_lower") cfg.kappa1_lower = parse_double(value, line);
    else if (full == "purging.kappa2_lower") cfg.kappa2_lower = parse_double(value, line);
    else if (full == "purging.mode") {
      try {
        cfg.purge_mode = parse_purge_mode(value);
      } catch (const InvalidArgument& e) {
        throw ConfigError("line " + std::to_string(line) + ": " + e.what());
      }
    } else if (full == "purging.epsilon_time") cfg.epsilon_time = parse_double(value, line);
    else if (full == "purging.W0") cfg.W0 = detail::parse_vector(value, line);
    else if (full == "query.count") cfg.query_count = int(count(0));
    else if (full == "query.inflation") cfg.query_inflation = parse_double(value, line);
    else if (full == "run.seed") cfg.seed = std::uint64_t(count(0));
    else throw ConfigError("line " + std::to_string(line) + ": unknown key '" + full + "'");
  }
  return cfg;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace oirl

#endif  // OIRL_CONFIG_HPP_
