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


// Command-line front end.
//
//   oirl run [config] --out DIR [--seed N] [--no-timing]
//   oirl replay TRAJECTORY.csv [config] --out DIR [--seed N] [--no-timing]
//   oirl simulate [config] --out TRAJECTORY.csv
//   oirl query-demo [STATES.csv] [--state x1,x2 ...]
//
// Exit codes: 0 success, 2 invalid config, 3 parse error, 4 numerical
// divergence, 1 anything else.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oirl/oirl.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitDivergence = 4;

oirl::ExperimentConfig load(const std::string& path, std::optional<std::uint64_t> seed) {
  oirl::ExperimentConfig cfg = path.empty() ? oirl::ExperimentConfig{} : oirl::load_config(path);
  if (seed) cfg.seed = *seed;
  cfg.validate();
  return cfg;
}

void print_summary(const oirl::RunReport& r) {
  std::cout << "theta_hat:";
  for (Eigen::Index i = 0; i < r.final_theta.size(); ++i) std::cout << ' ' << r.final_theta(i);
  const oirl::Vec w = r.final_W.stacked();
  std::cout << "\nw_hat:";
  for (Eigen::Index i = 0; i < w.size(); ++i) std::cout << ' ' << w(i);
  std::cout << "\n|theta error| = " << r.theta_error.back()
            << "\n|weight error| = " << r.weight_error.back()
            << "\npurges = " << r.purge_count << "\nwall time = " << r.wall_time_s << " s\n";
}

oirl::Vec parse_state(const std::string& text, std::size_t lineno) {
  const auto fields = oirl::detail::split_csv(text);
  oirl::Vec x(Eigen::Index(fields.size()));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string f = oirl::detail::trim(fields[i]);
    const auto res = std::from_chars(f.data(), f.data() + f.size(), x(Eigen::Index(i)));
    if (res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(x(Eigen::Index(i)))) {
      throw oirl::ParseError("malformed number '" + fields[i] + "'", lineno);
    }
  }
  return x;
}

std::vector<oirl::Vec> read_states(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw oirl::ParseError("cannot open state file '" + path + "'", 0);
  std::vector<oirl::Vec> states;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (lineno == 1 && line.find_first_of("xX") != std::string::npos) continue;  // header
    states.push_back(parse_state(line, lineno));
  }
  return states;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online inverse reinforcement learning for a nonlinear demonstrator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool no_timing = false;

  auto* run = app.add_subcommand("run", "Simulate the demonstrator and learn online");
  run->add_option("config", config_path, "Experiment config file (defaults if omitted)");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_flag("--no-timing", no_timing, "Write wall_time_s = 0 for byte-stable output");

  std::string traj_path;
  auto* replay = app.add_subcommand("replay", "Learn from a prerecorded trajectory CSV");
  replay->add_option("trajectory", traj_path, "Trajectory CSV")->required();
  replay->add_option("config", config_path, "Experiment config file (defaults if omitted)");
  replay->add_option("--out", out_dir, "Output directory")->capture_default_str();
  replay->add_option("--seed", seed, "Override the config seed");
  replay->add_flag("--no-timing", no_timing, "Write wall_time_s = 0 for byte-stable output");

  std::string sim_out = "trajectory.csv";
  auto* sim = app.add_subcommand("simulate", "Write the demonstrator trajectory as CSV");
  sim->add_option("config", config_path, "Experiment config file (defaults if omitted)");
  sim->add_option("--out", sim_out, "Trajectory CSV path")->capture_default_str();

  std::string states_path;
  std::vector<std::string> state_args;
  auto* query = app.add_subcommand("query-demo", "Print demonstrator controls for given states");
  query->add_option("states", states_path, "CSV of states, one per line (x1,x2)");
  query->add_option("--state", state_args, "A state as x1,x2 (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = load(config_path, seed);
      const auto report = oirl::run_experiment(cfg);
      oirl::export_report(report, out_dir, {.record_wall_time = !no_timing});
      print_summary(report);
    } else if (*replay) {
      const auto cfg = load(config_path, seed);
      const auto traj = oirl::ingest_trajectory(traj_path);
      const auto report = oirl::replay_experiment(cfg, traj);
      oirl::export_report(report, out_dir, {.record_wall_time = !no_timing});
      print_summary(report);
    } else if (*sim) {
      const auto cfg = load(config_path, std::nullopt);
      const auto traj = oirl::simulate(oirl::benchmark::make_model(), oirl::benchmark::optimal_policy,
                                       cfg.x0, cfg.Ts, cfg.T_end);
      oirl::write_trajectory(sim_out, traj);
      std::cout << "wrote " << traj.size() << " samples to " << sim_out << '\n';
    } else if (*query) {
      std::vector<oirl::Vec> states;
      if (!states_path.empty()) states = read_states(states_path);
      for (std::size_t k = 0; k < state_args.size(); ++k) {
        states.push_back(parse_state(state_args[k], k + 1));
      }
      oirl::ObservedRange range;
      for (const auto& x : states) {
        if (x.size() != 2) throw oirl::ParseError("query states must have two entries", 0);
        range.observe(x);
      }
      std::cout << "x1,x2,u1\n";
      if (states.empty()) return 0;
      const oirl::QueryRegion region = range.region(0.0);
      for (const auto& x : states) {
        const auto sample = oirl::query_demonstrator(x, oirl::benchmark::optimal_policy, 0.0, region);
        std::cout << oirl::format_double(x(0)) << ',' << oirl::format_double(x(1)) << ','
                  << oirl::format_double(sample.u(0)) << '\n';
      }
    }
  } catch (const oirl::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const oirl::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const oirl::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const oirl::GainDivergence& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
