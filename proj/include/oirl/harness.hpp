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


// The online experiment loop: simulate (or replay) the demonstrator, identify
// the dynamics, curate IRL rows, solve and purge, and record everything.

#ifndef OIRL_HARNESS_HPP_
#define OIRL_HARNESS_HPP_

#include <chrono>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "oirl/config.hpp"
#include "oirl/dynamics.hpp"
#include "oirl/io.hpp"
#include "oirl/irl.hpp"
#include "oirl/linalg.hpp"
#include "oirl/purging.hpp"
#include "oirl/sysid.hpp"

namespace oirl {

struct PurgeEvent {
  double t = 0.0;
  int s = 0;
  double eta_bar = kInf;
  double kappa = kInf;
};

struct SolveRecord {
  double t = 0.0;
  Vec w;
  double kappa = kInf;
  double residual_norm = 0.0;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<double> t;
  std::vector<double> theta_error;
  std::vector<Vec> theta_hat;  // flattened p x n, column-major
  std::vector<double> weight_error;
  std::vector<Vec> w_hat;
  std::vector<double> gram_min_eig;   // lambda_min(sum G G^T)
  std::vector<double> gamma_min_eig;  // lambda_min(Gamma)
  std::vector<double> gamma_max_eig;
  std::vector<PurgeEvent> purge_events;
  std::vector<SolveRecord> solves;
  Vec final_theta;
  WeightEstimate final_W;
  int purge_count = 0;
  double wall_time_s = 0.0;
};

// Per-sample pipeline shared by live simulation and replay.
class OnlineIrl {
 public:
  using Policy = std::function<Vec(const Vec&)>;

  OnlineIrl(const ExperimentConfig& cfg, DynamicsModel model, FeatureLibrary lib,
            Policy demonstrator, Vec w_truth)
      : cfg_(cfg),
        model_(std::move(model)),
        lib_(std::move(lib)),
        demonstrator_(std::move(demonstrator)),
        w_truth_(std::move(w_truth)),
        regressors_(model_, cfg.Ts, cfg.tau1, cfg.tau2),
        eta_(model_, cfg.Ts, cfg.T1),
        estimator_(ParamEstimatorState::make(model_.p, model_.n, cfg.M, cfg.k_theta_value(),
                                             cfg.beta1, cfg.Gamma0_scale, cfg.c_lower)),
        stack_(cfg.N, cfg.xi1, cfg.xi2, cfg.r1),
        sampler_(cfg.seed) {
    cfg_.validate(model_.p * model_.n, lib_.unknowns(), model_.state_dim());
    policy_.kappa1_lower = cfg.kappa1_lower;
    policy_.kappa2_lower = cfg.kappa2_lower;
    policy_.mode = cfg.purge_mode;
    policy_.epsilon_time = cfg.epsilon_time;
    policy_.W0 = WeightEstimate::from_stacked(cfg.W0, lib_, cfg.r1);
    policy_.validate();
    W_ = policy_.W0;
    report_.config = cfg;
    theta_truth_ = model_.theta_true.reshaped();
  }

  void process(const TrajectorySample& s) {
    const std::size_t k = count_++;
    if (k == 0) {
      stack_.set_last_purge_time(s.t);
    } else if (std::abs(s.t - last_t_ - cfg_.Ts) > 1e-6 * cfg_.Ts) {
      throw InvalidArgument("sample at t=" + std::to_string(s.t) + " breaks the Ts grid");
    }
    last_t_ = s.t;
    range_.observe(s.x);

    regressors_.push(s);
    if (regressors_.ready(k)) {
      IntegralRegressors r = regressors_.at(k);
      stack_try_insert(estimator_, {std::move(r.P), std::move(r.F), std::move(r.G), s.t});
    }
    if (k > 0) estimator_step(estimator_, cfg_.Ts);

    const Mat& theta = estimator_.theta_hat;
    const double eta = eta_.push(s, theta);

    stack_.try_insert(build_row(s.x, s.u, theta, eta, lib_, model_, cfg_.r1, s.t));
    if (cfg_.query_count > 0) {
      const QueryRegion region = range_.region(cfg_.query_inflation);
      for (int q = 0; q < cfg_.query_count; ++q) {
        const TrajectorySample qs =
            query_demonstrator(sampler_.sample(region), demonstrator_, s.t, region);
        stack_.try_insert(build_row(qs.x, qs.u, theta, eta, lib_, model_, cfg_.r1, s.t));
      }
    }

    PurgeResult res = purge_step(stack_, policy_, lib_, eta, s.t, W_);
    W_ = std::move(res.W);
    if (res.updated) {
      report_.solves.push_back({s.t, W_.stacked(), res.kappa, res.residual_norm});
    }
    if (res.purged) {
      report_.purge_events.push_back({s.t, stack_.purge_count(), res.eta_bar, res.kappa});
    }
    record(s.t);
  }

  RunReport finish() {
    report_.final_theta = estimator_.theta_hat.reshaped();
    report_.final_W = W_;
    report_.purge_count = stack_.purge_count();
    return std::move(report_);
  }

  const ParamEstimatorState& estimator() const { return estimator_; }
  const IrlStack& stack() const { return stack_; }
  const WeightEstimate& weights() const { return W_; }

 private:
  void record(double t) {
    const Vec theta = estimator_.theta_hat.reshaped();
    const Vec w = W_.stacked();
    report_.t.push_back(t);
    report_.theta_hat.push_back(theta);
    report_.theta_error.push_back((theta - theta_truth_).norm());
    report_.w_hat.push_back(w);
    report_.weight_error.push_back(w_truth_.size() == w.size() ? (w - w_truth_).norm() : 0.0);
    report_.gram_min_eig.push_back(stack_min_eigenvalue(estimator_));
    Eigen::SelfAdjointEigenSolver<Mat> es(estimator_.Gamma, Eigen::EigenvaluesOnly);
    report_.gamma_min_eig.push_back(es.eigenvalues()(0));
    report_.gamma_max_eig.push_back(es.eigenvalues()(es.eigenvalues().size() - 1));
  }

  ExperimentConfig cfg_;
  DynamicsModel model_;
  FeatureLibrary lib_;
  Policy demonstrator_;
  Vec w_truth_;
  Vec theta_truth_;
  RegressorAccumulator regressors_;
  EtaMonitor eta_;
  ParamEstimatorState estimator_;
  IrlStack stack_;
  PurgePolicy policy_;
  QuerySampler sampler_;
  ObservedRange range_;
  WeightEstimate W_;
  RunReport report_;
  std::size_t count_ = 0;
  double last_t_ = 0.0;
};

inline OnlineIrl make_benchmark_loop(const ExperimentConfig& cfg,
                                     const benchmark::BenchmarkSpec& spec = {}) {
  return OnlineIrl(cfg, benchmark::make_model(spec), benchmark::features(),
                   benchmark::optimal_policy, spec.true_weights());
}

// Live run on the benchmark: each step advances the demonstrator by one RK4
// step and feeds the new sample through the loop.
inline RunReport run_experiment(const ExperimentConfig& cfg,
                                const benchmark::BenchmarkSpec& spec = {}) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const DynamicsModel model = benchmark::make_model(spec);
  OnlineIrl loop = make_benchmark_loop(cfg, spec);
  const long steps = step_count(cfg.Ts, cfg.T_end);
  Vec x = cfg.x0;
  for (long i = 0; i <= steps; ++i) {
    const double t = double(i) * cfg.Ts;
    if (i > 0) x = rk4_step(model, benchmark::optimal_policy, x, cfg.Ts);
    if (!x.allFinite()) {
      throw DivergenceError("state became non-finite at t=" + std::to_string(t), t);
    }
    loop.process({t, x, benchmark::optimal_policy(x)});
  }
  RunReport report = loop.finish();
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// Runs the loop over a prerecorded trajectory. Queries still go to the
// benchmark demonstrator.
inline RunReport replay_experiment(const ExperimentConfig& cfg, const Trajectory& traj,
                                   const benchmark::BenchmarkSpec& spec = {}) {
  if (std::abs(traj.step() - cfg.Ts) > 1e-9 * cfg.Ts) {
    throw ConfigError("trajectory step " + format_double(traj.step()) +
                      " does not match Ts = " + format_double(cfg.Ts));
  }
  const auto start = std::chrono::steady_clock::now();
  OnlineIrl loop = make_benchmark_loop(cfg, spec);
  for (const auto& s : traj) loop.process(s);
  RunReport report = loop.finish();
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

struct ExportOptions {
  // When false, wall_time_s is written as 0 so reruns are byte-identical.
  bool record_wall_time = true;
};

namespace detail {

inline std::string series_csv(const std::string& header, const std::vector<double>& t,
                              const std::vector<double>& err, const std::vector<Vec>& vals) {
  std::ostringstream out;
  out << header << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << format_double(t[i]) << ',' << format_double(err[i]);
    for (Eigen::Index j = 0; j < vals[i].size(); ++j) out << ',' << format_double(vals[i](j));
    out << '\n';
  }
  return out.str();
}

inline std::string numbered(const std::string& prefix, Eigen::Index count) {
  std::string s;
  for (Eigen::Index i = 1; i <= count; ++i) s += "," + prefix + std::to_string(i);
  return s;
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace detail

// Writes theta_error.csv, weight_error.csv, purges.csv, solves.csv,
// estimator.csv and summary.json into dir.
inline void export_report(const RunReport& report, const std::filesystem::path& dir,
                          const ExportOptions& options = {}) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());

  const Eigen::Index p = report.final_theta.size();
  const Eigen::Index K = report.final_W.stacked().size();

  write_file_atomic(dir / "theta_error.csv",
                    detail::series_csv("t,err_norm" + detail::numbered("theta", p), report.t,
                                       report.theta_error, report.theta_hat));
  write_file_atomic(dir / "weight_error.csv",
                    detail::series_csv("t,err_norm" + detail::numbered("w", K), report.t,
                                       report.weight_error, report.w_hat));
  {
    std::ostringstream out;
    out << "t,s,eta_bar,kappa\n";
    for (const auto& e : report.purge_events) {
      out << format_double(e.t) << ',' << e.s << ',' << format_double(e.eta_bar) << ','
          << format_double(e.kappa) << '\n';
    }
    write_file_atomic(dir / "purges.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "t,kappa,residual_norm" << detail::numbered("w", K) << '\n';
    for (const auto& s : report.solves) {
      out << format_double(s.t) << ',' << format_double(s.kappa) << ','
          << format_double(s.residual_norm);
      for (Eigen::Index j = 0; j < s.w.size(); ++j) out << ',' << format_double(s.w(j));
      out << '\n';
    }
    write_file_atomic(dir / "solves.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "t,lambda_min_G,lambda_min_Gamma,lambda_max_Gamma\n";
    for (std::size_t i = 0; i < report.t.size(); ++i) {
      out << format_double(report.t[i]) << ',' << format_double(report.gram_min_eig[i]) << ','
          << format_double(report.gamma_min_eig[i]) << ','
          << format_double(report.gamma_max_eig[i]) << '\n';
    }
    write_file_atomic(dir / "estimator.csv", out.str());
  }

  nlohmann::ordered_json j;
  j["config"] = report.config.to_json();
  j["theta_hat"] = detail::to_std(report.final_theta);
  j["w_hat"] = detail::to_std(report.final_W.stacked());
  j["purge_count"] = report.purge_count;
  j["wall_time_s"] = options.record_wall_time ? report.wall_time_s : 0.0;
  write_file_atomic(dir / "summary.json", j.dump(2) + "\n");
}

}  // namespace oirl

#endif  // OIRL_HARNESS_HPP_
