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


// Derivative-free integral regressors and the concurrent-learning estimator
// for the unknown dynamics parameters.

#ifndef OIRL_SYSID_HPP_
#define OIRL_SYSID_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oirl/dynamics.hpp"
#include "oirl/errors.hpp"
#include "oirl/linalg.hpp"

namespace oirl {

// P = F + theta^T G + E at time t, with E bounded by E_bound.
struct IntegralRegressors {
  Vec P;  // R^n
  Vec F;  // R^n
  Vec G;  // R^p
  double E_bound = 0.0;
  double t = 0.0;
};

// Converts a window length into a whole number of samples.
inline long window_samples(double window, double step, const char* name) {
  if (!(window > 0.0)) throw InvalidArgument(std::string(name) + " must be positive");
  const double ratio = window / step;
  const long k = std::lround(ratio);
  if (k < 1 || std::abs(ratio - double(k)) > 1e-6) {
    throw InvalidArgument(std::string(name) + " must be an integer multiple of the sample step");
  }
  return k;
}

// Streaming evaluation of the double-integral regressors. Keeps running
// trapezoid integrals of f_known and the basis so each new sample costs
// O(tau2 / Ts).
class RegressorAccumulator {
 public:
  RegressorAccumulator(DynamicsModel model, double step, double tau1, double tau2)
      : model_(std::move(model)),
        step_(step),
        tau1_(tau1),
        tau2_(tau2),
        n1_(window_samples(tau1, step, "tau1")),
        n2_(window_samples(tau2, step, "tau2")) {}

  void push(const TrajectorySample& s) {
    model_.check_dims(s.x, s.u);
    Vec f = model_.f_known(s.x, s.u);
    Vec sig = model_.basis(s.x, s.u);
    if (cum_f_.empty()) {
      cum_f_.push_back(Vec::Zero(f.size()));
      cum_sigma_.push_back(Vec::Zero(sig.size()));
    } else {
      cum_f_.push_back(cum_f_.back() + 0.5 * step_ * (last_f_ + f));
      cum_sigma_.push_back(cum_sigma_.back() + 0.5 * step_ * (last_sigma_ + sig));
    }
    last_f_ = std::move(f);
    last_sigma_ = std::move(sig);
    position_.push_back(s.x.head(model_.n));
    times_.push_back(s.t);
  }

  std::size_t size() const { return times_.size(); }
  bool ready(std::size_t k) const { return long(k) >= n1_ + n2_; }

  // Regressors at sample k (zero before a full double window is available).
  IntegralRegressors at(std::size_t k) const {
    if (k >= times_.size()) throw InsufficientHistory("sample index beyond recorded data");
    IntegralRegressors r;
    r.t = times_[k];
    r.P = Vec::Zero(model_.n);
    r.F = Vec::Zero(model_.n);
    r.G = Vec::Zero(model_.p);
    if (!ready(k)) return r;
    const long kk = long(k);
    r.P = position_[k] - position_[std::size_t(kk - n2_)] - position_[std::size_t(kk - n1_)] +
          position_[std::size_t(kk - n1_ - n2_)];
    r.F = outer_trapezoid(cum_f_, kk);
    r.G = outer_trapezoid(cum_sigma_, kk);
    r.E_bound = model_.eps_bound * tau1_ * tau2_;
    return r;
  }

  IntegralRegressors latest() const { return at(times_.size() - 1); }

 private:
  // Trapezoid over lambda in [t - tau2, t] of C(lambda) - C(lambda - tau1).
  Vec outer_trapezoid(const std::vector<Vec>& cum, long k) const {
    auto inner = [&](long j) -> Vec { return cum[std::size_t(j)] - cum[std::size_t(j - n1_)]; };
    Vec acc = 0.5 * (inner(k - n2_) + inner(k));
    for (long j = k - n2_ + 1; j < k; ++j) acc += inner(j);
    return step_ * acc;
  }

  DynamicsModel model_;
  double step_;
  double tau1_;
  double tau2_;
  long n1_;
  long n2_;
  std::vector<Vec> cum_f_;
  std::vector<Vec> cum_sigma_;
  std::vector<Vec> position_;
  std::vector<double> times_;
  Vec last_f_;
  Vec last_sigma_;
};

// Integral regressors of a recorded trajectory at time t.
inline IntegralRegressors integral_regressors(const Trajectory& traj, const DynamicsModel& model,
                                              double t, double tau1, double tau2) {
  const std::size_t k = traj.index_at(t);
  RegressorAccumulator acc(model, traj.step(), tau1, tau2);
  for (std::size_t i = 0; i <= k; ++i) acc.push(traj[i]);
  return acc.at(k);
}

struct ParamStackEntry {
  Vec P;
  Vec F;
  Vec G;
  double t = 0.0;
};

struct ParamEstimatorState {
  Mat theta_hat;  // p x n
  Mat Gamma;      // p x p, symmetric positive definite
  std::vector<ParamStackEntry> stack;
  std::size_t capacity = 100;
  double k_theta = 0.5 / 150.0;
  double beta1 = 1.0;
  double c_lower = 1e-6;

  static ParamEstimatorState make(int p, int n, std::size_t capacity, double k_theta,
                                  double beta1, double gamma0_scale = 1.0,
                                  double c_lower = 1e-6) {
    if (capacity < std::size_t(p)) throw InvalidArgument("stack capacity below parameter count");
    if (!(k_theta > 0.0) || !(beta1 > 0.0) || !(gamma0_scale > 0.0) || !(c_lower > 0.0)) {
      throw InvalidArgument("estimator gains must be positive");
    }
    ParamEstimatorState s;
    s.theta_hat = Mat::Zero(p, n);
    s.Gamma = gamma0_scale * Mat::Identity(p, p);
    s.capacity = capacity;
    s.k_theta = k_theta;
    s.beta1 = beta1;
    s.c_lower = c_lower;
    s.stack.reserve(capacity);
    return s;
  }

  int p() const { return int(theta_hat.rows()); }

  // sum_i G_i G_i^T
  Mat gram() const {
    Mat g = Mat::Zero(p(), p());
    for (const auto& e : stack) g.noalias() += e.G * e.G.transpose();
    return g;
  }
};

inline double stack_min_eigenvalue(const ParamEstimatorState& state) {
  if (state.stack.empty()) return 0.0;
  return min_eigenvalue(state.gram());
}

inline bool is_full_rank(const ParamEstimatorState& state) {
  return !state.stack.empty() && stack_min_eigenvalue(state) > state.c_lower;
}

// Appends while there is room; once full, swaps in the candidate at the slot
// that maximizes lambda_min of the Gram matrix, only if that strictly improves it.
inline bool stack_try_insert(ParamEstimatorState& state, ParamStackEntry entry) {
  if (entry.G.size() != state.p()) throw InvalidArgument("stack entry has the wrong G dimension");
  if (state.stack.size() < state.capacity) {
    state.stack.push_back(std::move(entry));
    return true;
  }
  const Mat gram = state.gram();
  const double current = min_eigenvalue(gram);
  const Mat candidate = entry.G * entry.G.transpose();
  double best = current;
  long best_index = -1;
  for (std::size_t i = 0; i < state.stack.size(); ++i) {
    const Vec& gi = state.stack[i].G;
    const double lam = min_eigenvalue(gram - gi * gi.transpose() + candidate);
    if (lam > best) {
      best = lam;
      best_index = long(i);
    }
  }
  if (best_index < 0) return false;
  state.stack[std::size_t(best_index)] = std::move(entry);
  return true;
}

// One explicit Euler step of the concurrent-learning laws
//   theta' = k Gamma sum_i G_i (P_i - F_i - theta^T G_i)^T
//   Gamma' = beta1 Gamma - k Gamma (sum_i G_i G_i^T) Gamma
inline void estimator_step(ParamEstimatorState& state, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const int p = state.p();
  Mat drive = Mat::Zero(p, state.theta_hat.cols());
  Mat gram = Mat::Zero(p, p);
  for (const auto& e : state.stack) {
    const Vec residual = e.P - e.F - state.theta_hat.transpose() * e.G;
    drive.noalias() += e.G * residual.transpose();
    gram.noalias() += e.G * e.G.transpose();
  }
  const Mat& gamma = state.Gamma;
  Mat theta_next = state.theta_hat + dt * state.k_theta * gamma * drive;
  Mat gamma_next = gamma + dt * (state.beta1 * gamma - state.k_theta * gamma * gram * gamma);
  gamma_next = 0.5 * (gamma_next + gamma_next.transpose()).eval();
  Eigen::LLT<Mat> llt(gamma_next);
  if (llt.info() != Eigen::Success || !gamma_next.allFinite()) {
    throw GainDivergence("least-squares gain lost positive definiteness");
  }
  state.theta_hat = std::move(theta_next);
  state.Gamma = std::move(gamma_next);
}

// Trapezoid value of q(t) - q(t - T1) - int (f_known + theta_hat^T basis),
// given the integrand samples. Shared by the batch and streaming paths.
inline double eta_from_integrand(const Vec& q_now, const Vec& q_then,
                                 std::span<const Vec> integrand, double step) {
  Vec acc = 0.5 * (integrand.front() + integrand.back());
  for (std::size_t j = 1; j + 1 < integrand.size(); ++j) acc += integrand[j];
  return (q_now - q_then - step * acc).norm();
}

// Quality metric of a parameter estimate over [t - T1, t]. theta_hat holds
// one estimate per trajectory sample.
inline double eval_eta(const Trajectory& traj, const DynamicsModel& model,
                       std::span<const Mat> theta_hat, double t, double T1) {
  const std::size_t k = traj.index_at(t);
  const long w = window_samples(T1, traj.step(), "T1");
  if (long(k) < w) throw InsufficientHistory("eta window reaches before the first sample");
  if (theta_hat.size() <= k) throw InvalidArgument("theta_hat series shorter than trajectory");
  std::vector<Vec> integrand;
  integrand.reserve(std::size_t(w) + 1);
  for (std::size_t j = k - std::size_t(w); j <= k; ++j) {
    const auto& s = traj[j];
    integrand.push_back(model.f_known(s.x, s.u) +
                        theta_hat[j].transpose() * model.basis(s.x, s.u));
  }
  const int n = model.n;
  return eta_from_integrand(traj[k].x.tail(n), traj[k - std::size_t(w)].x.tail(n), integrand,
                            traj.step());
}

// Same metric with a constant estimate.
inline double eval_eta(const Trajectory& traj, const DynamicsModel& model, const Mat& theta_hat,
                       double t, double T1) {
  std::vector<Mat> series(traj.size(), theta_hat);
  return eval_eta(traj, model, series, t, T1);
}

// Streaming eta: caches the integrand at each sample with the estimate that
// was current when the sample was recorded. Returns +inf until T1 of history
// exists.
class EtaMonitor {
 public:
  EtaMonitor(DynamicsModel model, double step, double T1)
      : model_(std::move(model)), step_(step), window_(window_samples(T1, step, "T1")) {}

  double push(const TrajectorySample& s, const Mat& theta_hat) {
    velocity_.push_back(s.x.tail(model_.n));
    integrand_.push_back(model_.f_known(s.x, s.u) +
                         theta_hat.transpose() * model_.basis(s.x, s.u));
    const std::size_t k = integrand_.size() - 1;
    if (long(k) < window_) return kInf;
    const std::size_t first = k - std::size_t(window_);
    return eta_from_integrand(velocity_[k], velocity_[first],
                              std::span<const Vec>(integrand_).subspan(first),
                              step_);
  }

 private:
  DynamicsModel model_;
  double step_;
  long window_;
  std::vector<Vec> velocity_;
  std::vector<Vec> integrand_;
};

}  // namespace oirl

#endif  // OIRL_SYSID_HPP_
