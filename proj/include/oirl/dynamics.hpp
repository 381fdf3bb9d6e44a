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


// Demonstrator dynamics, trajectories, and the fixed-step RK4 simulator.

#ifndef OIRL_DYNAMICS_HPP_
#define OIRL_DYNAMICS_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "oirl/errors.hpp"
#include "oirl/linalg.hpp"

namespace oirl {

struct TrajectorySample {
  double t = 0.0;
  Vec x;  // [p; q], size 2n
  Vec u;  // size m
};

// Uniformly sampled record of a demonstrator run. Sample k sits at
// start_time() + k * step().
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(double step) : step_(step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
      throw InvalidArgument("trajectory step must be positive and finite");
    }
  }

  double step() const { return step_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const TrajectorySample& operator[](std::size_t i) const { return samples_[i]; }
  const TrajectorySample& back() const { return samples_.back(); }
  const std::vector<TrajectorySample>& samples() const { return samples_; }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

  double start_time() const { return samples_.empty() ? 0.0 : samples_.front().t; }
  int state_dim() const { return samples_.empty() ? 0 : int(samples_.front().x.size()); }
  int control_dim() const { return samples_.empty() ? 0 : int(samples_.front().u.size()); }

  void reserve(std::size_t n) { samples_.reserve(n); }

  // Appends a sample, enforcing consistent dimensions and uniform spacing.
  void push_back(TrajectorySample s) {
    if (!(step_ > 0.0)) throw InvalidArgument("trajectory has no step size");
    if (s.x.size() < 2 || s.x.size() % 2 != 0) {
      throw InvalidArgument("state dimension must be 2n with n >= 1");
    }
    if (s.u.size() < 1) throw InvalidArgument("control dimension must be >= 1");
    if (!samples_.empty()) {
      const auto& last = samples_.back();
      if (s.x.size() != last.x.size() || s.u.size() != last.u.size()) {
        throw InvalidArgument("sample dimensions differ from the trajectory");
      }
      if (std::abs(s.t - last.t - step_) > grid_tolerance()) {
        throw InvalidArgument("sample time breaks the uniform spacing");
      }
    }
    samples_.push_back(std::move(s));
  }

  // Grid index of time t, or -1 when t is off grid or outside the record.
  long find_index(double t) const {
    if (samples_.empty()) return -1;
    const double k = (t - start_time()) / step_;
    const long idx = std::lround(k);
    if (idx < 0 || idx >= long(samples_.size())) return -1;
    if (std::abs(samples_[std::size_t(idx)].t - t) > grid_tolerance()) return -1;
    return idx;
  }

  std::size_t index_at(double t) const {
    const long idx = find_index(t);
    if (idx < 0) {
      throw InsufficientHistory("time " + std::to_string(t) +
                                " is not a recorded sample instant");
    }
    return std::size_t(idx);
  }

  double grid_tolerance() const { return 1e-6 * step_; }

 private:
  double step_ = 0.0;
  std::vector<TrajectorySample> samples_;
};

// Second-order system x = [p; q], p' = q, q' = f_known + theta^T basis + eps.
struct DynamicsModel {
  int n = 1;  // position (and velocity) dimension
  int m = 1;  // control dimension
  int p = 1;  // number of unknown-parameter basis functions
  std::function<Vec(const Vec& x, const Vec& u)> f_known;  // -> R^n
  std::function<Vec(const Vec& x, const Vec& u)> basis;    // -> R^p
  Mat theta_true;                                          // p x n
  std::function<Mat(const Vec& x)> g_eff;                  // -> R^{2n x m}
  std::function<Vec(const Vec& x, const Vec& u)> eps;      // -> R^n, empty means 0
  double eps_bound = 0.0;  // a priori bound on |eps|

  int state_dim() const { return 2 * n; }

  void check_dims(const Vec& x, const Vec& u) const {
    if (x.size() != 2 * n || u.size() != m) {
      throw InvalidArgument("state/control dimensions do not match the model (expected " +
                            std::to_string(2 * n) + "/" + std::to_string(m) + ", got " +
                            std::to_string(x.size()) + "/" + std::to_string(u.size()) + ")");
    }
  }
};

// Full state derivative [q; f_known + theta_true^T basis + eps].
inline Vec eval_dynamics(const DynamicsModel& model, const Vec& x, const Vec& u) {
  model.check_dims(x, u);
  const int n = model.n;
  Vec dx(2 * n);
  dx.head(n) = x.tail(n);
  Vec qdot = model.f_known(x, u) + model.theta_true.transpose() * model.basis(x, u);
  if (model.eps) qdot += model.eps(x, u);
  dx.tail(n) = qdot;
  return dx;
}

template <class F>
concept StatePolicy = std::invocable<const F&, const Vec&> &&
                      std::convertible_to<std::invoke_result_t<const F&, const Vec&>, Vec>;

// One classical RK4 step of the closed loop x' = f(x, policy(x)). The policy
// is re-evaluated at every stage.
template <StatePolicy Policy>
Vec rk4_step(const DynamicsModel& model, const Policy& policy, const Vec& x, double h) {
  auto rhs = [&](const Vec& s) { return eval_dynamics(model, s, Vec(policy(s))); };
  const Vec k1 = rhs(x);
  const Vec k2 = rhs(x + 0.5 * h * k1);
  const Vec k3 = rhs(x + 0.5 * h * k2);
  const Vec k4 = rhs(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Number of steps T_end / Ts, requiring an integer ratio.
inline long step_count(double Ts, double T_end) {
  if (!(Ts > 0.0) || !std::isfinite(Ts)) throw InvalidArgument("Ts must be positive");
  if (!(T_end >= Ts)) throw InvalidArgument("T_end must be at least Ts");
  const double ratio = T_end / Ts;
  const long k = std::lround(ratio);
  if (std::abs(ratio - double(k)) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("T_end must be an integer multiple of Ts");
  }
  return k;
}

// Fixed-step RK4 rollout. Returns T_end/Ts + 1 samples with t = i * Ts and u
// recorded as policy(x(t)).
template <StatePolicy Policy>
Trajectory simulate(const DynamicsModel& model, const Policy& policy, const Vec& x0, double Ts,
                    double T_end) {
  const long steps = step_count(Ts, T_end);
  if (x0.size() != model.state_dim()) throw InvalidArgument("x0 has the wrong dimension");
  Trajectory traj(Ts);
  traj.reserve(std::size_t(steps) + 1);
  Vec x = x0;
  for (long i = 0; i <= steps; ++i) {
    const double t = double(i) * Ts;
    if (i > 0) x = rk4_step(model, policy, x, Ts);
    if (!x.allFinite()) {
      throw DivergenceError("state became non-finite at t=" + std::to_string(t), t);
    }
    Vec u = policy(x);
    traj.push_back({t, x, std::move(u)});
  }
  return traj;
}

namespace benchmark {

// Ground truth of the scalar nonlinear benchmark
//   x1' = x2
//   x2' = f1 x1 (pi/2 + atan(5 x1)) + f2 x1^2 / (1 + 25 x1^2) + f3 x2 + 3u
// with running cost q1 x1^2 + q2 x2^2 + r1 u^2.
struct BenchmarkSpec {
  double f1 = -1.0;
  double f2 = -2.5;
  double f3 = 4.0;
  double v1 = std::numbers::pi / 2.0;
  double v2 = 1.0;
  double v3 = 1.0;
  double q1 = 0.0;
  double q2 = 1.0;
  double r1 = 1.0;

  // [v1, v2, v3, q1, q2]
  Vec true_weights() const {
    Vec w(5);
    w << v1, v2, v3, q1, q2;
    return w;
  }
  Vec true_theta() const {
    Vec th(3);
    th << f1, f2, f3;
    return th;
  }
};

inline constexpr double kInputGain = 3.0;

inline Vec basis(const Vec& x, const Vec& /*u*/) {
  const double x1 = x(0);
  Vec s(3);
  s << x1 * (std::numbers::pi / 2.0 + std::atan(5.0 * x1)), x1 * x1 / (1.0 + 25.0 * x1 * x1),
      x(1);
  return s;
}

inline DynamicsModel make_model(const BenchmarkSpec& spec = {}) {
  DynamicsModel model;
  model.n = 1;
  model.m = 1;
  model.p = 3;
  model.f_known = [](const Vec& /*x*/, const Vec& u) -> Vec {
    return Vec::Constant(1, kInputGain * u(0));
  };
  model.basis = basis;
  model.theta_true = spec.true_theta();
  model.g_eff = [](const Vec& /*x*/) -> Mat {
    Mat g(2, 1);
    g << 0.0, kInputGain;
    return g;
  };
  return model;
}

// u = -3 x2
inline Vec optimal_policy(const Vec& x) { return Vec::Constant(1, -3.0 * x(1)); }

// V*(x) = x1^2 (v1 + v2 atan(5 x1)) + v3 x2^2
inline double value_function(const Vec& x, double v1, double v2, double v3) {
  const double x1 = x(0);
  return x1 * x1 * (v1 + v2 * std::atan(5.0 * x1)) + v3 * x(1) * x(1);
}

inline double value_function(const Vec& x, const BenchmarkSpec& spec = {}) {
  return value_function(x, spec.v1, spec.v2, spec.v3);
}

}  // namespace benchmark
}  // namespace oirl

#endif  // OIRL_DYNAMICS_HPP_
