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


// Inverse Bellman error regressors, the condition-number-curated history
// stack, and the least-squares reward/value weight solve.
//
// Unknowns are ordered [W_V (P); W_Q (L); W_R without its first entry (m-1)].
// The first control weight r1 is known and moves to the right-hand side, which
// rules out the trivial zero solution and the scaling ambiguity.

#ifndef OIRL_IRL_HPP_
#define OIRL_IRL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "oirl/dynamics.hpp"
#include "oirl/errors.hpp"
#include "oirl/linalg.hpp"

namespace oirl {

struct FeatureLibrary {
  int P = 0;  // value features
  int L = 0;  // state-cost features
  int m = 1;  // control dimension
  std::function<Vec(const Vec& x)> sigma_V;
  std::function<Mat(const Vec& x)> grad_sigma_V;  // P x 2n
  std::function<Vec(const Vec& x)> sigma_Q;

  int unknowns() const { return P + L + m - 1; }
};

// Elementwise squares [u1^2, ..., um^2].
inline Vec control_features(const Vec& u) { return u.array().square().matrix(); }

// Y_hat(x, u) = [q; f_known(x, u) + theta_hat^T basis(x, u)]
inline Vec predicted_derivative(const DynamicsModel& model, const Vec& x, const Vec& u,
                                const Mat& theta_hat) {
  model.check_dims(x, u);
  const int n = model.n;
  Vec y(2 * n);
  y.head(n) = x.tail(n);
  y.tail(n) = model.f_known(x, u) + theta_hat.transpose() * model.basis(x, u);
  return y;
}

// W = [W_V; W_Q; W_R] of length P + L + m.
inline double inverse_bellman_error(const Vec& x, const Vec& u, const Vec& W,
                                    const Mat& theta_hat, const FeatureLibrary& lib,
                                    const DynamicsModel& model) {
  if (W.size() != lib.P + lib.L + lib.m) throw InvalidArgument("weight vector has wrong length");
  if (u.size() != lib.m) throw InvalidArgument("control dimension does not match features");
  if (theta_hat.rows() != model.p || theta_hat.cols() != model.n) {
    throw InvalidArgument("theta_hat has the wrong shape");
  }
  const Vec y = predicted_derivative(model, x, u, theta_hat);
  const Mat grad = lib.grad_sigma_V(x);
  return W.head(lib.P).dot(grad * y) + W.segment(lib.P, lib.L).dot(lib.sigma_Q(x)) +
         W.tail(lib.m).dot(control_features(u));
}

// One sample's contribution to the stacked system Sigma W = -Sigma_u1:
// a Bellman row followed by m controller rows.
struct IrlRow {
  Vec bellman_row;      // K = P + L + m - 1
  Mat controller_rows;  // m x K
  Vec rhs;              // 1 + m
  double t = 0.0;
  double eta = kInf;

  // (1 + m) x K block of the stacked regressor.
  Mat block() const {
    Mat b(1 + controller_rows.rows(), bellman_row.size());
    b.row(0) = bellman_row.transpose();
    b.bottomRows(controller_rows.rows()) = controller_rows;
    return b;
  }
};

inline IrlRow build_row(const Vec& x, const Vec& u, const Mat& theta_hat, double eta,
                        const FeatureLibrary& lib, const DynamicsModel& model, double r1,
                        double t = 0.0) {
  const int P = lib.P;
  const int L = lib.L;
  const int m = lib.m;
  const int K = lib.unknowns();
  if (u.size() != m) throw InvalidArgument("control dimension does not match features");

  const Mat grad = lib.grad_sigma_V(x);
  const Vec y = predicted_derivative(model, x, u, theta_hat);
  const Vec su = control_features(u);

  IrlRow row;
  row.t = t;
  row.eta = eta;
  row.bellman_row.resize(K);
  row.bellman_row.head(P) = grad * y;
  row.bellman_row.segment(P, L) = lib.sigma_Q(x);
  row.bellman_row.tail(m - 1) = su.tail(m - 1);

  // sigma_g = g'^T (grad sigma_V)^T, m x P
  const Mat sigma_g = model.g_eff(x).transpose() * grad.transpose();
  row.controller_rows = Mat::Zero(m, K);
  row.controller_rows.leftCols(P) = sigma_g;
  for (int j = 1; j < m; ++j) row.controller_rows(j, P + L + j - 1) = 2.0 * u(j);

  row.rhs = Vec::Zero(1 + m);
  row.rhs(0) = r1 * su(0);
  row.rhs(1) = 2.0 * r1 * u(0);
  return row;
}

struct WeightEstimate {
  Vec W_V;
  Vec W_Q;
  Vec W_R_minus;
  double r1 = 1.0;

  // [W_V; W_Q; W_R_minus], column order of the stacked regressor.
  Vec stacked() const {
    Vec w(W_V.size() + W_Q.size() + W_R_minus.size());
    w << W_V, W_Q, W_R_minus;
    return w;
  }

  // [W_V; W_Q; r1; W_R_minus], as consumed by inverse_bellman_error.
  Vec full() const {
    Vec w(W_V.size() + W_Q.size() + 1 + W_R_minus.size());
    w << W_V, W_Q, r1, W_R_minus;
    return w;
  }

  static WeightEstimate from_stacked(const Vec& w, const FeatureLibrary& lib, double r1) {
    if (w.size() != lib.unknowns()) throw InvalidArgument("stacked weights have wrong length");
    WeightEstimate e;
    e.W_V = w.head(lib.P);
    e.W_Q = w.segment(lib.P, lib.L);
    e.W_R_minus = w.tail(lib.m - 1);
    e.r1 = r1;
    return e;
  }

  bool operator==(const WeightEstimate&) const = default;
};

// Bounded history of IRL rows. Once full, a candidate replaces an existing row
// only if the swap brings the Gram condition number below xi1 times its current
// value while keeping the stacked right-hand side at least xi2 in norm.
class IrlStack {
 public:
  IrlStack(std::size_t capacity, double xi1, double xi2, double r1)
      : capacity_(capacity), xi1_(xi1), xi2_(xi2), r1_(r1) {
    if (capacity == 0) throw InvalidArgument("IRL stack capacity must be positive");
    if (!(xi1 >= 0.0)) throw InvalidArgument("xi1 must be non-negative");
    if (!(xi2 > 0.0)) throw InvalidArgument("xi2 must be positive");
    if (!(r1 > 0.0)) throw InvalidArgument("r1 must be positive");
    rows_.reserve(capacity);
  }

  std::size_t size() const { return rows_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return rows_.size() >= capacity_; }
  bool empty() const { return rows_.empty(); }
  const std::vector<IrlRow>& rows() const { return rows_; }
  double xi1() const { return xi1_; }
  double xi2() const { return xi2_; }
  double r1() const { return r1_; }
  bool varpi() const { return varpi_; }
  int purge_count() const { return purges_; }
  double last_purge_time() const { return last_purge_time_; }
  void set_last_purge_time(double t) { last_purge_time_ = t; }

  int columns() const { return rows_.empty() ? 0 : int(rows_.front().bellman_row.size()); }

  // Stacked regressor Sigma_hat, (1 + m) rows per stored sample.
  Mat regressor() const {
    if (rows_.empty()) return Mat(0, 0);
    const Eigen::Index per = rows_.front().rhs.size();
    Mat s(Eigen::Index(rows_.size()) * per, columns());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      s.middleRows(Eigen::Index(i) * per, per) = rows_[i].block();
    }
    return s;
  }

  // Stacked right-hand side Sigma_u1.
  Vec rhs() const {
    if (rows_.empty()) return Vec(0);
    const Eigen::Index per = rows_.front().rhs.size();
    Vec r(Eigen::Index(rows_.size()) * per);
    for (std::size_t i = 0; i < rows_.size(); ++i) r.segment(Eigen::Index(i) * per, per) = rows_[i].rhs;
    return r;
  }

  Mat gram() const {
    Mat g = Mat::Zero(columns(), columns());
    for (const auto& r : rows_) {
      const Mat b = r.block();
      g.noalias() += b.transpose() * b;
    }
    return g;
  }

  // kappa(Sigma_hat^T Sigma_hat); +inf when empty or singular.
  double condition() const { return rows_.empty() ? kInf : spd_condition_number(gram()); }

  // Smallest eta over the stored rows captured strictly before `before`;
  // +inf when there are none.
  double eta_bar(double before = kInf) const {
    double e = kInf;
    for (const auto& r : rows_) {
      if (r.t < before) e = std::min(e, r.eta);
    }
    return e;
  }

  bool try_insert(IrlRow row) {
    if (!rows_.empty() && (row.bellman_row.size() != columns() ||
                           row.rhs.size() != rows_.front().rhs.size())) {
      throw InvalidArgument("IRL row dimensions do not match the stack");
    }
    if (!full()) {
      rows_.push_back(std::move(row));
      varpi_ = true;
      return true;
    }
    const Mat gram_now = gram();
    const double kappa_now = spd_condition_number(gram_now);
    double rhs_sq = 0.0;
    for (const auto& r : rows_) rhs_sq += r.rhs.squaredNorm();

    const Mat cand = row.block();
    const Mat cand_gram = cand.transpose() * cand;
    const double cand_rhs_sq = row.rhs.squaredNorm();

    long best = -1;
    double best_kappa = kInf;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Mat b = rows_[i].block();
      const double rhs_norm =
          std::sqrt(std::max(0.0, rhs_sq - rows_[i].rhs.squaredNorm() + cand_rhs_sq));
      if (rhs_norm < xi2_) continue;
      const double kappa = spd_condition_number(gram_now - b.transpose() * b + cand_gram);
      if (kappa < xi1_ * kappa_now && (best < 0 || kappa < best_kappa)) {
        best = long(i);
        best_kappa = kappa;
      }
    }
    if (best < 0) {
      varpi_ = false;
      return false;
    }
    rows_[std::size_t(best)] = std::move(row);
    varpi_ = true;
    return true;
  }

  // Empties the stack and counts the purge. trigger_eta is the quality metric
  // that caused it.
  void purge(double t, double trigger_eta = kInf) {
    rows_.clear();
    ++purges_;
    last_purge_time_ = t;
    last_purge_eta_ = trigger_eta;
  }

  double last_purge_eta() const { return last_purge_eta_; }

 private:
  std::size_t capacity_;
  double xi1_;
  double xi2_;
  double r1_;
  std::vector<IrlRow> rows_;
  bool varpi_ = false;
  int purges_ = 0;
  double last_purge_time_ = 0.0;
  double last_purge_eta_ = kInf;
};

inline bool stack_try_insert(IrlStack& stack, IrlRow row) { return stack.try_insert(std::move(row)); }

// Relative singular-value threshold used to declare full column rank.
inline constexpr double kRankTolerance = 1e-8;

struct WeightSolve {
  WeightEstimate weights;
  double residual_norm = 0.0;  // |Sigma_hat W + Sigma_u1|
  double gram_condition = kInf;
};

// W = argmin |Sigma_hat W + Sigma_u1| via SVD, after checking the rank
// condition and the right-hand-side floor.
inline WeightSolve solve_weights_detailed(const IrlStack& stack, const FeatureLibrary& lib) {
  if (stack.empty()) throw RankConditionError("IRL history stack is empty");
  const Mat sigma = stack.regressor();
  const Vec rhs = stack.rhs();
  if (sigma.cols() != lib.unknowns()) throw InvalidArgument("stack width does not match features");
  if (rhs.norm() < stack.xi2()) {
    throw DegenerateRhsError("stacked right-hand side norm " + std::to_string(rhs.norm()) +
                             " is below xi2");
  }
  if (sigma.rows() < sigma.cols()) {
    throw RankConditionError("fewer stacked rows than unknowns");
  }
  Eigen::JacobiSVD<Mat> svd(sigma, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smax > 0.0) || !(smin > kRankTolerance * smax)) {
    throw RankConditionError("stacked regressor is rank deficient (sigma_min/sigma_max = " +
                             std::to_string(smax > 0.0 ? smin / smax : 0.0) + ")");
  }
  const Vec w = svd.solve(-rhs);
  WeightSolve out;
  out.weights = WeightEstimate::from_stacked(w, lib, stack.r1());
  out.residual_norm = (sigma * w + rhs).norm();
  out.gram_condition = (smax / smin) * (smax / smin);
  return out;
}

inline WeightEstimate solve_weights(const IrlStack& stack, const FeatureLibrary& lib) {
  return solve_weights_detailed(stack, lib).weights;
}

namespace benchmark {

// sigma_V = [x1^2, x1^2 atan(5 x1), x2^2], sigma_Q = [x1^2, x2^2]. Spans the
// closed-form value function and running cost exactly.
inline FeatureLibrary features() {
  FeatureLibrary lib;
  lib.P = 3;
  lib.L = 2;
  lib.m = 1;
  lib.sigma_V = [](const Vec& x) -> Vec {
    const double x1 = x(0);
    Vec s(3);
    s << x1 * x1, x1 * x1 * std::atan(5.0 * x1), x(1) * x(1);
    return s;
  };
  lib.grad_sigma_V = [](const Vec& x) -> Mat {
    const double x1 = x(0);
    Mat g = Mat::Zero(3, 2);
    g(0, 0) = 2.0 * x1;
    g(1, 0) = 2.0 * x1 * std::atan(5.0 * x1) + 5.0 * x1 * x1 / (1.0 + 25.0 * x1 * x1);
    g(2, 1) = 2.0 * x(1);
    return g;
  };
  lib.sigma_Q = [](const Vec& x) -> Vec {
    Vec s(2);
    s << x(0) * x(0), x(1) * x(1);
    return s;
  };
  return lib;
}

}  // namespace benchmark
}  // namespace oirl

#endif  // OIRL_IRL_HPP_
