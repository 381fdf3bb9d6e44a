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


// Gated weight updates, history-stack purging, and demonstrator queries.

#ifndef OIRL_PURGING_HPP_
#define OIRL_PURGING_HPP_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include "oirl/dynamics.hpp"
#include "oirl/errors.hpp"
#include "oirl/irl.hpp"
#include "oirl/linalg.hpp"

namespace oirl {

enum class PurgeMode { kMetric, kTime };

inline std::string to_string(PurgeMode mode) {
  return mode == PurgeMode::kMetric ? "metric" : "time";
}

inline PurgeMode parse_purge_mode(const std::string& s) {
  if (s == "metric") return PurgeMode::kMetric;
  if (s == "time") return PurgeMode::kTime;
  throw InvalidArgument("unknown purge mode '" + s + "' (expected metric or time)");
}

// kappa1_lower and kappa2_lower are the largest Gram condition numbers at
// which the stack is trusted for a solve and for a purge, respectively.
struct PurgePolicy {
  double kappa1_lower = 1e6;
  double kappa2_lower = 1e6;
  PurgeMode mode = PurgeMode::kMetric;
  double epsilon_time = 5.0;
  WeightEstimate W0;

  void validate() const {
    if (!(kappa1_lower > 0.0) || !(kappa2_lower > 0.0)) {
      throw InvalidArgument("purge thresholds must be positive");
    }
    if (mode == PurgeMode::kTime && !(epsilon_time > 0.0)) {
      throw InvalidArgument("epsilon_time must be positive in time mode");
    }
  }
};

struct PurgeResult {
  WeightEstimate W;
  bool updated = false;  // W came from a fresh solve
  bool purged = false;
  double kappa = kInf;    // Gram condition number seen by the gates
  double eta_bar = kInf;  // min stored eta before any purge
  double residual_norm = 0.0;
};

// One pass of the weight-update / purge logic:
//  1. solve for W when the stack is full, kappa < kappa1_lower and the last
//     insertion was accepted; otherwise hold W_prev;
//  2. empty a full stack when kappa < kappa2_lower and eta_now < eta_bar
//     (metric mode) or when more than epsilon_time has passed since the last
//     purge (time mode).
// eta_bar is the smallest eta among rows captured before t, capped by the eta
// that triggered the previous purge. A failed solve holds W_prev and skips
// the purge.
inline PurgeResult purge_step(IrlStack& stack, const PurgePolicy& policy, const FeatureLibrary& lib,
                              double eta_now, double t, const WeightEstimate& W_prev) {
  PurgeResult out;
  out.W = W_prev;
  out.kappa = stack.condition();
  out.eta_bar = std::min(stack.eta_bar(t), stack.last_purge_eta());

  if (stack.full() && out.kappa < policy.kappa1_lower && stack.varpi()) {
    try {
      WeightSolve s = solve_weights_detailed(stack, lib);
      out.W = std::move(s.weights);
      out.residual_norm = s.residual_norm;
      out.updated = true;
    } catch (const RankConditionError&) {
      return out;
    } catch (const DegenerateRhsError&) {
      return out;
    }
  }

  bool purge = false;
  if (policy.mode == PurgeMode::kMetric) {
    purge = stack.full() && out.kappa < policy.kappa2_lower && eta_now < out.eta_bar;
  } else {
    purge = t - stack.last_purge_time() > policy.epsilon_time;
  }
  if (purge) {
    stack.purge(t, eta_now);
    out.purged = true;
  }
  return out;
}

// Axis-aligned box of states the demonstrator may be queried at.
struct QueryRegion {
  Vec lo;
  Vec hi;

  bool contains(const Vec& x) const {
    return x.size() == lo.size() && (x.array() >= lo.array()).all() &&
           (x.array() <= hi.array()).all();
  }

  // Box around [lo, hi] with each half-width scaled by 1 + inflation.
  static QueryRegion inflated(const Vec& lo, const Vec& hi, double inflation = 0.2) {
    const Vec center = 0.5 * (lo + hi);
    const Vec half = 0.5 * (hi - lo) * (1.0 + inflation);
    return {center - half, center + half};
  }
};

// Running bounding box of observed states.
class ObservedRange {
 public:
  void observe(const Vec& x) {
    if (lo_.size() == 0) {
      lo_ = x;
      hi_ = x;
      return;
    }
    lo_ = lo_.cwiseMin(x);
    hi_ = hi_.cwiseMax(x);
  }
  bool empty() const { return lo_.size() == 0; }
  QueryRegion region(double inflation = 0.2) const {
    return QueryRegion::inflated(lo_, hi_, inflation);
  }

 private:
  Vec lo_;
  Vec hi_;
};

// Asks the demonstrator for its control at x_query.
template <StatePolicy Demonstrator>
TrajectorySample query_demonstrator(const Vec& x_query, const Demonstrator& demonstrator,
                                    double t, const QueryRegion& region) {
  if (!region.contains(x_query)) throw InvalidArgument("query state lies outside the query region");
  return {t, x_query, Vec(demonstrator(x_query))};
}

// Uniform query states inside a region, reproducible from a seed.
class QuerySampler {
 public:
  explicit QuerySampler(std::uint64_t seed) : rng_(seed) {}

  Vec sample(const QueryRegion& region) {
    Vec x(region.lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      // Manual affine map keeps the draw identical across standard libraries.
      const double u = double(rng_() >> 11) * 0x1.0p-53;
      x(i) = std::min(region.hi(i), region.lo(i) + u * (region.hi(i) - region.lo(i)));
    }
    return x;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oirl

#endif  // OIRL_PURGING_HPP_
