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


#include "oirl/dynamics.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace oirl {
namespace {

using testing::vec2;

TEST(EvalDynamicsTest, OriginIsAtRest) {
  const auto model = benchmark::make_model();
  const Vec dx = eval_dynamics(model, vec2(0, 0), Vec::Zero(1));
  EXPECT_EQ(dx(0), 0.0);
  EXPECT_EQ(dx(1), 0.0);
}

TEST(EvalDynamicsTest, VelocityTermUsesF3) {
  const Vec dx = eval_dynamics(benchmark::make_model(), vec2(0, 1), Vec::Zero(1));
  EXPECT_DOUBLE_EQ(dx(0), 1.0);
  EXPECT_DOUBLE_EQ(dx(1), 4.0);
}

TEST(EvalDynamicsTest, PositionTermsMatchSubstitution) {
  const Vec dx = eval_dynamics(benchmark::make_model(), vec2(1, 0), Vec::Zero(1));
  EXPECT_EQ(dx(0), 0.0);
  EXPECT_NEAR(dx(1), testing::kQdotAtUnitPosition, 1e-14);
}

TEST(EvalDynamicsTest, ControlEntersWithGainThree) {
  const Vec dx = eval_dynamics(benchmark::make_model(), vec2(0, 0), Vec::Constant(1, 2.0));
  EXPECT_DOUBLE_EQ(dx(1), 6.0);
}

TEST(EvalDynamicsTest, RejectsDimensionMismatch) {
  const auto model = benchmark::make_model();
  EXPECT_THROW(eval_dynamics(model, Vec::Zero(3), Vec::Zero(1)), InvalidArgument);
  EXPECT_THROW(eval_dynamics(model, Vec::Zero(2), Vec::Zero(2)), InvalidArgument);
}

TEST(EvalDynamicsTest, ApproximationErrorIsAdded) {
  auto model = benchmark::make_model();
  model.eps = [](const Vec&, const Vec&) { return Vec::Constant(1, 0.25); };
  const Vec dx = eval_dynamics(model, vec2(0, 0), Vec::Zero(1));
  EXPECT_DOUBLE_EQ(dx(1), 0.25);
}

TEST(BenchmarkTest, ControlEffectivenessHasZeroPositionRow) {
  const Mat g = benchmark::make_model().g_eff(vec2(0.3, -1));
  ASSERT_EQ(g.rows(), 2);
  EXPECT_EQ(g(0, 0), 0.0);
  EXPECT_EQ(g(1, 0), 3.0);
}

TEST(OptimalPolicyTest, Examples) {
  EXPECT_EQ(benchmark::optimal_policy(vec2(7, 0))(0), 0.0);
  EXPECT_EQ(benchmark::optimal_policy(vec2(0, 1))(0), -3.0);
  EXPECT_EQ(benchmark::optimal_policy(vec2(2, -0.5))(0), 1.5);
}

TEST(ValueFunctionTest, Examples) {
  EXPECT_EQ(benchmark::value_function(vec2(0, 0)), 0.0);
  EXPECT_DOUBLE_EQ(benchmark::value_function(vec2(0, 2)), 4.0);
  EXPECT_DOUBLE_EQ(benchmark::value_function(vec2(1, 0)),
                   std::numbers::pi / 2.0 + std::atan(5.0));
}

// V* solves the HJB equation, so along the closed loop dV*/dt = -(x2^2 + u^2).
TEST(ValueFunctionTest, HamiltonianVanishesUnderOptimalPolicy) {
  const auto model = benchmark::make_model();
  for (double x1 = -2; x1 <= 2; x1 += 0.5) {
    for (double x2 = -2; x2 <= 2; x2 += 0.5) {
      const Vec x = vec2(x1, x2);
      const Vec u = benchmark::optimal_policy(x);
      const Vec dx = eval_dynamics(model, x, u);
      const double h = 1e-6;
      const double dv1 = (benchmark::value_function(vec2(x1 + h, x2)) -
                          benchmark::value_function(vec2(x1 - h, x2))) / (2 * h);
      const double dv2 = (benchmark::value_function(vec2(x1, x2 + h)) -
                          benchmark::value_function(vec2(x1, x2 - h))) / (2 * h);
      EXPECT_NEAR(dv1 * dx(0) + dv2 * dx(1) + x2 * x2 + u(0) * u(0), 0.0, 1e-6);
    }
  }
}

TEST(SimulateTest, OriginStaysAtOriginExactly) {
  const Trajectory traj = testing::benchmark_trajectory(0.005, 2.0, vec2(0, 0));
  for (const auto& s : traj) {
    EXPECT_EQ(s.x(0), 0.0);
    EXPECT_EQ(s.x(1), 0.0);
    EXPECT_EQ(s.u(0), 0.0);
  }
}

TEST(SimulateTest, SampleCountAndTimes) {
  const Trajectory traj = testing::benchmark_trajectory(0.005, 1.0);
  ASSERT_EQ(traj.size(), 201u);
  EXPECT_EQ(traj[0].t, 0.0);
  EXPECT_EQ(traj[200].t, 200 * 0.005);
  EXPECT_DOUBLE_EQ(traj[200].u(0), -3.0 * traj[200].x(1));
}

TEST(SimulateTest, RejectsBadHorizon) {
  const auto model = benchmark::make_model();
  EXPECT_THROW(simulate(model, benchmark::optimal_policy, vec2(1, 1), 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(simulate(model, benchmark::optimal_policy, vec2(1, 1), 0.01, 0.005),
               InvalidArgument);
  EXPECT_THROW(simulate(model, benchmark::optimal_policy, vec2(1, 1), 0.3, 1.0), InvalidArgument);
}

TEST(SimulateTest, DecaysAndMatchesRefinedReference) {
  const Trajectory traj = testing::benchmark_trajectory(0.005, 10.0);
  const Trajectory fine = testing::benchmark_trajectory(0.00005, 10.0);
  EXPECT_LT(traj.back().x.norm(), vec2(1, 1).norm());
  EXPECT_LT((traj.back().x - fine.back().x).norm(), 1e-9);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    EXPECT_LE(benchmark::value_function(traj[i].x), benchmark::value_function(traj[i - 1].x) + 1e-8);
  }
}

TEST(SimulateTest, ValueFunctionNonIncreasingOverGrid) {
  for (double a = -2; a <= 2; a += 0.5) {
    for (double b = -2; b <= 2; b += 0.5) {
      const Trajectory traj = testing::benchmark_trajectory(0.005, 5.0, vec2(a, b));
      double prev = benchmark::value_function(traj[0].x);
      for (std::size_t i = 1; i < traj.size(); ++i) {
        const double v = benchmark::value_function(traj[i].x);
        ASSERT_LE(v, prev + 1e-8) << "x0=(" << a << "," << b << ") t=" << traj[i].t;
        prev = v;
      }
    }
  }
}

// Halving the step cuts the global error by ~2^4 for RK4.
TEST(SimulateTest, FourthOrderConvergence) {
  const double Ts = 0.1;
  const double T_end = 2.0;
  for (double a = -2; a <= 2; a += 1.0) {
    for (double b = -2; b <= 2; b += 1.0) {
      if (a == 0 && b == 0) continue;
      const Vec x0 = vec2(a, b);
      const Vec ref = testing::benchmark_trajectory(Ts / 100, T_end, x0).back().x;
      const double e1 = (testing::benchmark_trajectory(Ts, T_end, x0).back().x - ref).norm();
      const double e2 = (testing::benchmark_trajectory(Ts / 2, T_end, x0).back().x - ref).norm();
      const double ratio = e1 / e2;
      EXPECT_GE(ratio, 8.0) << "x0=(" << a << "," << b << ")";
      EXPECT_LE(ratio, 32.0) << "x0=(" << a << "," << b << ")";
    }
  }
}

TEST(SimulateTest, ReportsDivergenceTime) {
  DynamicsModel model;
  model.n = 1;
  model.m = 1;
  model.p = 1;
  model.f_known = [](const Vec& x, const Vec&) { return Vec::Constant(1, x(1) * x(1)); };
  model.basis = [](const Vec&, const Vec&) { return Vec::Zero(1); };
  model.theta_true = Mat::Zero(1, 1);
  model.g_eff = [](const Vec&) { return Mat::Zero(2, 1); };
  auto zero = [](const Vec&) { return Vec::Zero(1); };
  try {
    simulate(model, zero, vec2(0, 10), 0.01, 1.0);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LE(e.time(), 1.0);
  }
}

TEST(TrajectoryTest, EnforcesUniformSpacing) {
  Trajectory traj(0.1);
  traj.push_back({0.0, vec2(0, 0), Vec::Zero(1)});
  traj.push_back({0.1, vec2(0, 0), Vec::Zero(1)});
  EXPECT_THROW(traj.push_back({0.3, vec2(0, 0), Vec::Zero(1)}), InvalidArgument);
  EXPECT_THROW(traj.push_back({0.2, Vec::Zero(4), Vec::Zero(1)}), InvalidArgument);
  EXPECT_EQ(traj.find_index(0.1), 1);
  EXPECT_EQ(traj.find_index(0.15), -1);
  EXPECT_THROW(traj.index_at(0.2), InsufficientHistory);
}

}  // namespace
}  // namespace oirl
