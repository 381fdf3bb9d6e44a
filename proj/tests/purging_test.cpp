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


#include "oirl/purging.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace oirl {
namespace {

using testing::vec2;

WeightEstimate initial_weights() {
  return WeightEstimate::from_stacked(Vec::Constant(5, 0.5), benchmark::features(), 1.0);
}

PurgePolicy default_policy() {
  PurgePolicy policy;
  policy.W0 = initial_weights();
  return policy;
}

// N benchmark rows at well-spread states, row i captured at time i with eta
// equal to eta0 + slope * i.
IrlStack filled_stack(std::size_t N, double eta0 = 1.0, std::uint64_t seed = 3,
                      double slope = 1.0) {
  const auto lib = benchmark::features();
  const auto model = benchmark::make_model();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  IrlStack stack(N, 1.0, 1e-3, 1.0);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec x = vec2(unif(rng), unif(rng));
    stack_try_insert(stack, build_row(x, benchmark::optimal_policy(x), testing::true_theta(),
                                      eta0 + slope * double(i), lib, model, 1.0,
                                      double(i)));
  }
  return stack;
}

TEST(PurgeModeTest, ParseAndPrint) {
  EXPECT_EQ(parse_purge_mode("metric"), PurgeMode::kMetric);
  EXPECT_EQ(parse_purge_mode("time"), PurgeMode::kTime);
  EXPECT_EQ(to_string(PurgeMode::kTime), "time");
  EXPECT_THROW(parse_purge_mode("Metric"), InvalidArgument);
}

TEST(PurgePolicyTest, Validate) {
  auto policy = default_policy();
  EXPECT_NO_THROW(policy.validate());
  policy.kappa1_lower = 0.0;
  EXPECT_THROW(policy.validate(), InvalidArgument);
  policy = default_policy();
  policy.mode = PurgeMode::kTime;
  policy.epsilon_time = 0.0;
  EXPECT_THROW(policy.validate(), InvalidArgument);
}

TEST(PurgeStepTest, EmptyStackHoldsInitialWeights) {
  IrlStack stack(10, 1.0, 1e-3, 1.0);
  const auto policy = default_policy();
  const auto r = purge_step(stack, policy, benchmark::features(), kInf, 0.0, policy.W0);
  EXPECT_EQ(r.W, policy.W0);
  EXPECT_FALSE(r.updated);
  EXPECT_FALSE(r.purged);
  EXPECT_EQ(stack.purge_count(), 0);
}

TEST(PurgeStepTest, SolvesAndPurgesWhenMetricImproves) {
  auto stack = filled_stack(10);
  const auto policy = default_policy();
  ASSERT_LT(stack.condition(), policy.kappa1_lower);
  const auto r = purge_step(stack, policy, benchmark::features(), 0.5, 20.0, policy.W0);
  EXPECT_TRUE(r.updated);
  EXPECT_TRUE(r.purged);
  EXPECT_DOUBLE_EQ(r.eta_bar, 1.0);
  EXPECT_LE((r.W.stacked() - benchmark::BenchmarkSpec{}.true_weights()).norm(), 1e-6);
  EXPECT_TRUE(stack.empty());
  EXPECT_EQ(stack.purge_count(), 1);
  EXPECT_EQ(stack.last_purge_time(), 20.0);
  EXPECT_EQ(stack.last_purge_eta(), 0.5);
}

TEST(PurgeStepTest, EqualMetricDoesNotPurge) {
  auto stack = filled_stack(10);
  const auto policy = default_policy();
  const auto r = purge_step(stack, policy, benchmark::features(), 1.0, 20.0, policy.W0);
  EXPECT_TRUE(r.updated);
  EXPECT_FALSE(r.purged);
  EXPECT_TRUE(stack.full());
}

TEST(PurgeStepTest, OnlyEarlierRowsCountTowardMetric) {
  auto stack = filled_stack(10, 1.0, 3, -0.05);
  const auto policy = default_policy();
  const auto lib = benchmark::features();
  // Rows at t = 0, 1, 2 carry eta 1, 0.95, 0.9; later rows go down to 0.55.
  const auto hold = purge_step(stack, policy, lib, 0.9, 3.0, policy.W0);
  EXPECT_DOUBLE_EQ(hold.eta_bar, 0.9);
  EXPECT_FALSE(hold.purged);
  const auto r = purge_step(stack, policy, lib, 0.8, 3.0, policy.W0);
  EXPECT_TRUE(r.purged);
}

TEST(PurgeStepTest, NoEarlierRowsMeansUnboundedMetric) {
  auto stack = filled_stack(10);
  const auto policy = default_policy();
  const auto lib = benchmark::features();
  EXPECT_TRUE(std::isinf(purge_step(stack, policy, lib, kInf, 0.0, policy.W0).eta_bar));
  EXPECT_FALSE(purge_step(stack, policy, lib, kInf, 0.0, policy.W0).purged);
  EXPECT_TRUE(purge_step(stack, policy, lib, 1e9, 0.0, policy.W0).purged);
}

TEST(PurgeStepTest, MetricIsCappedByPreviousTrigger) {
  auto stack = filled_stack(10);
  const auto lib = benchmark::features();
  const auto policy = default_policy();
  ASSERT_TRUE(purge_step(stack, policy, lib, 0.5, 20.0, policy.W0).purged);
  auto refill = filled_stack(10, 0.7, 17);
  for (const auto& row : refill.rows()) {
    auto shifted = row;
    shifted.t += 21.0;
    stack_try_insert(stack, shifted);
  }
  ASSERT_TRUE(stack.full());
  // Stored rows have eta >= 0.7 but the last purge fired at 0.5.
  const auto hold = purge_step(stack, policy, lib, 0.6, 40.0, policy.W0);
  EXPECT_DOUBLE_EQ(hold.eta_bar, 0.5);
  EXPECT_FALSE(hold.purged);
  EXPECT_TRUE(purge_step(stack, policy, lib, 0.4, 40.0, policy.W0).purged);
  EXPECT_EQ(stack.purge_count(), 2);
}

TEST(PurgeStepTest, PartialStackHoldsWeights) {
  auto stack = filled_stack(10);
  IrlStack partial(20, 1.0, 1e-3, 1.0);
  for (const auto& row : stack.rows()) stack_try_insert(partial, row);
  const auto policy = default_policy();
  const auto r = purge_step(partial, policy, benchmark::features(), 0.0, 20.0, policy.W0);
  EXPECT_FALSE(r.updated);
  EXPECT_FALSE(r.purged);
  EXPECT_EQ(r.W, policy.W0);
}

TEST(PurgeStepTest, IllConditionedStackHoldsWeights) {
  auto stack = filled_stack(10);
  auto policy = default_policy();
  policy.kappa1_lower = 0.5 * stack.condition();
  policy.kappa2_lower = 0.5 * stack.condition();
  const auto r = purge_step(stack, policy, benchmark::features(), 0.0, 20.0, policy.W0);
  EXPECT_FALSE(r.updated);
  EXPECT_FALSE(r.purged);
  EXPECT_EQ(r.W, policy.W0);
}

TEST(PurgeStepTest, RejectedInsertionHoldsWeights) {
  const auto source = filled_stack(10);
  IrlStack stack(10, 0.0, 1e-3, 1.0);  // xi1 = 0 rejects every replacement
  for (const auto& row : source.rows()) stack_try_insert(stack, row);
  ASSERT_FALSE(stack_try_insert(stack, source.rows()[3]));
  ASSERT_FALSE(stack.varpi());
  const auto policy = default_policy();
  const auto r = purge_step(stack, policy, benchmark::features(), 0.5, 20.0, policy.W0);
  EXPECT_FALSE(r.updated);
  EXPECT_EQ(r.W, policy.W0);
  EXPECT_TRUE(r.purged);
}

TEST(PurgeStepTest, FailedSolveHoldsAndSkipsPurge) {
  const auto lib = benchmark::features();
  const auto model = benchmark::make_model();
  IrlStack stack(10, 1.0, 1e-3, 1.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Vec x = vec2(unif(rng), unif(rng));
    stack_try_insert(stack, build_row(x, Vec::Zero(1), testing::true_theta(), 5.0, lib, model, 1.0,
                                      double(i)));
  }
  auto policy = default_policy();
  policy.kappa1_lower = kInf;
  policy.kappa2_lower = kInf;
  const auto r = purge_step(stack, policy, lib, 0.0, 20.0, policy.W0);
  EXPECT_FALSE(r.updated);
  EXPECT_FALSE(r.purged);
  EXPECT_EQ(r.W, policy.W0);
  EXPECT_EQ(stack.size(), 10u);
}

TEST(PurgeStepTest, TimeModePurgesOnSchedule) {
  auto stack = filled_stack(10);
  auto policy = default_policy();
  policy.mode = PurgeMode::kTime;
  policy.epsilon_time = 5.0;
  const auto lib = benchmark::features();
  EXPECT_FALSE(purge_step(stack, policy, lib, kInf, 5.0, policy.W0).purged);
  const auto r = purge_step(stack, policy, lib, kInf, 5.005, policy.W0);
  EXPECT_TRUE(r.purged);
  EXPECT_TRUE(r.updated);
  EXPECT_EQ(stack.last_purge_time(), 5.005);
  // Even an empty stack is purged on schedule.
  EXPECT_FALSE(purge_step(stack, policy, lib, kInf, 10.0, r.W).purged);
  EXPECT_TRUE(purge_step(stack, policy, lib, kInf, 10.01, r.W).purged);
  EXPECT_EQ(stack.purge_count(), 2);
}

TEST(QueryRegionTest, InflatedBox) {
  const auto region = QueryRegion::inflated(vec2(-1, 0), vec2(1, 2), 0.2);
  EXPECT_TRUE(region.lo.isApprox(vec2(-1.2, -0.2)));
  EXPECT_TRUE(region.hi.isApprox(vec2(1.2, 2.2)));
  EXPECT_TRUE(region.contains(vec2(1.1, 2.1)));
  EXPECT_FALSE(region.contains(vec2(1.3, 0.0)));
  EXPECT_FALSE(region.contains(Vec::Zero(3)));
}

TEST(ObservedRangeTest, TracksBoundingBox) {
  ObservedRange range;
  EXPECT_TRUE(range.empty());
  range.observe(vec2(1, -1));
  range.observe(vec2(-2, 0.5));
  const auto region = range.region(0.0);
  EXPECT_EQ(region.lo, vec2(-2, -1));
  EXPECT_EQ(region.hi, vec2(1, 0.5));
}

TEST(QueryDemonstratorTest, ReturnsDemonstratorControl) {
  const auto region = QueryRegion::inflated(vec2(-1, -1), vec2(1, 1));
  const auto s = query_demonstrator(vec2(0.2, 0.4), benchmark::optimal_policy, 3.0, region);
  EXPECT_EQ(s.t, 3.0);
  EXPECT_EQ(s.x, vec2(0.2, 0.4));
  ASSERT_EQ(s.u.size(), 1);
  EXPECT_DOUBLE_EQ(s.u(0), -1.2);
  EXPECT_THROW(query_demonstrator(vec2(0.0, 5.0), benchmark::optimal_policy, 3.0, region),
               InvalidArgument);
}

TEST(QuerySamplerTest, DeterministicAndInside) {
  const auto region = QueryRegion::inflated(vec2(-1, 0), vec2(1, 3));
  QuerySampler a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const Vec xa = a.sample(region);
    EXPECT_EQ(xa, b.sample(region));
    EXPECT_TRUE(region.contains(xa));
    differs |= xa != c.sample(region);
  }
  EXPECT_TRUE(differs);
}

TEST(QuerySamplerTest, RandomQueriesGiveFullRankStack) {
  const auto lib = benchmark::features();
  const auto model = benchmark::make_model();
  const auto region = QueryRegion::inflated(vec2(-1, -1), vec2(1, 1));
  QuerySampler sampler(0);
  IrlStack stack(5, 1.0, 1e-3, 1.0);
  for (int i = 0; i < 20; ++i) {
    const auto s = query_demonstrator(sampler.sample(region), benchmark::optimal_policy, 0.0, region);
    stack_try_insert(stack, build_row(s.x, s.u, testing::true_theta(), 0.0, lib, model, 1.0));
  }
  ASSERT_TRUE(stack.full());
  EXPECT_TRUE(std::isfinite(stack.condition()));
  EXPECT_LE((solve_weights(stack, lib).stacked() - benchmark::BenchmarkSpec{}.true_weights()).norm(),
            1e-6);
}

}  // namespace
}  // namespace oirl
