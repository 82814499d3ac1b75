// Copyright 2026 The fixdetect Authors
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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixdetect/causal.hpp"
#include "fixdetect/error.hpp"
#include "fixdetect/sim.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fixdetect;
using namespace fixdetect::causal;
using testing_support::append_runs;
using testing_support::signature;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvariantViolation;
}

const PatchIntervention kPatch{"base", "upd", {MethodId("m1")}};

}  // namespace

TEST(EstimateDoProbabilityTest, DirectProportion) {
  const auto sig = signature("t", "m1");
  std::vector<TestRunReport> runs;
  append_runs(runs, "upd", sig, 8, 10);
  const auto e = estimate_do_probability(runs, sig);
  EXPECT_EQ(e.p(), 0.8);
  EXPECT_EQ(e.n_runs(), 10u);
  EXPECT_EQ(e.n_failures(), 8u);

  std::vector<TestRunReport> clean;
  append_runs(clean, "upd", sig, 0, 5);
  EXPECT_EQ(estimate_do_probability(clean, sig).p(), 0.0);
}

TEST(EstimateDoProbabilityTest, Errors) {
  const auto sig = signature("t", "m1");
  EXPECT_EQ(code_of([&] { estimate_do_probability({}, sig); }), ErrorCode::EmptyPopulation);
  std::vector<TestRunReport> mixed;
  append_runs(mixed, "a", sig, 1, 2);
  append_runs(mixed, "b", sig, 1, 2);
  EXPECT_EQ(code_of([&] { estimate_do_probability(mixed, sig); }), ErrorCode::MixedPopulation);
  std::vector<TestRunReport> other_test;
  append_runs(other_test, "a", signature("u", "m1"), 1, 2);
  EXPECT_EQ(code_of([&] { estimate_do_probability(other_test, sig); }), ErrorCode::MixedPopulation);
}

TEST(EstimateDoProbabilityTest, IdentityModeControlsMatching) {
  const auto target = signature("t", "m1", 1);
  std::vector<TestRunReport> runs;
  append_runs(runs, "upd", target, 3, 3);
  append_runs(runs, "upd", signature("t", "m1", 2), 2, 2);
  append_runs(runs, "upd", signature("t", "other", 1), 1, 1);
  EXPECT_EQ(estimate_do_probability(runs, target, IdentityMode::TraceScoped).n_failures(), 3u);
  EXPECT_EQ(estimate_do_probability(runs, target, IdentityMode::TestMethodScoped).n_failures(), 5u);
}

TEST(PearlCausesTest, StrictInequality) {
  EXPECT_TRUE(pearl_causes(ProbabilityEstimate(8, 10), ProbabilityEstimate(1, 10)));
  EXPECT_FALSE(pearl_causes(ProbabilityEstimate(5, 10), ProbabilityEstimate(5, 10)));
  EXPECT_FALSE(pearl_causes(ProbabilityEstimate(0, 10), ProbabilityEstimate(3, 10)));
  // Equal rationals with different denominators are equal, not greater.
  EXPECT_FALSE(pearl_causes(ProbabilityEstimate(1, 3), ProbabilityEstimate(2, 6)));
}

TEST(CausalDegreeTest, Examples) {
  const ProbabilityEstimate with(8, 10), without(1, 10);
  EXPECT_NEAR(causal_degree(with, without, MeasureKind::Difference).value, 0.7, 1e-15);
  EXPECT_DOUBLE_EQ(causal_degree(with, without, MeasureKind::Ratio).value, 8.0);
  const auto inf = causal_degree(ProbabilityEstimate(3, 10), ProbabilityEstimate(0, 10), MeasureKind::Ratio);
  EXPECT_TRUE(inf.is_infinite());
  EXPECT_GT(inf.value, 0.0);
}

TEST(CausalDegreeTest, Errors) {
  const ProbabilityEstimate zero(0, 10);
  EXPECT_EQ(code_of([&] { causal_degree(zero, zero, MeasureKind::Ratio); }), ErrorCode::UndefinedRatio);
  EXPECT_EQ(code_of([&] { causal_degree(zero, zero, MeasureKind::PearlPredicate); }),
            ErrorCode::UnsupportedMeasure);
  EXPECT_EQ(causal_degree(zero, zero, MeasureKind::Difference).value, 0.0);
}

TEST(CausalDegreeTest, MeasuresAgreeWithPredicateAndDifferenceIsAntisymmetric) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t n1 = 1 + rng() % 50, n2 = 1 + rng() % 50;
    const ProbabilityEstimate a(rng() % (n1 + 1), n1), b(rng() % (n2 + 1), n2);
    const double diff = causal_degree(a, b, MeasureKind::Difference).value;
    EXPECT_EQ(pearl_causes(a, b), diff > 0.0);
    if (b.n_failures() > 0) {
      EXPECT_EQ(pearl_causes(a, b), causal_degree(a, b, MeasureKind::Ratio).value > 1.0);
    }
    EXPECT_EQ(diff, -causal_degree(b, a, MeasureKind::Difference).value);
    EXPECT_GE(diff, -1.0);
    EXPECT_LE(diff, 1.0);
  }
}

TEST(GroupingConfigTest, DefaultsAndValidation) {
  EXPECT_EQ(GroupingConfig{}.threshold, 0.2);
  EXPECT_EQ(GroupingConfig{}.measure, MeasureKind::Difference);
  EXPECT_EQ(GroupingConfig{}.min_runs_per_version, 10u);
  EXPECT_EQ(GroupingConfig::for_measure(MeasureKind::Ratio).threshold, 2.0);
  GroupingConfig bad;
  bad.threshold = INFINITY;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidParameter);
  bad = {};
  bad.min_runs_per_version = 0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidParameter);
}

TEST(GroupFailuresTest, SimulatedPatchRaisingFailureRate) {
  auto scenario = testing_support::one_test_scenario(42, 1, 200, 0.05, 0.9, 0.0);
  const auto result = sim::simulate(scenario);
  const auto split = testing_support::split_by_version(result.runs, scenario.patch());

  // Oracle: count the generated failures directly.
  const auto f1 = signature("t1", "m1");
  auto count = [&](const std::vector<TestRunReport>& runs) {
    return std::count_if(runs.begin(), runs.end(), [&](const TestRunReport& r) {
      return r.failure_signature && *r.failure_signature == f1;
    });
  };
  const double expected = static_cast<double>(count(split.updated)) / 200.0 -
                          static_cast<double>(count(split.baseline)) / 200.0;

  const auto grouping = group_failures(split.baseline, split.updated, scenario.patch(), GroupingConfig{});
  ASSERT_EQ(grouping.entries.size(), 1u);
  const auto& entry = grouping.entries[0];
  EXPECT_EQ(entry.signature, f1);
  ASSERT_EQ(entry.causes.size(), 1u);
  EXPECT_EQ(entry.causes[0].method, MethodId("m1"));
  EXPECT_NEAR(entry.causes[0].degree.value, expected, 1e-12);
  EXPECT_NEAR(entry.causes[0].degree.value, 0.85, 0.06);
}

TEST(GroupFailuresTest, NoBehaviourChangeRarelyGroups) {
  // Cause is listed when p_with - p_without > 0.2, i.e. X1 - X2 > 40 of 200.
  const double p_false_group = oracle::binomial_difference_exceeds(200, 0.1, 40);
  EXPECT_LT(p_false_group, 1e-6);

  int empty = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto scenario = testing_support::one_test_scenario(seed, 1, 200, 0.1, 0.1, 0.0);
    const auto result = sim::simulate(scenario);
    const auto split = testing_support::split_by_version(result.runs, scenario.patch());
    const auto grouping = group_failures(split.baseline, split.updated, scenario.patch(), GroupingConfig{});
    ASSERT_EQ(grouping.entries.size(), 1u);
    empty += grouping.entries[0].causes.empty() ? 1 : 0;
  }
  EXPECT_GE(empty, 95);
}

TEST(GroupFailuresTest, Errors) {
  const auto sig = signature("t", "m1");
  std::vector<TestRunReport> base, upd;
  append_runs(base, "base", sig, 1, 20);
  append_runs(upd, "upd", sig, 15, 20);
  EXPECT_EQ(code_of([&] { group_failures(base, {}, kPatch, {}); }), ErrorCode::EmptyPopulation);
  EXPECT_EQ(code_of([&] { group_failures({}, upd, kPatch, {}); }), ErrorCode::EmptyPopulation);
  EXPECT_EQ(code_of([&] { group_failures(upd, upd, kPatch, {}); }), ErrorCode::MixedPopulation);

  std::vector<TestRunReport> few;
  append_runs(few, "upd", sig, 5, 9);
  EXPECT_EQ(code_of([&] { group_failures(base, few, kPatch, {}); }), ErrorCode::InsufficientRuns);
}

TEST(GroupFailuresTest, AttributionUsesPatchedMethodsAndStackTop) {
  const auto in_patch = signature("t", "m1");
  const auto callee = signature("u", "helper");
  const auto unrelated = signature("w", "m9");
  std::vector<TestRunReport> base, upd;
  append_runs(base, "base", in_patch, 1, 20);
  append_runs(upd, "upd", in_patch, 18, 20);
  append_runs(base, "base", callee, 0, 20);
  append_runs(upd, "upd", callee, 10, 20);
  append_runs(base, "base", unrelated, 4, 20);
  append_runs(upd, "upd", unrelated, 4, 20);
  const PatchIntervention patch{"base", "upd", {MethodId("m2"), MethodId("m1")}};

  const auto grouping = group_failures(base, upd, patch, {});
  ASSERT_EQ(grouping.entries.size(), 3u);
  // Entries ordered by signature: t, u, w.
  EXPECT_EQ(grouping.entries[0].signature, in_patch);
  ASSERT_EQ(grouping.entries[0].causes.size(), 2u);
  EXPECT_EQ(grouping.entries[0].causes[0].method, MethodId("m1"));
  EXPECT_EQ(grouping.entries[0].causes[1].method, MethodId("m2"));

  ASSERT_EQ(grouping.entries[1].causes.size(), 3u);
  EXPECT_EQ(grouping.entries[1].causes[0].method, MethodId("helper"));

  EXPECT_TRUE(grouping.entries[2].causes.empty());
  for (const auto& entry : grouping.entries) {
    for (const auto& cause : entry.causes) EXPECT_GT(cause.degree.value, 0.2);
  }
}

TEST(GroupFailuresTest, RatioAndPearlMeasures) {
  const auto sig = signature("t", "m1");
  std::vector<TestRunReport> base, upd;
  append_runs(base, "base", sig, 0, 20);
  append_runs(upd, "upd", sig, 1, 20);

  auto ratio = group_failures(base, upd, kPatch, GroupingConfig::for_measure(MeasureKind::Ratio));
  ASSERT_EQ(ratio.entries[0].causes.size(), 1u);
  EXPECT_TRUE(ratio.entries[0].causes[0].degree.is_infinite());
  EXPECT_EQ(ratio.entries[0].causes[0].degree.measure, MeasureKind::Ratio);

  auto pearl = group_failures(base, upd, kPatch, GroupingConfig::for_measure(MeasureKind::PearlPredicate));
  ASSERT_EQ(pearl.entries[0].causes.size(), 1u);
  EXPECT_EQ(pearl.entries[0].causes[0].degree.measure, MeasureKind::PearlPredicate);

  // 0.05 is under the default difference bound.
  auto diff = group_failures(base, upd, kPatch, {});
  EXPECT_TRUE(diff.entries[0].causes.empty());
}

TEST(GroupFailuresTest, TestMethodScopedIdentityMergesTraces) {
  std::vector<TestRunReport> base, upd;
  append_runs(base, "base", signature("t", "m1", 5), 0, 20);
  append_runs(upd, "upd", signature("t", "m1", 9), 4, 4);
  append_runs(upd, "upd", signature("t", "m1", 5), 4, 4);
  append_runs(upd, "upd", signature("t", "m1", 5), 0, 12);

  GroupingConfig config;
  EXPECT_EQ(group_failures(base, upd, kPatch, config).entries.size(), 2u);
  config.identity = IdentityMode::TestMethodScoped;
  const auto merged = group_failures(base, upd, kPatch, config);
  ASSERT_EQ(merged.entries.size(), 1u);
  EXPECT_EQ(merged.entries[0].signature.trace_hash, 5u);
  EXPECT_EQ(merged.entries[0].p_with.n_failures(), 8u);
}

TEST(GroupFailuresTest, PermutationInvariant) {
  auto scenario = testing_support::one_test_scenario(7, 3, 40, 0.2, 0.6, 0.05);
  sim::TestSpec second = scenario.tests[0];
  second.test_id = "t2";
  second.signature = signature("t2", "m7", 3);
  second.baseline_fail_rate = 0.3;
  scenario.tests.push_back(second);
  const auto result = sim::simulate(scenario);
  auto split = testing_support::split_by_version(result.runs, scenario.patch());
  const auto reference = group_failures(split.baseline, split.updated, scenario.patch(), {});

  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(split.baseline.begin(), split.baseline.end(), rng);
    std::shuffle(split.updated.begin(), split.updated.end(), rng);
    EXPECT_EQ(group_failures(split.baseline, split.updated, scenario.patch(), {}), reference);
  }
}

TEST(GroupFailuresTest, ExtraFailingUpdatedRunNeverLowersDegree) {
  std::mt19937_64 rng(11);
  const auto sig = signature("t", "m1");
  for (int i = 0; i < 200; ++i) {
    const int base_fail = static_cast<int>(rng() % 21), upd_fail = 1 + static_cast<int>(rng() % 20);
    std::vector<TestRunReport> base, upd;
    append_runs(base, "base", sig, base_fail, 20);
    append_runs(upd, "upd", sig, upd_fail, 20);
    const double before = group_failures(base, upd, kPatch, {}).entries[0].degree.value;
    upd.push_back(testing_support::fail_run("upd", sig));
    const double after = group_failures(base, upd, kPatch, {}).entries[0].degree.value;
    EXPECT_GE(after, before);
  }
}

TEST(GroupFailuresTest, GroupingAgreesWithPerPopulationEstimates) {
  auto scenario = testing_support::one_test_scenario(5, 2, 30, 0.1, 0.7, 0.05);
  const auto result = sim::simulate(scenario);
  const auto split = testing_support::split_by_version(result.runs, scenario.patch());
  const auto grouping = group_failures(split.baseline, split.updated, scenario.patch(), {});
  const auto& entry = grouping.entries.at(0);
  EXPECT_EQ(entry.p_with, estimate_do_probability(split.updated, entry.signature));
  EXPECT_EQ(entry.p_without, estimate_do_probability(split.baseline, entry.signature));
}
