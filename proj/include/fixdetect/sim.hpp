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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fixdetect/json_io.hpp"
#include "fixdetect/series.hpp"
#include "fixdetect/types.hpp"

namespace fixdetect::sim {

/// Portable random stream: std::mt19937_64 (bit-exact across standard
/// libraries) with our own conversions to uniform and normal variates, since
/// the std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, bound).
  std::uint64_t bounded(std::uint64_t bound);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

/// Seed for the independent stream identified by `parts`. Streams are keyed
/// by content (test and cluster names hash in), so adding a test never shifts
/// the draws of another.
std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts);

struct TestSpec {
  std::string test_id;
  FailureSignature signature;
  double baseline_fail_rate = 0.0;
  double updated_fail_rate = 0.0;
  double flaky_noise = 0.05;  // half-width of the per-bucket uniform rate jitter
  /// Methods that truly cause this failure. Defaults to the signature's top
  /// method when the updated rate exceeds the baseline rate, else none.
  std::optional<std::set<MethodId>> causes;

  std::set<MethodId> true_causes() const;
};

enum class TruthKind { FixIntroduced, BugIntroduced };

std::string_view to_string(TruthKind kind);

struct GroundTruthEvent {
  std::size_t at_bucket = 0;
  TruthKind kind = TruthKind::FixIntroduced;
  std::string affected_test;
  double new_updated_fail_rate = 0.0;

  friend bool operator==(const GroundTruthEvent&, const GroundTruthEvent&) = default;
};

struct ClusterSpec {
  std::string cluster_id;
  bool receives_patch = true;
};

/// A controlled two-version experiment (no clusters: every bucket runs both
/// versions) or a canary layout (each cluster runs the version it was
/// given: patched clusters the updated one, the rest the baseline).
struct Scenario {
  std::uint64_t seed = 0;
  std::size_t duration = 1;  // buckets
  std::int64_t bucket_width = series::kDefaultBucketWidthMs;
  std::size_t runs_per_bucket_per_version = 1;
  std::int64_t start_ms = 0;
  std::string baseline_version = "baseline";
  std::string updated_version = "updated";
  std::set<MethodId> patched_methods;  // empty: union of the tests' true causes
  std::vector<TestSpec> tests;
  std::vector<GroundTruthEvent> events;
  std::vector<ClusterSpec> clusters;

  /// Throws Error(InvalidScenario) naming the offending field path.
  void validate() const;
  PatchIntervention patch() const;
  /// Failure signature -> methods that truly cause it.
  std::map<FailureSignature, std::set<MethodId>> grouping_truth() const;
};

struct SimulationResult {
  std::vector<TestRunReport> runs;
  std::vector<GroundTruthEvent> truth;  // sorted by at_bucket
};

SimulationResult simulate(const Scenario& scenario);

Scenario scenario_from_json(const Json& j, bool strict = true);
Json to_json(const Scenario& scenario);
Json to_json(const GroundTruthEvent& event);
GroundTruthEvent truth_event_from_json(const Json& j, const std::string& path, bool strict = true);

/// {"events": [...], "grouping": [{"signature": ..., "methods": [...]}], "patch": {...}}
Json truth_to_json(const Scenario& scenario, const std::vector<GroundTruthEvent>& events);

}  // namespace fixdetect::sim
