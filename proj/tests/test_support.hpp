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
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixdetect/sim.hpp"
#include "fixdetect/types.hpp"

namespace testing_support {

using fixdetect::FailureSignature;
using fixdetect::MethodId;
using fixdetect::Outcome;
using fixdetect::TestRunReport;

inline FailureSignature signature(const std::string& test, const std::string& method,
                                  std::uint64_t hash = 1) {
  return FailureSignature{test, MethodId(method), hash};
}

inline TestRunReport pass_run(const std::string& version, const std::string& test,
                              std::int64_t t = 0) {
  TestRunReport r;
  r.timestamp = t;
  r.version_id = version;
  r.test_id = test;
  return r;
}

inline TestRunReport fail_run(const std::string& version, const FailureSignature& sig,
                              std::int64_t t = 0) {
  TestRunReport r = pass_run(version, sig.test_id, t);
  r.outcome = Outcome::Fail;
  r.failure_signature = sig;
  return r;
}

/// `failures` failing runs of `sig` followed by passing runs up to `total`,
/// all stamped `t`.
inline void append_runs(std::vector<TestRunReport>& out, const std::string& version,
                        const FailureSignature& sig, int failures, int total, std::int64_t t = 0) {
  for (int i = 0; i < total; ++i) {
    out.push_back(i < failures ? fail_run(version, sig, t) : pass_run(version, sig.test_id, t));
  }
}

/// Single-test controlled experiment in the style used throughout the tests.
inline fixdetect::sim::Scenario one_test_scenario(std::uint64_t seed, std::size_t duration,
                                                  std::size_t runs, double baseline_rate,
                                                  double updated_rate, double noise) {
  fixdetect::sim::Scenario s;
  s.seed = seed;
  s.duration = duration;
  s.runs_per_bucket_per_version = runs;
  fixdetect::sim::TestSpec t;
  t.test_id = "t1";
  t.signature = signature("t1", "m1");
  t.baseline_fail_rate = baseline_rate;
  t.updated_fail_rate = updated_rate;
  t.flaky_noise = noise;
  s.tests = {t};
  s.patched_methods = {MethodId("m1")};
  return s;
}

struct SplitRuns {
  std::vector<TestRunReport> baseline;
  std::vector<TestRunReport> updated;
};

inline SplitRuns split_by_version(const std::vector<TestRunReport>& runs,
                                  const fixdetect::PatchIntervention& patch) {
  SplitRuns out;
  for (const auto& r : runs) {
    (r.version_id == patch.baseline_version ? out.baseline : out.updated).push_back(r);
  }
  return out;
}

/// Degree series of the scenario's first test against its top method,
/// bucketed on the scenario grid.
inline fixdetect::series::DegreeSeries simulated_series(const fixdetect::sim::Scenario& scenario,
                                                        std::uint64_t min_runs_per_bucket = 1) {
  const auto result = fixdetect::sim::simulate(scenario);
  const auto patch = scenario.patch();
  const auto split = split_by_version(result.runs, patch);
  const auto& sig = scenario.tests.at(0).signature;
  fixdetect::series::BucketingOptions options;
  options.bucket_width = scenario.bucket_width;
  options.min_runs_per_bucket = min_runs_per_bucket;
  return fixdetect::series::build_degree_series(split.baseline, split.updated, patch, sig,
                                                sig.top_method, options);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("fixdetect_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing_support
