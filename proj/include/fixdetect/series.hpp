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

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fixdetect/types.hpp"

namespace fixdetect::series {

inline constexpr std::int64_t kDefaultBucketWidthMs = 3'600'000;

struct SeriesPoint {
  std::int64_t bucket_start = 0;
  double degree = 0.0;
  std::uint64_t n_runs = 0;  // runs from both populations in the bucket

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

/// Error-causing behaviour of one method for one failure group: a
/// time-ordered list of Difference degrees, one per populated bucket.
struct DegreeSeries {
  MethodId method;
  FailureSignature signature;
  std::int64_t bucket_width = kDefaultBucketWidthMs;
  std::vector<SeriesPoint> points;

  std::size_t size() const noexcept { return points.size(); }
  std::vector<double> degrees() const;

  /// Throws Error(InvariantViolation) if points are unordered, off-grid or
  /// out of [-1, 1].
  void validate() const;

  friend bool operator==(const DegreeSeries&, const DegreeSeries&) = default;
};

struct BucketingOptions {
  std::int64_t bucket_width = kDefaultBucketWidthMs;
  std::uint64_t min_runs_per_bucket = 1;
  IdentityMode identity = IdentityMode::TraceScoped;
};

/// Buckets both populations on a fixed grid anchored at the earliest
/// timestamp seen in either list. Buckets where either population has fewer
/// than min_runs_per_bucket runs of the signature's test are left out.
DegreeSeries build_degree_series(std::span<const TestRunReport> baseline_runs,
                                 std::span<const TestRunReport> updated_runs,
                                 const PatchIntervention& patch, const FailureSignature& signature,
                                 const MethodId& method, const BucketingOptions& options);

/// T1 holds the first k points, T2 the rest; 1 <= k < size.
std::pair<DegreeSeries, DegreeSeries> split_series(const DegreeSeries& series, std::size_t k);

/// Inverse of split_series. Both parts must describe the same method,
/// signature and bucket width.
DegreeSeries concat_series(const DegreeSeries& first, const DegreeSeries& second);

}  // namespace fixdetect::series
