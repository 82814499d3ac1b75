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

#include "fixdetect/series.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "fixdetect/causal.hpp"
#include "fixdetect/error.hpp"

namespace fixdetect::series {
namespace {

using BucketRuns = std::map<std::int64_t, std::vector<TestRunReport>>;

void check_version(std::span<const TestRunReport> runs, const std::string& version,
                   std::string_view label) {
  for (const auto& run : runs) {
    if (run.version_id != version) {
      throw Error(ErrorCode::MixedPopulation, std::string(label) + " run has version_id '" +
                                                  run.version_id + "', expected '" + version + "'");
    }
  }
}

BucketRuns bucketize(std::span<const TestRunReport> runs, const std::string& test_id,
                     std::int64_t origin, std::int64_t width) {
  BucketRuns buckets;
  for (const auto& run : runs) {
    if (run.test_id != test_id) continue;
    buckets[(run.timestamp - origin) / width].push_back(run);
  }
  return buckets;
}

}  // namespace

std::vector<double> DegreeSeries::degrees() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.degree);
  return out;
}

void DegreeSeries::validate() const {
  if (bucket_width <= 0) throw Error(ErrorCode::InvariantViolation, "bucket_width must be positive");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.degree >= -1.0 && p.degree <= 1.0)) {
      throw Error(ErrorCode::InvariantViolation,
                  "points[" + std::to_string(i) + "].degree outside [-1, 1]");
    }
    if (p.n_runs == 0) {
      throw Error(ErrorCode::InvariantViolation, "points[" + std::to_string(i) + "].n_runs is zero");
    }
    if (i > 0) {
      const std::int64_t gap = p.bucket_start - points[i - 1].bucket_start;
      if (gap <= 0 || gap % bucket_width != 0) {
        throw Error(ErrorCode::InvariantViolation,
                    "points[" + std::to_string(i) + "].t is not on the bucket grid after its predecessor");
      }
    }
  }
}

DegreeSeries build_degree_series(std::span<const TestRunReport> baseline_runs,
                                 std::span<const TestRunReport> updated_runs,
                                 const PatchIntervention& patch, const FailureSignature& signature,
                                 const MethodId& method, const BucketingOptions& options) {
  if (baseline_runs.empty() || updated_runs.empty()) {
    throw Error(ErrorCode::EmptyPopulation, "degree series needs runs from both versions");
  }
  if (options.bucket_width <= 0) {
    throw Error(ErrorCode::InvalidParameter, "bucket_width must be positive");
  }
  if (options.min_runs_per_bucket < 1) {
    throw Error(ErrorCode::InvalidParameter, "min_runs_per_bucket must be at least 1");
  }
  check_version(baseline_runs, patch.baseline_version, "baseline");
  check_version(updated_runs, patch.updated_version, "updated");

  std::int64_t origin = baseline_runs.front().timestamp;
  for (const auto& run : baseline_runs) origin = std::min(origin, run.timestamp);
  for (const auto& run : updated_runs) origin = std::min(origin, run.timestamp);

  const BucketRuns base = bucketize(baseline_runs, signature.test_id, origin, options.bucket_width);
  const BucketRuns upd = bucketize(updated_runs, signature.test_id, origin, options.bucket_width);

  DegreeSeries series{method, signature, options.bucket_width, {}};
  for (const auto& [bucket, with_runs] : upd) {
    auto it = base.find(bucket);
    if (it == base.end()) continue;
    const auto& without_runs = it->second;
    if (with_runs.size() < options.min_runs_per_bucket ||
        without_runs.size() < options.min_runs_per_bucket) {
      continue;
    }
    const auto p_with = causal::estimate_do_probability(with_runs, signature, options.identity);
    const auto p_without = causal::estimate_do_probability(without_runs, signature, options.identity);
    const auto degree = causal::causal_degree(p_with, p_without, causal::MeasureKind::Difference);
    series.points.push_back({origin + bucket * options.bucket_width, degree.value,
                             p_with.n_runs() + p_without.n_runs()});
  }
  if (series.points.empty()) {
    throw Error(ErrorCode::EmptySeries, "no bucket has enough runs in both versions for '" +
                                            signature.test_id + "'");
  }
  return series;
}

std::pair<DegreeSeries, DegreeSeries> split_series(const DegreeSeries& series, std::size_t k) {
  if (k < 1 || k >= series.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "split index " + std::to_string(k) +
                                                " outside [1, " + std::to_string(series.size()) + ")");
  }
  DegreeSeries first{series.method, series.signature, series.bucket_width, {}};
  DegreeSeries second = first;
  const auto mid = series.points.begin() + static_cast<std::ptrdiff_t>(k);
  first.points.assign(series.points.begin(), mid);
  second.points.assign(mid, series.points.end());
  return {std::move(first), std::move(second)};
}

DegreeSeries concat_series(const DegreeSeries& first, const DegreeSeries& second) {
  if (first.method != second.method || first.signature != second.signature ||
      first.bucket_width != second.bucket_width) {
    throw Error(ErrorCode::InvalidParameter, "cannot concatenate series of different groups");
  }
  DegreeSeries out = first;
  out.points.insert(out.points.end(), second.points.begin(), second.points.end());
  return out;
}

}  // namespace fixdetect::series
