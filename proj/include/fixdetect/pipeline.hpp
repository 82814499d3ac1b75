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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fixdetect/causal.hpp"
#include "fixdetect/changepoint.hpp"
#include "fixdetect/json_io.hpp"
#include "fixdetect/series.hpp"

namespace fixdetect::pipeline {

struct PipelineConfig {
  causal::GroupingConfig grouping;
  cpd::CpdConfig cpd;
  std::int64_t bucket_width = series::kDefaultBucketWidthMs;
  std::uint64_t min_runs_per_bucket = 5;
  IdentityMode identity_mode = IdentityMode::TraceScoped;
  /// A method only counts as fixed when the degree after its last Fix event
  /// averages below this ceiling.
  double fixed_mean_ceiling = 0.05;

  void validate() const;
};

std::string_view to_string(IdentityMode mode);
std::optional<IdentityMode> parse_identity(std::string_view text);

/// Fields present in `j` override the corresponding fields of `base`.
PipelineConfig pipeline_config_from_json(const Json& j, bool strict = true, PipelineConfig base = {});
Json to_json(const PipelineConfig& config);

enum class Verdict { Fixed, Improved, Regressed, Unchanged, InsufficientData };
std::string_view to_string(Verdict verdict);

struct SignatureReport {
  FailureSignature signature;
  causal::CausalDegree degree;
  std::size_t series_length = 0;
  std::vector<cpd::ChangeEvent> events;
  std::vector<std::int64_t> event_bucket_starts;  // parallel to events
  std::optional<double> tail_mean;                // mean degree after the last event
  Verdict verdict = Verdict::Unchanged;
};

struct MethodReport {
  MethodId method;
  std::vector<SignatureReport> signatures;  // sorted by signature
};

struct PipelineReport {
  PipelineConfig config;
  std::vector<MethodReport> methods;          // sorted by method
  std::vector<FailureSignature> ungrouped;    // observed failures with no qualifying cause
};

/// Splits `runs` by version, groups failures, builds one degree series per
/// grouped (method, signature) pair and runs binary segmentation on it.
PipelineReport run_pipeline(std::span<const TestRunReport> runs, const PatchIntervention& patch,
                            const PipelineConfig& config);

Verdict verdict_for(std::span<const cpd::ChangeEvent> events, std::optional<double> tail_mean,
                    double fixed_mean_ceiling);

Json to_json(const PipelineReport& report);

}  // namespace fixdetect::pipeline
