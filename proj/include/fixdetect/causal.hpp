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

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "fixdetect/types.hpp"

namespace fixdetect::causal {

enum class MeasureKind { PearlPredicate, Difference, Ratio };

std::string_view to_string(MeasureKind kind);
std::optional<MeasureKind> parse_measure(std::string_view text);

/// Error-causing degree. Ratio degrees may be +infinity when the baseline
/// never fails but the updated version does.
struct CausalDegree {
  double value = 0.0;
  MeasureKind measure = MeasureKind::Difference;

  bool is_infinite() const noexcept;
  friend bool operator==(const CausalDegree&, const CausalDegree&) = default;
};

struct GroupingConfig {
  MeasureKind measure = MeasureKind::Difference;
  double threshold = 0.2;
  std::size_t min_runs_per_version = 10;
  IdentityMode identity = IdentityMode::TraceScoped;

  static double default_threshold(MeasureKind measure);
  static GroupingConfig for_measure(MeasureKind measure);
  void validate() const;
};

struct Cause {
  MethodId method;
  CausalDegree degree;

  friend bool operator==(const Cause&, const Cause&) = default;
};

struct GroupingEntry {
  FailureSignature signature;
  ProbabilityEstimate p_with;
  ProbabilityEstimate p_without;
  CausalDegree degree;
  std::vector<Cause> causes;  // degree descending, then method name ascending

  friend bool operator==(const GroupingEntry&, const GroupingEntry&) = default;
};

/// Entries are ordered by signature.
struct FailureGrouping {
  std::vector<GroupingEntry> entries;

  friend bool operator==(const FailureGrouping&, const FailureGrouping&) = default;
};

/// Fraction of `runs` whose failure matches `target`. All runs must come from
/// one version and one test (the target's).
ProbabilityEstimate estimate_do_probability(std::span<const TestRunReport> runs,
                                            const FailureSignature& target,
                                            IdentityMode identity = IdentityMode::TraceScoped);

/// Pr(E | do(C)) > Pr(E | do(not C)), decided on the exact count ratios.
bool pearl_causes(const ProbabilityEstimate& p_with, const ProbabilityEstimate& p_without);

CausalDegree causal_degree(const ProbabilityEstimate& p_with, const ProbabilityEstimate& p_without,
                           MeasureKind measure);

/// True when the degree is strictly over the configured bound. Under
/// PearlPredicate the bound is the predicate itself (degree > 0).
bool exceeds_threshold(const CausalDegree& degree, const GroupingConfig& config);

/// Groups every failure observed in `updated_runs` to the methods that cause it.
FailureGrouping group_failures(std::span<const TestRunReport> baseline_runs,
                               std::span<const TestRunReport> updated_runs,
                               const PatchIntervention& patch, const GroupingConfig& config);

}  // namespace fixdetect::causal
