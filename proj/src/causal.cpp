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

#include "fixdetect/causal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

#include "fixdetect/error.hpp"

namespace fixdetect::causal {
namespace {

__extension__ typedef __int128 Wide;

// Cross products of the two count ratios: with / without compares as
// lhs / rhs with a common positive denominator n_with * n_without.
std::pair<Wide, Wide> cross(const ProbabilityEstimate& with, const ProbabilityEstimate& without) {
  return {static_cast<Wide>(with.n_failures()) * static_cast<Wide>(without.n_runs()),
          static_cast<Wide>(without.n_failures()) * static_cast<Wide>(with.n_runs())};
}

FailureSignature canonical_key(const FailureSignature& s, IdentityMode identity) {
  if (identity == IdentityMode::TraceScoped) return s;
  return FailureSignature{s.test_id, s.top_method, 0};
}

struct TestCounts {
  std::uint64_t runs = 0;
  std::map<FailureSignature, std::uint64_t> failures;  // keyed by canonical signature
};

std::unordered_map<std::string, TestCounts> count_population(std::span<const TestRunReport> runs,
                                                             const std::string& version,
                                                             IdentityMode identity,
                                                             std::string_view label) {
  std::unordered_map<std::string, TestCounts> counts;
  for (const auto& run : runs) {
    if (run.version_id != version) {
      throw Error(ErrorCode::MixedPopulation, std::string(label) + " run has version_id '" +
                                                  run.version_id + "', expected '" + version + "'");
    }
    auto& c = counts[run.test_id];
    ++c.runs;
    if (run.failure_signature) ++c.failures[canonical_key(*run.failure_signature, identity)];
  }
  return counts;
}

}  // namespace

std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::PearlPredicate: return "pearl";
    case MeasureKind::Difference: return "difference";
    case MeasureKind::Ratio: return "ratio";
  }
  return "unknown";
}

std::optional<MeasureKind> parse_measure(std::string_view text) {
  if (text == "pearl") return MeasureKind::PearlPredicate;
  if (text == "difference") return MeasureKind::Difference;
  if (text == "ratio") return MeasureKind::Ratio;
  return std::nullopt;
}

bool CausalDegree::is_infinite() const noexcept { return std::isinf(value); }

double GroupingConfig::default_threshold(MeasureKind measure) {
  switch (measure) {
    case MeasureKind::Ratio: return 2.0;
    case MeasureKind::PearlPredicate: return 0.0;
    case MeasureKind::Difference: break;
  }
  return 0.2;
}

GroupingConfig GroupingConfig::for_measure(MeasureKind measure) {
  GroupingConfig config;
  config.measure = measure;
  config.threshold = default_threshold(measure);
  return config;
}

void GroupingConfig::validate() const {
  if (!std::isfinite(threshold)) {
    throw Error(ErrorCode::InvalidParameter, "threshold must be finite");
  }
  if (min_runs_per_version < 1) {
    throw Error(ErrorCode::InvalidParameter, "min_runs_per_version must be at least 1");
  }
}

ProbabilityEstimate estimate_do_probability(std::span<const TestRunReport> runs,
                                            const FailureSignature& target,
                                            IdentityMode identity) {
  if (runs.empty()) {
    throw Error(ErrorCode::EmptyPopulation, "no runs for " + target.test_id);
  }
  const std::string& version = runs.front().version_id;
  std::uint64_t failures = 0;
  for (const auto& run : runs) {
    if (run.version_id != version) {
      throw Error(ErrorCode::MixedPopulation,
                  "runs span versions '" + version + "' and '" + run.version_id + "'");
    }
    if (run.test_id != target.test_id) {
      throw Error(ErrorCode::MixedPopulation,
                  "run of test '" + run.test_id + "' in population for '" + target.test_id + "'");
    }
    if (run.failure_signature && same_failure(*run.failure_signature, target, identity)) {
      ++failures;
    }
  }
  return ProbabilityEstimate(failures, runs.size());
}

bool pearl_causes(const ProbabilityEstimate& p_with, const ProbabilityEstimate& p_without) {
  const auto [lhs, rhs] = cross(p_with, p_without);
  return lhs > rhs;
}

CausalDegree causal_degree(const ProbabilityEstimate& p_with, const ProbabilityEstimate& p_without,
                           MeasureKind measure) {
  const auto [lhs, rhs] = cross(p_with, p_without);
  switch (measure) {
    case MeasureKind::Difference: {
      const Wide denominator =
          static_cast<Wide>(p_with.n_runs()) * static_cast<Wide>(p_without.n_runs());
      // The numerator is exact, so the sign of the result always matches the
      // sign of the rational difference.
      return {static_cast<double>(lhs - rhs) / static_cast<double>(denominator), measure};
    }
    case MeasureKind::Ratio:
      if (rhs == 0) {
        if (lhs == 0) {
          throw Error(ErrorCode::UndefinedRatio, "both failure probabilities are zero");
        }
        return {std::numeric_limits<double>::infinity(), measure};
      }
      return {static_cast<double>(lhs) / static_cast<double>(rhs), measure};
    case MeasureKind::PearlPredicate:
      break;
  }
  throw Error(ErrorCode::UnsupportedMeasure, "PearlPredicate has no degree; use pearl_causes");
}

bool exceeds_threshold(const CausalDegree& degree, const GroupingConfig& config) {
  if (config.measure == MeasureKind::PearlPredicate) return degree.value > 0.0;
  return degree.value > config.threshold;
}

FailureGrouping group_failures(std::span<const TestRunReport> baseline_runs,
                               std::span<const TestRunReport> updated_runs,
                               const PatchIntervention& patch, const GroupingConfig& config) {
  config.validate();
  patch.validate();
  if (updated_runs.empty()) throw Error(ErrorCode::EmptyPopulation, "no updated runs");
  if (baseline_runs.empty()) throw Error(ErrorCode::EmptyPopulation, "no baseline runs");

  const auto updated =
      count_population(updated_runs, patch.updated_version, config.identity, "updated");
  const auto baseline =
      count_population(baseline_runs, patch.baseline_version, config.identity, "baseline");

  // Under test/method identity several trace hashes collapse onto one key;
  // the smallest observed hash represents the group.
  std::map<FailureSignature, FailureSignature> observed;
  for (const auto& run : updated_runs) {
    if (!run.failure_signature) continue;
    const auto key = canonical_key(*run.failure_signature, config.identity);
    auto [it, inserted] = observed.emplace(key, *run.failure_signature);
    if (!inserted && run.failure_signature->trace_hash < it->second.trace_hash) {
      it->second = *run.failure_signature;
    }
  }

  FailureGrouping grouping;
  for (const auto& [key, representative] : observed) {
    const auto& with_counts = updated.at(key.test_id);
    auto base_it = baseline.find(key.test_id);
    const std::uint64_t base_runs = base_it == baseline.end() ? 0 : base_it->second.runs;
    if (with_counts.runs < config.min_runs_per_version || base_runs < config.min_runs_per_version) {
      throw Error(ErrorCode::InsufficientRuns,
                  "test '" + key.test_id + "' has " + std::to_string(base_runs) + " baseline and " +
                      std::to_string(with_counts.runs) + " updated runs, need " +
                      std::to_string(config.min_runs_per_version));
    }
    std::uint64_t base_failures = 0;
    if (auto f = base_it->second.failures.find(key); f != base_it->second.failures.end()) {
      base_failures = f->second;
    }
    ProbabilityEstimate p_with(with_counts.failures.at(key), with_counts.runs);
    ProbabilityEstimate p_without(base_failures, base_runs);

    const MeasureKind degree_measure = config.measure == MeasureKind::PearlPredicate
                                           ? MeasureKind::Difference
                                           : config.measure;
    CausalDegree degree = causal_degree(p_with, p_without, degree_measure);
    degree.measure = config.measure;

    GroupingEntry entry{representative, p_with, p_without, degree, {}};
    if (exceeds_threshold(degree, config)) {
      std::set<MethodId> candidates = patch.patched_methods;
      candidates.insert(representative.top_method);
      for (const auto& method : candidates) entry.causes.push_back({method, degree});
      std::stable_sort(entry.causes.begin(), entry.causes.end(), [](const Cause& a, const Cause& b) {
        if (a.degree.value != b.degree.value) return a.degree.value > b.degree.value;
        return a.method < b.method;
      });
    }
    grouping.entries.push_back(std::move(entry));
  }
  return grouping;
}

}  // namespace fixdetect::causal
