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

#include "fixdetect/types.hpp"

#include <utility>

#include "fixdetect/error.hpp"

namespace fixdetect {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyPopulation: return "EmptyPopulation";
    case ErrorCode::MixedPopulation: return "MixedPopulation";
    case ErrorCode::InsufficientRuns: return "InsufficientRuns";
    case ErrorCode::UndefinedRatio: return "UndefinedRatio";
    case ErrorCode::UnsupportedMeasure: return "UnsupportedMeasure";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

MethodId::MethodId(std::string name) : name_(std::move(name)) {
  if (name_.empty()) {
    throw Error(ErrorCode::InvalidParameter, "method id must be non-empty");
  }
}

bool same_failure(const FailureSignature& a, const FailureSignature& b, IdentityMode mode) {
  if (a.test_id != b.test_id || a.top_method != b.top_method) return false;
  return mode == IdentityMode::TestMethodScoped || a.trace_hash == b.trace_hash;
}

void TestRunReport::validate() const {
  if (timestamp < 0) {
    throw Error(ErrorCode::ParseError, "timestamp must be non-negative");
  }
  const bool failed = outcome == Outcome::Fail;
  if (failed != failure_signature.has_value()) {
    throw Error(ErrorCode::ParseError,
                failed ? "failing run lacks failure_signature"
                       : "passing run carries failure_signature");
  }
  if (failure_signature && failure_signature->test_id != test_id) {
    throw Error(ErrorCode::ParseError, "failure_signature.test_id differs from run test_id");
  }
}

void PatchIntervention::validate() const {
  if (baseline_version == updated_version) {
    throw Error(ErrorCode::InvalidParameter, "baseline_version equals updated_version");
  }
  if (patched_methods.empty()) {
    throw Error(ErrorCode::InvalidParameter, "patched_methods is empty");
  }
}

ProbabilityEstimate::ProbabilityEstimate(std::uint64_t n_failures, std::uint64_t n_runs)
    : n_failures_(n_failures), n_runs_(n_runs) {
  if (n_runs_ == 0) {
    throw Error(ErrorCode::EmptyPopulation, "probability estimate needs at least one run");
  }
  if (n_failures_ > n_runs_) {
    throw Error(ErrorCode::InvariantViolation, "more failures than runs");
  }
  p_ = static_cast<double>(n_failures_) / static_cast<double>(n_runs_);
}

}  // namespace fixdetect
