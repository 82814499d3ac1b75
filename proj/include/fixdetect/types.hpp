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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>

namespace fixdetect {

/// Fully qualified identifier of a method that can cause a failure.
class MethodId {
 public:
  MethodId() = default;
  explicit MethodId(std::string name);

  const std::string& name() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }

  friend bool operator==(const MethodId&, const MethodId&) = default;
  friend auto operator<=>(const MethodId&, const MethodId&) = default;

 private:
  std::string name_;
};

/// Identity of a failure: the failing test, the method on top of the stack,
/// and a hash of the full stack-trace method list.
struct FailureSignature {
  std::string test_id;
  MethodId top_method;
  std::uint64_t trace_hash = 0;

  friend bool operator==(const FailureSignature&, const FailureSignature&) = default;
  friend auto operator<=>(const FailureSignature&, const FailureSignature&) = default;
};

/// How two failure signatures are compared when counting failures.
enum class IdentityMode {
  TraceScoped,       // test_id, top_method and trace_hash must all agree
  TestMethodScoped,  // trace_hash is ignored
};

bool same_failure(const FailureSignature& a, const FailureSignature& b,
                  IdentityMode mode = IdentityMode::TraceScoped);

enum class Outcome { Pass, Fail };

/// One execution of one test on one code version.
struct TestRunReport {
  std::int64_t timestamp = 0;  // milliseconds since epoch
  std::string version_id;
  std::optional<std::string> cluster_id;
  std::string test_id;
  Outcome outcome = Outcome::Pass;
  std::optional<FailureSignature> failure_signature;

  friend bool operator==(const TestRunReport&, const TestRunReport&) = default;

  /// Throws Error(ParseError) when the outcome/signature pairing or the
  /// timestamp is inconsistent.
  void validate() const;
};

/// The patch C whose introduction is the intervention do(C).
struct PatchIntervention {
  std::string baseline_version;
  std::string updated_version;
  std::set<MethodId> patched_methods;

  friend bool operator==(const PatchIntervention&, const PatchIntervention&) = default;

  void validate() const;
};

/// Estimated interventional failure probability, kept as the exact count
/// pair it was derived from.
class ProbabilityEstimate {
 public:
  ProbabilityEstimate(std::uint64_t n_failures, std::uint64_t n_runs);

  double p() const noexcept { return p_; }
  std::uint64_t n_runs() const noexcept { return n_runs_; }
  std::uint64_t n_failures() const noexcept { return n_failures_; }

  friend bool operator==(const ProbabilityEstimate&, const ProbabilityEstimate&) = default;

 private:
  std::uint64_t n_failures_;
  std::uint64_t n_runs_;
  double p_;
};

}  // namespace fixdetect

template <>
struct std::hash<fixdetect::MethodId> {
  std::size_t operator()(const fixdetect::MethodId& m) const noexcept {
    return std::hash<std::string>{}(m.name());
  }
};

template <>
struct std::hash<fixdetect::FailureSignature> {
  std::size_t operator()(const fixdetect::FailureSignature& s) const noexcept {
    std::size_t h = std::hash<std::string>{}(s.test_id);
    h ^= std::hash<fixdetect::MethodId>{}(s.top_method) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::uint64_t>{}(s.trace_hash) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};
