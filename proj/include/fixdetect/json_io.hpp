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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fixdetect/error.hpp"
#include "fixdetect/types.hpp"

namespace fixdetect {

using Json = nlohmann::ordered_json;

/// Reads typed fields out of one JSON object while tracking which keys were
/// consumed, so that unknown fields can be rejected in strict mode. Every
/// error message carries the field path (e.g. "events[0].at_bucket").
class FieldReader {
 public:
  FieldReader(const Json& object, std::string path, bool strict,
              ErrorCode code = ErrorCode::ParseError);

  std::string path_of(std::string_view key) const;
  [[noreturn]] void fail(std::string_view key, const std::string& message) const;

  /// Present and non-null. Marks the key as known either way.
  bool has(std::string_view key) const;
  const Json& child(std::string_view key);
  const Json* optional_child(std::string_view key);

  std::string string(std::string_view key);
  std::int64_t int64(std::string_view key);
  std::uint64_t uint64(std::string_view key);
  double number(std::string_view key);
  bool boolean(std::string_view key);

  std::optional<std::string> optional_string(std::string_view key);

  /// Rejects keys that were never consumed (strict mode only).
  void finish() const;

  bool strict() const noexcept { return strict_; }
  ErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }

 private:
  const Json& object_;
  std::string path_;
  bool strict_;
  ErrorCode code_;
  mutable std::vector<std::string> seen_;
};

Json to_json(const MethodId& method);
Json to_json(const FailureSignature& signature);
Json to_json(const TestRunReport& run);
Json to_json(const PatchIntervention& patch);
Json to_json(const ProbabilityEstimate& estimate);

MethodId method_from_json(const Json& j, const std::string& path, ErrorCode code = ErrorCode::ParseError);
FailureSignature signature_from_json(const Json& j, const std::string& path, bool strict = true,
                                     ErrorCode code = ErrorCode::ParseError);
TestRunReport run_from_json(const Json& j, const std::string& path, bool strict = true);
PatchIntervention patch_from_json(const Json& j, const std::string& path, bool strict = true);
ProbabilityEstimate estimate_from_json(const Json& j, const std::string& path, bool strict = true);

std::string_view to_string(Outcome outcome);

/// One TestRunReport per line. Blank lines are skipped.
std::vector<TestRunReport> read_runs_jsonl(std::istream& in, bool strict = true);
void write_runs_jsonl(std::ostream& out, std::span<const TestRunReport> runs);

std::vector<TestRunReport> read_runs_file(const std::filesystem::path& path, bool strict = true);
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace fixdetect
