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

#include "fixdetect/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fixdetect {

FieldReader::FieldReader(const Json& object, std::string path, bool strict, ErrorCode code)
    : object_(object), path_(std::move(path)), strict_(strict), code_(code) {
  if (!object_.is_object()) {
    throw Error(code_, (path_.empty() ? std::string("<root>") : path_) + ": expected an object");
  }
}

std::string FieldReader::path_of(std::string_view key) const {
  if (path_.empty()) return std::string(key);
  return path_ + "." + std::string(key);
}

void FieldReader::fail(std::string_view key, const std::string& message) const {
  throw Error(code_, path_of(key) + ": " + message);
}

bool FieldReader::has(std::string_view key) const {
  seen_.emplace_back(key);
  auto it = object_.find(std::string(key));
  return it != object_.end() && !it->is_null();
}

const Json& FieldReader::child(std::string_view key) {
  const Json* found = optional_child(key);
  if (found == nullptr) fail(key, "missing required field");
  return *found;
}

const Json* FieldReader::optional_child(std::string_view key) {
  seen_.emplace_back(key);
  auto it = object_.find(std::string(key));
  if (it == object_.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string FieldReader::string(std::string_view key) {
  const Json& v = child(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::optional<std::string> FieldReader::optional_string(std::string_view key) {
  const Json* v = optional_child(key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_string()) fail(key, "expected a string");
  return v->get<std::string>();
}

std::int64_t FieldReader::int64(std::string_view key) {
  const Json& v = child(key);
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) fail(key, "integer out of range");
    return static_cast<std::int64_t>(u);
  }
  if (!v.is_number_integer()) fail(key, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t FieldReader::uint64(std::string_view key) {
  const Json& v = child(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) fail(key, "expected a non-negative integer");
  fail(key, "expected an integer");
}

double FieldReader::number(std::string_view key) {
  const Json& v = child(key);
  if (!v.is_number()) fail(key, "expected a number");
  return v.get<double>();
}

bool FieldReader::boolean(std::string_view key) {
  const Json& v = child(key);
  if (!v.is_boolean()) fail(key, "expected a boolean");
  return v.get<bool>();
}

void FieldReader::finish() const {
  if (!strict_) return;
  for (const auto& [key, value] : object_.items()) {
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
      throw Error(code_, path_of(key) + ": unknown field");
    }
  }
}

std::string_view to_string(Outcome outcome) {
  return outcome == Outcome::Fail ? "fail" : "pass";
}

Json to_json(const MethodId& method) { return method.name(); }

Json to_json(const FailureSignature& signature) {
  Json j;
  j["test_id"] = signature.test_id;
  j["top_method"] = signature.top_method.name();
  j["trace_hash"] = signature.trace_hash;
  return j;
}

Json to_json(const TestRunReport& run) {
  Json j;
  j["timestamp"] = run.timestamp;
  j["version_id"] = run.version_id;
  if (run.cluster_id) j["cluster_id"] = *run.cluster_id;
  j["test_id"] = run.test_id;
  j["outcome"] = to_string(run.outcome);
  if (run.failure_signature) j["failure_signature"] = to_json(*run.failure_signature);
  return j;
}

Json to_json(const PatchIntervention& patch) {
  Json j;
  j["baseline_version"] = patch.baseline_version;
  j["updated_version"] = patch.updated_version;
  Json methods = Json::array();
  for (const auto& m : patch.patched_methods) methods.push_back(m.name());
  j["patched_methods"] = std::move(methods);
  return j;
}

Json to_json(const ProbabilityEstimate& estimate) {
  Json j;
  j["p"] = estimate.p();
  j["n_runs"] = estimate.n_runs();
  j["n_failures"] = estimate.n_failures();
  return j;
}

MethodId method_from_json(const Json& j, const std::string& path, ErrorCode code) {
  if (!j.is_string() || j.get_ref<const std::string&>().empty()) {
    throw Error(code, path + ": expected a non-empty method name");
  }
  return MethodId(j.get<std::string>());
}

FailureSignature signature_from_json(const Json& j, const std::string& path, bool strict,
                                     ErrorCode code) {
  FieldReader r(j, path, strict, code);
  FailureSignature s;
  s.test_id = r.string("test_id");
  s.top_method = method_from_json(r.child("top_method"), r.path_of("top_method"), code);
  s.trace_hash = r.uint64("trace_hash");
  r.finish();
  return s;
}

TestRunReport run_from_json(const Json& j, const std::string& path, bool strict) {
  FieldReader r(j, path, strict);
  TestRunReport run;
  run.timestamp = r.int64("timestamp");
  run.version_id = r.string("version_id");
  run.cluster_id = r.optional_string("cluster_id");
  run.test_id = r.string("test_id");
  const std::string outcome = r.string("outcome");
  if (outcome == "pass") {
    run.outcome = Outcome::Pass;
  } else if (outcome == "fail") {
    run.outcome = Outcome::Fail;
  } else {
    r.fail("outcome", "expected \"pass\" or \"fail\"");
  }
  if (const Json* sig = r.optional_child("failure_signature")) {
    run.failure_signature = signature_from_json(*sig, r.path_of("failure_signature"), strict);
  }
  r.finish();
  try {
    run.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, (path.empty() ? "" : path + ": ") + e.what());
  }
  return run;
}

PatchIntervention patch_from_json(const Json& j, const std::string& path, bool strict) {
  FieldReader r(j, path, strict);
  PatchIntervention patch;
  patch.baseline_version = r.string("baseline_version");
  patch.updated_version = r.string("updated_version");
  const Json& methods = r.child("patched_methods");
  if (!methods.is_array()) r.fail("patched_methods", "expected an array");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    patch.patched_methods.insert(
        method_from_json(methods[i], r.path_of("patched_methods") + "[" + std::to_string(i) + "]"));
  }
  r.finish();
  try {
    patch.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, (path.empty() ? "" : path + ": ") + e.what());
  }
  return patch;
}

ProbabilityEstimate estimate_from_json(const Json& j, const std::string& path, bool strict) {
  FieldReader r(j, path, strict);
  const double p = r.number("p");
  const auto n_runs = r.uint64("n_runs");
  const auto n_failures = r.uint64("n_failures");
  r.finish();
  if (n_runs == 0 || n_failures > n_runs) {
    throw Error(ErrorCode::ParseError, r.path_of("n_failures") + ": counts out of range");
  }
  ProbabilityEstimate estimate(n_failures, n_runs);
  if (estimate.p() != p) {
    throw Error(ErrorCode::ParseError, r.path_of("p") + ": disagrees with n_failures / n_runs");
  }
  return estimate;
}

std::vector<TestRunReport> read_runs_jsonl(std::istream& in, bool strict) {
  std::vector<TestRunReport> runs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::ParseError, where + ": invalid JSON");
    }
    runs.push_back(run_from_json(j, where, strict));
  }
  return runs;
}

void write_runs_jsonl(std::ostream& out, std::span<const TestRunReport> runs) {
  for (const auto& run : runs) {
    out << to_json(run).dump() << '\n';
  }
}

std::vector<TestRunReport> read_runs_file(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return read_runs_jsonl(in, strict);
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Json j = Json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::ParseError, path.string() + ": invalid JSON");
  return j;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorCode::ParseError, "failed writing " + path.string());
}

}  // namespace fixdetect
