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

#include "fixdetect/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "fixdetect/error.hpp"

namespace fixdetect::sim {
namespace {

__extension__ typedef unsigned __int128 Uint128;

constexpr std::uint64_t kBaselineStream = 0;
constexpr std::uint64_t kUpdatedStream = 1;
constexpr std::uint64_t kShuffleStream = 0x5348554646ULL;

std::string indexed(std::string_view field, std::size_t i) {
  return std::string(field) + "[" + std::to_string(i) + "]";
}

[[noreturn]] void invalid(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::InvalidScenario, path + ": " + message);
}

bool is_rate(double r) { return r >= 0.0 && r <= 1.0; }

}  // namespace

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::bounded(std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<Uint128>(engine_()) * bound) >> 64);
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t part : parts) h = splitmix64(h ^ splitmix64(part));
  return h;
}

std::set<MethodId> TestSpec::true_causes() const {
  if (causes) return *causes;
  if (updated_fail_rate > baseline_fail_rate) return {signature.top_method};
  return {};
}

std::string_view to_string(TruthKind kind) {
  return kind == TruthKind::FixIntroduced ? "fix_introduced" : "bug_introduced";
}

void Scenario::validate() const {
  if (duration < 1) invalid("duration", "must be at least 1");
  if (bucket_width <= 0) invalid("bucket_width_ms", "must be positive");
  if (runs_per_bucket_per_version < 1) invalid("runs_per_bucket_per_version", "must be at least 1");
  if (start_ms < 0) invalid("start_ms", "must be non-negative");
  if (baseline_version.empty()) invalid("baseline_version", "must be non-empty");
  if (updated_version.empty()) invalid("updated_version", "must be non-empty");
  if (baseline_version == updated_version) invalid("updated_version", "must differ from baseline_version");
  if (tests.empty()) invalid("tests", "must list at least one test");

  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const auto& t = tests[i];
    const std::string path = indexed("tests", i);
    if (t.test_id.empty()) invalid(path + ".test_id", "must be non-empty");
    if (!ids.insert(t.test_id).second) invalid(path + ".test_id", "duplicate test id '" + t.test_id + "'");
    if (t.signature.test_id != t.test_id) invalid(path + ".signature.test_id", "must equal test_id");
    if (t.signature.top_method.empty()) invalid(path + ".signature.top_method", "must be non-empty");
    if (!is_rate(t.baseline_fail_rate)) invalid(path + ".baseline_fail_rate", "must lie in [0, 1]");
    if (!is_rate(t.updated_fail_rate)) invalid(path + ".updated_fail_rate", "must lie in [0, 1]");
    if (!(t.flaky_noise >= 0.0 && t.flaky_noise <= 0.5)) invalid(path + ".flaky_noise", "must lie in [0, 0.5]");
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const std::string path = indexed("events", i);
    if (e.at_bucket >= duration) {
      invalid(path + ".at_bucket", "must be below duration " + std::to_string(duration));
    }
    if (!ids.contains(e.affected_test)) invalid(path + ".affected_test", "unknown test '" + e.affected_test + "'");
    if (!is_rate(e.new_updated_fail_rate)) invalid(path + ".new_updated_fail_rate", "must lie in [0, 1]");
  }
  std::unordered_set<std::string> cluster_ids;
  bool any_patched = false;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& c = clusters[i];
    const std::string path = indexed("clusters", i);
    if (c.cluster_id.empty()) invalid(path + ".cluster_id", "must be non-empty");
    if (!cluster_ids.insert(c.cluster_id).second) invalid(path + ".cluster_id", "duplicate cluster id");
    any_patched = any_patched || c.receives_patch;
  }
  if (!clusters.empty() && !events.empty() && !any_patched) {
    invalid("clusters", "at least one cluster must receive the patch when events exist");
  }
  if (patch().patched_methods.empty()) {
    invalid("patched_methods", "required when no test has a true cause");
  }
}

PatchIntervention Scenario::patch() const {
  PatchIntervention p{baseline_version, updated_version, patched_methods};
  if (p.patched_methods.empty()) {
    for (const auto& t : tests) {
      const auto causes = t.true_causes();
      p.patched_methods.insert(causes.begin(), causes.end());
    }
  }
  return p;
}

std::map<FailureSignature, std::set<MethodId>> Scenario::grouping_truth() const {
  std::map<FailureSignature, std::set<MethodId>> truth;
  for (const auto& t : tests) {
    auto causes = t.true_causes();
    if (!causes.empty()) truth[t.signature] = std::move(causes);
  }
  return truth;
}

SimulationResult simulate(const Scenario& scenario) {
  scenario.validate();

  SimulationResult result;
  result.truth = scenario.events;
  std::stable_sort(result.truth.begin(), result.truth.end(),
                   [](const GroundTruthEvent& a, const GroundTruthEvent& b) { return a.at_bucket < b.at_bucket; });

  struct Population {
    std::optional<std::string> cluster_id;
    bool patched;
  };
  std::vector<Population> populations;
  if (scenario.clusters.empty()) {
    populations = {{std::nullopt, false}, {std::nullopt, true}};
  } else {
    for (const auto& c : scenario.clusters) populations.push_back({c.cluster_id, c.receives_patch});
  }

  const std::size_t runs = scenario.runs_per_bucket_per_version;
  result.runs.reserve(scenario.duration * populations.size() * scenario.tests.size() * runs);

  for (const auto& test : scenario.tests) {
    const std::uint64_t test_key = fnv1a64(test.test_id);
    double updated_rate = test.updated_fail_rate;
    auto next_event = result.truth.begin();
    for (std::size_t bucket = 0; bucket < scenario.duration; ++bucket) {
      for (; next_event != result.truth.end() && next_event->at_bucket <= bucket; ++next_event) {
        if (next_event->affected_test == test.test_id) updated_rate = next_event->new_updated_fail_rate;
      }
      const std::int64_t bucket_start =
          scenario.start_ms + static_cast<std::int64_t>(bucket) * scenario.bucket_width;
      for (const auto& pop : populations) {
        const std::uint64_t cluster_key = pop.cluster_id ? fnv1a64(*pop.cluster_id) : 0;
        Rng rng(stream_seed(scenario.seed, {bucket, cluster_key, test_key,
                                            pop.patched ? kUpdatedStream : kBaselineStream}));
        const double base_rate = pop.patched ? updated_rate : test.baseline_fail_rate;
        const double jitter = test.flaky_noise * (2.0 * rng.uniform() - 1.0);
        const double rate = std::clamp(base_rate + jitter, 0.0, 1.0);
        const std::string& version = pop.patched ? scenario.updated_version : scenario.baseline_version;
        for (std::size_t j = 0; j < runs; ++j) {
          TestRunReport run;
          run.timestamp = bucket_start + static_cast<std::int64_t>(j) * scenario.bucket_width /
                                             static_cast<std::int64_t>(runs);
          run.version_id = version;
          run.cluster_id = pop.cluster_id;
          run.test_id = test.test_id;
          if (rng.uniform() < rate) {
            run.outcome = Outcome::Fail;
            run.failure_signature = test.signature;
          }
          result.runs.push_back(std::move(run));
        }
      }
    }
  }

  Rng shuffler(stream_seed(scenario.seed, {kShuffleStream}));
  for (std::size_t i = result.runs.size(); i > 1; --i) {
    std::swap(result.runs[i - 1], result.runs[shuffler.bounded(i)]);
  }
  return result;
}

Scenario scenario_from_json(const Json& j, bool strict) {
  constexpr ErrorCode code = ErrorCode::InvalidScenario;
  FieldReader r(j, "", strict, code);
  Scenario s;
  s.seed = r.uint64("seed");
  s.duration = r.uint64("duration");
  if (r.has("bucket_width_ms")) s.bucket_width = r.int64("bucket_width_ms");
  s.runs_per_bucket_per_version = r.uint64("runs_per_bucket_per_version");
  if (r.has("start_ms")) s.start_ms = r.int64("start_ms");
  if (auto v = r.optional_string("baseline_version")) s.baseline_version = *v;
  if (auto v = r.optional_string("updated_version")) s.updated_version = *v;
  if (const Json* methods = r.optional_child("patched_methods")) {
    if (!methods->is_array()) r.fail("patched_methods", "expected an array");
    for (std::size_t i = 0; i < methods->size(); ++i) {
      s.patched_methods.insert(method_from_json((*methods)[i], indexed("patched_methods", i), code));
    }
  }

  const Json& tests = r.child("tests");
  if (!tests.is_array()) r.fail("tests", "expected an array");
  for (std::size_t i = 0; i < tests.size(); ++i) {
    FieldReader tr(tests[i], indexed("tests", i), strict, code);
    TestSpec t;
    t.test_id = tr.string("test_id");
    t.signature = signature_from_json(tr.child("signature"), tr.path_of("signature"), strict, code);
    t.baseline_fail_rate = tr.number("baseline_fail_rate");
    t.updated_fail_rate = tr.number("updated_fail_rate");
    if (tr.has("flaky_noise")) t.flaky_noise = tr.number("flaky_noise");
    if (const Json* causes = tr.optional_child("causes")) {
      if (!causes->is_array()) tr.fail("causes", "expected an array");
      t.causes.emplace();
      for (std::size_t c = 0; c < causes->size(); ++c) {
        t.causes->insert(method_from_json((*causes)[c], tr.path_of("causes") + "[" + std::to_string(c) + "]", code));
      }
    }
    tr.finish();
    s.tests.push_back(std::move(t));
  }

  if (const Json* events = r.optional_child("events")) {
    if (!events->is_array()) r.fail("events", "expected an array");
    for (std::size_t i = 0; i < events->size(); ++i) {
      try {
        s.events.push_back(truth_event_from_json((*events)[i], indexed("events", i), strict));
      } catch (const Error& e) {
        throw Error(code, e.what());
      }
    }
  }
  if (const Json* clusters = r.optional_child("clusters")) {
    if (!clusters->is_array()) r.fail("clusters", "expected an array");
    for (std::size_t i = 0; i < clusters->size(); ++i) {
      FieldReader cr((*clusters)[i], indexed("clusters", i), strict, code);
      ClusterSpec c;
      c.cluster_id = cr.string("cluster_id");
      c.receives_patch = cr.boolean("receives_patch");
      cr.finish();
      s.clusters.push_back(std::move(c));
    }
  }
  r.finish();
  s.validate();
  return s;
}

Json to_json(const GroundTruthEvent& event) {
  Json j;
  j["at_bucket"] = event.at_bucket;
  j["kind"] = to_string(event.kind);
  j["affected_test"] = event.affected_test;
  j["new_updated_fail_rate"] = event.new_updated_fail_rate;
  return j;
}

GroundTruthEvent truth_event_from_json(const Json& j, const std::string& path, bool strict) {
  FieldReader r(j, path, strict);
  GroundTruthEvent e;
  e.at_bucket = r.uint64("at_bucket");
  const std::string kind = r.string("kind");
  if (kind == "fix_introduced") {
    e.kind = TruthKind::FixIntroduced;
  } else if (kind == "bug_introduced") {
    e.kind = TruthKind::BugIntroduced;
  } else {
    r.fail("kind", "expected \"fix_introduced\" or \"bug_introduced\"");
  }
  e.affected_test = r.string("affected_test");
  e.new_updated_fail_rate = r.number("new_updated_fail_rate");
  r.finish();
  return e;
}

Json to_json(const Scenario& s) {
  Json j;
  j["seed"] = s.seed;
  j["duration"] = s.duration;
  j["bucket_width_ms"] = s.bucket_width;
  j["runs_per_bucket_per_version"] = s.runs_per_bucket_per_version;
  j["start_ms"] = s.start_ms;
  j["baseline_version"] = s.baseline_version;
  j["updated_version"] = s.updated_version;
  Json methods = Json::array();
  for (const auto& m : s.patched_methods) methods.push_back(m.name());
  j["patched_methods"] = std::move(methods);
  Json tests = Json::array();
  for (const auto& t : s.tests) {
    Json tj;
    tj["test_id"] = t.test_id;
    tj["signature"] = fixdetect::to_json(t.signature);
    tj["baseline_fail_rate"] = t.baseline_fail_rate;
    tj["updated_fail_rate"] = t.updated_fail_rate;
    tj["flaky_noise"] = t.flaky_noise;
    if (t.causes) {
      Json causes = Json::array();
      for (const auto& m : *t.causes) causes.push_back(m.name());
      tj["causes"] = std::move(causes);
    }
    tests.push_back(std::move(tj));
  }
  j["tests"] = std::move(tests);
  Json events = Json::array();
  for (const auto& e : s.events) events.push_back(to_json(e));
  j["events"] = std::move(events);
  Json clusters = Json::array();
  for (const auto& c : s.clusters) {
    clusters.push_back(Json{{"cluster_id", c.cluster_id}, {"receives_patch", c.receives_patch}});
  }
  j["clusters"] = std::move(clusters);
  return j;
}

Json truth_to_json(const Scenario& scenario, const std::vector<GroundTruthEvent>& events) {
  Json j;
  Json ev = Json::array();
  for (const auto& e : events) ev.push_back(to_json(e));
  j["events"] = std::move(ev);
  Json grouping = Json::array();
  for (const auto& [signature, methods] : scenario.grouping_truth()) {
    Json entry;
    entry["signature"] = fixdetect::to_json(signature);
    Json ms = Json::array();
    for (const auto& m : methods) ms.push_back(m.name());
    entry["methods"] = std::move(ms);
    grouping.push_back(std::move(entry));
  }
  j["grouping"] = std::move(grouping);
  j["patch"] = fixdetect::to_json(scenario.patch());
  return j;
}

}  // namespace fixdetect::sim
