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

#include "fixdetect/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <tuple>

#include "fixdetect/formats.hpp"

namespace fixdetect::eval {

IrScores ir_scores(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn,
                   std::optional<std::uint64_t> tn) {
  IrScores s;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  s.tn = tn;
  s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  if (tn) {
    const std::uint64_t total = tp + fp + fn + *tn;
    s.accuracy = total > 0 ? static_cast<double>(tp + *tn) / static_cast<double>(total) : 1.0;
  }
  return s;
}

IrScores score_grouping(const causal::FailureGrouping& predicted, const GroupingTruth& truth,
                        const std::optional<std::set<MethodId>>& candidate_methods) {
  using Pair = std::pair<FailureSignature, MethodId>;
  std::set<Pair> predicted_pairs;
  std::set<FailureSignature> signatures;
  std::set<MethodId> methods = candidate_methods.value_or(std::set<MethodId>{});
  for (const auto& entry : predicted.entries) {
    signatures.insert(entry.signature);
    for (const auto& cause : entry.causes) {
      predicted_pairs.emplace(entry.signature, cause.method);
      methods.insert(cause.method);
    }
  }
  std::set<Pair> truth_pairs;
  for (const auto& [signature, causes] : truth) {
    signatures.insert(signature);
    for (const auto& method : causes) {
      truth_pairs.emplace(signature, method);
      methods.insert(method);
    }
  }

  std::uint64_t tp = 0;
  for (const auto& pair : predicted_pairs) tp += truth_pairs.contains(pair) ? 1 : 0;
  const std::uint64_t fp = predicted_pairs.size() - tp;
  const std::uint64_t fn = truth_pairs.size() - tp;
  std::optional<std::uint64_t> tn;
  if (candidate_methods) tn = signatures.size() * methods.size() - (tp + fp + fn);
  return ir_scores(tp, fp, fn, tn);
}

bool kinds_agree(cpd::ChangeKind detected, sim::TruthKind truth) {
  return (detected == cpd::ChangeKind::Fix) == (truth == sim::TruthKind::FixIntroduced);
}

DetectionScore score_detection(std::span<const cpd::ChangeEvent> events,
                               std::span<const sim::GroundTruthEvent> truth,
                               std::size_t match_tolerance) {
  struct Candidate {
    std::int64_t abs_delta;
    std::size_t truth_index;
    std::size_t event_index;
  };
  std::vector<Candidate> candidates;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    for (std::size_t e = 0; e < events.size(); ++e) {
      if (!kinds_agree(events[e].kind, truth[t].kind)) continue;
      const auto delta = static_cast<std::int64_t>(events[e].index) -
                         static_cast<std::int64_t>(truth[t].at_bucket);
      if (static_cast<std::size_t>(std::llabs(delta)) > match_tolerance) continue;
      candidates.push_back({std::llabs(delta), t, e});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.abs_delta, a.truth_index, a.event_index) <
           std::tie(b.abs_delta, b.truth_index, b.event_index);
  });

  std::vector<bool> truth_used(truth.size(), false);
  std::vector<bool> event_used(events.size(), false);
  DetectionScore score;
  double total_delta = 0.0;
  for (const auto& c : candidates) {
    if (truth_used[c.truth_index] || event_used[c.event_index]) continue;
    truth_used[c.truth_index] = true;
    event_used[c.event_index] = true;
    const auto& e = events[c.event_index];
    const auto& t = truth[c.truth_index];
    score.matched.push_back({t, e, static_cast<std::int64_t>(e.index) - static_cast<std::int64_t>(t.at_bucket)});
    total_delta += static_cast<double>(c.abs_delta);
  }
  std::sort(score.matched.begin(), score.matched.end(), [](const MatchedEvent& a, const MatchedEvent& b) {
    return a.truth.at_bucket < b.truth.at_bucket;
  });
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (!truth_used[t]) score.misses.push_back(truth[t]);
  }
  for (std::size_t e = 0; e < events.size(); ++e) {
    if (!event_used[e]) score.spurious.push_back(events[e]);
  }
  if (!score.matched.empty()) score.mean_abs_delta = total_delta / static_cast<double>(score.matched.size());
  return score;
}

std::vector<double> bench_series(std::size_t n, std::uint64_t seed) {
  sim::Rng rng(sim::stream_seed(seed, {n}));
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double level = i < n / 2 ? 0.6 : 0.1;
    values[i] = std::clamp(level + 0.05 * rng.normal(), -1.0, 1.0);
  }
  return values;
}

BenchResult bench_detect(std::size_t n, const cpd::CpdConfig& config, std::uint64_t seed) {
  const auto values = bench_series(n, seed);
  BenchResult result;
  result.n = n;
  result.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  result.events = cpd::detect_all(values, config);
  const auto stop = std::chrono::steady_clock::now();
  result.wall_time_s = std::chrono::duration<double>(stop - start).count();
  return result;
}

GroupingTruth grouping_truth_from_json(const Json& j, const std::string& path, bool strict) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, path + ": expected an array");
  GroupingTruth truth;
  for (std::size_t i = 0; i < j.size(); ++i) {
    FieldReader r(j[i], path + "[" + std::to_string(i) + "]", strict);
    const auto signature = signature_from_json(r.child("signature"), r.path_of("signature"), strict);
    const Json& methods = r.child("methods");
    if (!methods.is_array()) r.fail("methods", "expected an array");
    auto& set = truth[signature];
    for (std::size_t m = 0; m < methods.size(); ++m) {
      set.insert(method_from_json(methods[m], r.path_of("methods") + "[" + std::to_string(m) + "]"));
    }
    r.finish();
  }
  return truth;
}

Json to_json(const IrScores& s) {
  Json j;
  j["precision"] = s.precision;
  j["recall"] = s.recall;
  j["f1"] = s.f1;
  j["accuracy"] = s.accuracy ? Json(*s.accuracy) : Json(nullptr);
  j["tp"] = s.tp;
  j["fp"] = s.fp;
  j["fn"] = s.fn;
  j["tn"] = s.tn ? Json(*s.tn) : Json(nullptr);
  return j;
}

Json to_json(const DetectionScore& score) {
  Json j;
  Json matched = Json::array();
  for (const auto& m : score.matched) {
    Json mj;
    mj["truth"] = sim::to_json(m.truth);
    mj["detected"] = fixdetect::to_json(m.detected);
    mj["index_delta"] = m.index_delta;
    matched.push_back(std::move(mj));
  }
  j["matched"] = std::move(matched);
  Json misses = Json::array();
  for (const auto& t : score.misses) misses.push_back(sim::to_json(t));
  j["misses"] = std::move(misses);
  Json spurious = Json::array();
  for (const auto& e : score.spurious) spurious.push_back(fixdetect::to_json(e));
  j["spurious"] = std::move(spurious);
  j["mean_abs_delta"] = score.mean_abs_delta;
  j["scores"] = to_json(score.ir());
  return j;
}

Json to_json(const BenchResult& result) {
  Json j;
  j["n"] = result.n;
  j["seed"] = result.seed;
  j["wall_time_s"] = result.wall_time_s;
  Json events = Json::array();
  for (const auto& e : result.events) events.push_back(fixdetect::to_json(e));
  j["events"] = std::move(events);
  return j;
}

}  // namespace fixdetect::eval
