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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "fixdetect/causal.hpp"
#include "fixdetect/changepoint.hpp"
#include "fixdetect/json_io.hpp"
#include "fixdetect/sim.hpp"

namespace fixdetect::eval {

/// Standard IR scores. Empty denominators make precision and recall
/// vacuously 1; accuracy (and tn) are only known when the full grid of
/// instances is.
struct IrScores {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  std::optional<double> accuracy;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::optional<std::uint64_t> tn;
};

IrScores ir_scores(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn,
                   std::optional<std::uint64_t> tn = std::nullopt);

using GroupingTruth = std::map<FailureSignature, std::set<MethodId>>;

/// Every (signature, method) pair is one classification instance. With a
/// candidate method universe, tn counts the remaining cells of the
/// signature x method grid.
IrScores score_grouping(const causal::FailureGrouping& predicted, const GroupingTruth& truth,
                        const std::optional<std::set<MethodId>>& candidate_methods = std::nullopt);

struct MatchedEvent {
  sim::GroundTruthEvent truth;
  cpd::ChangeEvent detected;
  std::int64_t index_delta = 0;  // detected.index - truth.at_bucket
};

struct DetectionScore {
  std::vector<MatchedEvent> matched;
  std::vector<sim::GroundTruthEvent> misses;
  std::vector<cpd::ChangeEvent> spurious;
  double mean_abs_delta = 0.0;

  IrScores ir() const { return ir_scores(matched.size(), spurious.size(), misses.size()); }
};

bool kinds_agree(cpd::ChangeKind detected, sim::TruthKind truth);

/// Greedy one-to-one matching by ascending |index delta|; pairs must agree
/// on kind and lie within the tolerance.
DetectionScore score_detection(std::span<const cpd::ChangeEvent> events,
                               std::span<const sim::GroundTruthEvent> truth,
                               std::size_t match_tolerance);

struct BenchResult {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::vector<cpd::ChangeEvent> events;
};

/// n points around 0.6 then around 0.1 from the midpoint on, Gaussian noise
/// with sigma 0.05.
std::vector<double> bench_series(std::size_t n, std::uint64_t seed);

/// Times detect_all (single-threaded) on bench_series(n, seed).
BenchResult bench_detect(std::size_t n, const cpd::CpdConfig& config, std::uint64_t seed);

GroupingTruth grouping_truth_from_json(const Json& j, const std::string& path, bool strict = true);

Json to_json(const IrScores& scores);
Json to_json(const DetectionScore& score);
Json to_json(const BenchResult& result);

}  // namespace fixdetect::eval
