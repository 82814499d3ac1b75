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

#include "fixdetect/pipeline.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "fixdetect/error.hpp"
#include "fixdetect/formats.hpp"

namespace fixdetect::pipeline {

std::string_view to_string(IdentityMode mode) {
  return mode == IdentityMode::TraceScoped ? "trace_scoped" : "test_method_scoped";
}

std::optional<IdentityMode> parse_identity(std::string_view text) {
  if (text == "trace_scoped") return IdentityMode::TraceScoped;
  if (text == "test_method_scoped") return IdentityMode::TestMethodScoped;
  return std::nullopt;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Fixed: return "fixed";
    case Verdict::Improved: return "improved";
    case Verdict::Regressed: return "regressed";
    case Verdict::Unchanged: return "unchanged";
    case Verdict::InsufficientData: return "insufficient_data";
  }
  return "unknown";
}

void PipelineConfig::validate() const {
  grouping.validate();
  cpd.validate();
  if (bucket_width <= 0) throw Error(ErrorCode::InvalidParameter, "bucket_width_ms must be positive");
  if (min_runs_per_bucket < 1) throw Error(ErrorCode::InvalidParameter, "min_runs_per_bucket must be at least 1");
  if (!std::isfinite(fixed_mean_ceiling)) {
    throw Error(ErrorCode::InvalidParameter, "fixed_mean_ceiling must be finite");
  }
}

PipelineConfig pipeline_config_from_json(const Json& j, bool strict, PipelineConfig base) {
  FieldReader r(j, "", strict);
  if (const Json* g = r.optional_child("grouping")) merge_from_json(base.grouping, *g, "grouping", strict);
  if (const Json* c = r.optional_child("cpd")) merge_from_json(base.cpd, *c, "cpd", strict);
  if (r.has("bucket_width_ms")) base.bucket_width = r.int64("bucket_width_ms");
  if (r.has("min_runs_per_bucket")) base.min_runs_per_bucket = r.uint64("min_runs_per_bucket");
  if (r.has("identity_mode")) {
    auto mode = parse_identity(r.string("identity_mode"));
    if (!mode) r.fail("identity_mode", "expected \"trace_scoped\" or \"test_method_scoped\"");
    base.identity_mode = *mode;
  }
  if (r.has("fixed_mean_ceiling")) base.fixed_mean_ceiling = r.number("fixed_mean_ceiling");
  r.finish();
  return base;
}

Json to_json(const PipelineConfig& config) {
  Json j;
  j["grouping"] = fixdetect::to_json(config.grouping);
  j["cpd"] = fixdetect::to_json(config.cpd);
  j["bucket_width_ms"] = config.bucket_width;
  j["min_runs_per_bucket"] = config.min_runs_per_bucket;
  j["identity_mode"] = to_string(config.identity_mode);
  j["fixed_mean_ceiling"] = config.fixed_mean_ceiling;
  return j;
}

Verdict verdict_for(std::span<const cpd::ChangeEvent> events, std::optional<double> tail_mean,
                    double fixed_mean_ceiling) {
  if (events.empty()) return Verdict::Unchanged;
  if (events.back().kind == cpd::ChangeKind::Bug) return Verdict::Regressed;
  if (tail_mean && *tail_mean < fixed_mean_ceiling) return Verdict::Fixed;
  return Verdict::Improved;
}

PipelineReport run_pipeline(std::span<const TestRunReport> runs, const PatchIntervention& patch,
                            const PipelineConfig& config) {
  config.validate();
  patch.validate();

  std::vector<TestRunReport> baseline;
  std::vector<TestRunReport> updated;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    if (run.version_id == patch.baseline_version) {
      baseline.push_back(run);
    } else if (run.version_id == patch.updated_version) {
      updated.push_back(run);
    } else {
      throw Error(ErrorCode::MixedPopulation, "run " + std::to_string(i) + " has version_id '" +
                                                  run.version_id + "', which the patch does not name");
    }
  }

  causal::GroupingConfig grouping_config = config.grouping;
  grouping_config.identity = config.identity_mode;
  const auto grouping = causal::group_failures(baseline, updated, patch, grouping_config);

  const series::BucketingOptions bucketing{config.bucket_width, config.min_runs_per_bucket,
                                           config.identity_mode};
  PipelineReport report;
  report.config = config;
  std::map<MethodId, std::vector<SignatureReport>> by_method;
  for (const auto& entry : grouping.entries) {
    if (entry.causes.empty()) {
      report.ungrouped.push_back(entry.signature);
      continue;
    }
    for (const auto& cause : entry.causes) {
      SignatureReport sr;
      sr.signature = entry.signature;
      sr.degree = cause.degree;
      try {
        const auto series = series::build_degree_series(baseline, updated, patch, entry.signature,
                                                        cause.method, bucketing);
        sr.series_length = series.size();
        sr.events = cpd::detect_all(series, config.cpd);
        const std::size_t tail_begin = sr.events.empty() ? 0 : sr.events.back().index;
        double sum = 0.0;
        for (std::size_t i = tail_begin; i < series.size(); ++i) sum += series.points[i].degree;
        sr.tail_mean = sum / static_cast<double>(series.size() - tail_begin);
        for (const auto& e : sr.events) sr.event_bucket_starts.push_back(series.points[e.index].bucket_start);
        sr.verdict = verdict_for(sr.events, sr.tail_mean, config.fixed_mean_ceiling);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptySeries) throw;
        sr.verdict = Verdict::InsufficientData;
      }
      by_method[cause.method].push_back(std::move(sr));
    }
  }
  for (auto& [method, signatures] : by_method) {
    report.methods.push_back({method, std::move(signatures)});
  }
  return report;
}

Json to_json(const PipelineReport& report) {
  Json j;
  j["config"] = to_json(report.config);
  Json methods = Json::array();
  for (const auto& m : report.methods) {
    Json mj;
    mj["method"] = m.method.name();
    Json signatures = Json::array();
    for (const auto& s : m.signatures) {
      Json sj;
      sj["signature"] = fixdetect::to_json(s.signature);
      const Json degree = fixdetect::to_json(s.degree);
      sj["degree"] = degree["degree"];
      sj["measure"] = degree["measure"];
      sj["series_length"] = s.series_length;
      Json events = Json::array();
      for (std::size_t i = 0; i < s.events.size(); ++i) {
        Json ej = fixdetect::to_json(s.events[i]);
        ej["bucket_start"] = s.event_bucket_starts[i];
        events.push_back(std::move(ej));
      }
      sj["events"] = std::move(events);
      sj["tail_mean"] = s.tail_mean ? Json(*s.tail_mean) : Json(nullptr);
      sj["verdict"] = to_string(s.verdict);
      signatures.push_back(std::move(sj));
    }
    mj["signatures"] = std::move(signatures);
    methods.push_back(std::move(mj));
  }
  j["methods"] = std::move(methods);
  Json ungrouped = Json::array();
  for (const auto& s : report.ungrouped) ungrouped.push_back(fixdetect::to_json(s));
  j["ungrouped"] = std::move(ungrouped);
  return j;
}

}  // namespace fixdetect::pipeline
