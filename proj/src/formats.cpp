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

#include "fixdetect/formats.hpp"

#include <cmath>
#include <limits>

namespace fixdetect {
namespace {

// JSON has no infinity; an unbounded ratio degree is written as the string "inf".
Json degree_value(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double degree_value_from_json(FieldReader& r, std::string_view key) {
  const Json& v = r.child(key);
  if (v.is_string()) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    if (v == "-inf") return -std::numeric_limits<double>::infinity();
  }
  return r.number(key);
}

causal::MeasureKind measure_field(FieldReader& r, std::string_view key) {
  auto measure = causal::parse_measure(r.string(key));
  if (!measure) r.fail(key, "expected \"pearl\", \"difference\" or \"ratio\"");
  return *measure;
}

}  // namespace

Json to_json(const causal::CausalDegree& degree) {
  Json j;
  j["degree"] = degree_value(degree.value);
  j["measure"] = causal::to_string(degree.measure);
  return j;
}

Json to_json(const causal::FailureGrouping& grouping) {
  Json entries = Json::array();
  for (const auto& entry : grouping.entries) {
    Json e;
    e["signature"] = to_json(entry.signature);
    e["p_with"] = to_json(entry.p_with);
    e["p_without"] = to_json(entry.p_without);
    e["degree"] = degree_value(entry.degree.value);
    e["measure"] = causal::to_string(entry.degree.measure);
    Json causes = Json::array();
    for (const auto& cause : entry.causes) {
      Json c;
      c["method"] = cause.method.name();
      c["degree"] = degree_value(cause.degree.value);
      c["measure"] = causal::to_string(cause.degree.measure);
      causes.push_back(std::move(c));
    }
    e["causes"] = std::move(causes);
    entries.push_back(std::move(e));
  }
  Json j;
  j["entries"] = std::move(entries);
  return j;
}

causal::FailureGrouping grouping_from_json(const Json& j, bool strict) {
  FieldReader r(j, "", strict);
  const Json& entries = r.child("entries");
  if (!entries.is_array()) r.fail("entries", "expected an array");
  causal::FailureGrouping grouping;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    FieldReader er(entries[i], "entries[" + std::to_string(i) + "]", strict);
    const auto signature = signature_from_json(er.child("signature"), er.path_of("signature"), strict);
    // Probability fields are optional so hand-written predictions stay short.
    ProbabilityEstimate p_with(0, 1);
    ProbabilityEstimate p_without(0, 1);
    if (const Json* pw = er.optional_child("p_with")) p_with = estimate_from_json(*pw, er.path_of("p_with"), strict);
    if (const Json* po = er.optional_child("p_without")) p_without = estimate_from_json(*po, er.path_of("p_without"), strict);
    causal::CausalDegree degree;
    if (er.has("degree")) degree.value = degree_value_from_json(er, "degree");
    if (er.has("measure")) degree.measure = measure_field(er, "measure");
    causal::GroupingEntry entry{signature, p_with, p_without, degree, {}};
    const Json& causes = er.child("causes");
    if (!causes.is_array()) er.fail("causes", "expected an array");
    for (std::size_t c = 0; c < causes.size(); ++c) {
      FieldReader cr(causes[c], er.path_of("causes") + "[" + std::to_string(c) + "]", strict);
      causal::Cause cause;
      cause.method = method_from_json(cr.child("method"), cr.path_of("method"));
      cause.degree = degree;
      if (cr.has("degree")) cause.degree.value = degree_value_from_json(cr, "degree");
      if (cr.has("measure")) cause.degree.measure = measure_field(cr, "measure");
      cr.finish();
      entry.causes.push_back(std::move(cause));
    }
    er.finish();
    grouping.entries.push_back(std::move(entry));
  }
  r.finish();
  return grouping;
}

Json to_json(const series::DegreeSeries& s) {
  Json j;
  j["method"] = s.method.name();
  j["signature"] = to_json(s.signature);
  j["bucket_width_ms"] = s.bucket_width;
  Json points = Json::array();
  for (const auto& p : s.points) {
    Json pj;
    pj["t"] = p.bucket_start;
    pj["degree"] = p.degree;
    pj["n_runs"] = p.n_runs;
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  return j;
}

series::DegreeSeries series_from_json(const Json& j, bool strict) {
  FieldReader r(j, "", strict);
  series::DegreeSeries s;
  s.method = method_from_json(r.child("method"), "method");
  s.signature = signature_from_json(r.child("signature"), "signature", strict);
  s.bucket_width = r.int64("bucket_width_ms");
  const Json& points = r.child("points");
  if (!points.is_array()) r.fail("points", "expected an array");
  for (std::size_t i = 0; i < points.size(); ++i) {
    FieldReader pr(points[i], "points[" + std::to_string(i) + "]", strict);
    series::SeriesPoint p;
    p.bucket_start = pr.int64("t");
    p.degree = pr.number("degree");
    p.n_runs = pr.uint64("n_runs");
    pr.finish();
    s.points.push_back(p);
  }
  r.finish();
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return s;
}

Json to_json(const cpd::ChangeEvent& event) {
  Json j;
  j["index"] = event.index;
  j["p_value"] = event.p_value;
  j["mean_before"] = event.mean_before;
  j["mean_after"] = event.mean_after;
  j["kind"] = cpd::to_string(event.kind);
  return j;
}

cpd::ChangeEvent change_event_from_json(const Json& j, const std::string& path, bool strict) {
  FieldReader r(j, path, strict);
  cpd::ChangeEvent e;
  e.index = r.uint64("index");
  e.p_value = r.number("p_value");
  e.raw_p_value = e.p_value;
  e.mean_before = r.number("mean_before");
  e.mean_after = r.number("mean_after");
  auto kind = cpd::parse_change_kind(r.string("kind"));
  if (!kind) r.fail("kind", "expected \"fix\" or \"bug\"");
  e.kind = *kind;
  // Extra keys written by the pipeline report are tolerated here.
  for (const char* key : {"bucket_start", "bucket"}) (void)r.optional_child(key);
  r.finish();
  return e;
}

Json to_json(const causal::GroupingConfig& config) {
  Json j;
  j["measure"] = causal::to_string(config.measure);
  j["threshold"] = config.threshold;
  j["min_runs_per_version"] = config.min_runs_per_version;
  return j;
}

Json to_json(const cpd::CpdConfig& config) {
  Json j;
  j["alpha"] = config.alpha;
  j["min_segment"] = config.min_segment;
  j["test"] = cpd::to_string(config.test);
  j["stride"] = config.stride;
  j["correction"] = cpd::to_string(config.correction);
  return j;
}

void merge_from_json(causal::GroupingConfig& config, const Json& j, const std::string& path, bool strict) {
  FieldReader r(j, path, strict);
  if (r.has("measure")) {
    config.measure = measure_field(r, "measure");
    config.threshold = causal::GroupingConfig::default_threshold(config.measure);
  }
  if (r.has("threshold")) config.threshold = r.number("threshold");
  if (r.has("min_runs_per_version")) config.min_runs_per_version = r.uint64("min_runs_per_version");
  r.finish();
}

void merge_from_json(cpd::CpdConfig& config, const Json& j, const std::string& path, bool strict) {
  FieldReader r(j, path, strict);
  if (r.has("alpha")) config.alpha = r.number("alpha");
  if (r.has("min_segment")) config.min_segment = r.uint64("min_segment");
  if (r.has("test")) {
    auto test = cpd::parse_test(r.string("test"));
    if (!test) r.fail("test", "expected \"mann_whitney_u\" or \"kolmogorov_smirnov\"");
    config.test = *test;
  }
  if (r.has("stride")) config.stride = r.uint64("stride");
  if (r.has("correction")) {
    auto correction = cpd::parse_correction(r.string("correction"));
    if (!correction) r.fail("correction", "expected \"bonferroni\" or \"none\"");
    config.correction = *correction;
  }
  r.finish();
}

}  // namespace fixdetect
