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

#include "fixdetect/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fixdetect/error.hpp"

namespace fixdetect::cpd {
namespace {

double mean(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

void segment(std::span<const double> values, std::size_t offset, const CpdConfig& config,
             std::vector<ChangeEvent>& out) {
  auto event = detect_changepoint(values, config);
  if (!event) return;
  const std::size_t k = event->index;
  event->index += offset;
  out.push_back(*event);
  segment(values.first(k), offset, config, out);
  segment(values.subspan(k), offset + k, config, out);
}

}  // namespace

std::string_view to_string(Correction correction) {
  return correction == Correction::Bonferroni ? "bonferroni" : "none";
}

std::optional<Correction> parse_correction(std::string_view text) {
  if (text == "bonferroni") return Correction::Bonferroni;
  if (text == "none") return Correction::None;
  return std::nullopt;
}

std::string_view to_string(ChangeKind kind) { return kind == ChangeKind::Fix ? "fix" : "bug"; }

std::optional<ChangeKind> parse_change_kind(std::string_view text) {
  if (text == "fix") return ChangeKind::Fix;
  if (text == "bug") return ChangeKind::Bug;
  return std::nullopt;
}

void CpdConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "alpha must lie in (0, 1)");
  }
  if (min_segment < 2) throw Error(ErrorCode::InvalidParameter, "min_segment must be at least 2");
  if (stride < 1) throw Error(ErrorCode::InvalidParameter, "stride must be at least 1");
}

std::size_t CpdConfig::effective_stride(std::size_t n) const {
  if (n <= kMaxScanCandidates) return stride;
  return std::max(stride, (n + kMaxScanCandidates - 1) / kMaxScanCandidates);
}

std::optional<ChangeEvent> detect_changepoint(std::span<const double> values, const CpdConfig& config) {
  config.validate();
  const std::size_t n = values.size();
  if (n < 2 * config.min_segment) return std::nullopt;
  if (!std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); })) {
    throw Error(ErrorCode::InvalidParameter, "series values must be finite");
  }

  const std::size_t stride = config.effective_stride(n);
  const SplitTester tester(values, config.test);
  std::size_t best_k = 0;
  TestOutcome best;
  best.log_p = std::numeric_limits<double>::infinity();
  std::size_t candidates = 0;
  for (std::size_t k = config.min_segment; k + config.min_segment <= n; k += stride) {
    ++candidates;
    const TestOutcome outcome = tester.at(k);
    // Ranked in log space so that splits whose p underflows to zero still
    // order correctly; strict comparison keeps the earliest split on ties.
    if (outcome.log_p < best.log_p) {
      best = outcome;
      best_k = k;
    }
  }

  double corrected = best.p_value;
  if (config.correction == Correction::Bonferroni) {
    corrected = std::min(1.0, static_cast<double>(candidates) * best.p_value);
  }
  if (corrected > config.alpha) return std::nullopt;

  ChangeEvent event;
  event.index = best_k;
  event.p_value = corrected;
  event.raw_p_value = best.p_value;
  event.candidates = candidates;
  event.mean_before = mean(values.first(best_k));
  event.mean_after = mean(values.subspan(best_k));
  if (event.mean_after == event.mean_before) return std::nullopt;
  event.kind = event.mean_after < event.mean_before ? ChangeKind::Fix : ChangeKind::Bug;
  return event;
}

std::optional<ChangeEvent> detect_changepoint(const series::DegreeSeries& series, const CpdConfig& config) {
  const auto values = series.degrees();
  return detect_changepoint(values, config);
}

std::vector<ChangeEvent> detect_all(std::span<const double> values, const CpdConfig& config) {
  config.validate();
  std::vector<ChangeEvent> events;
  segment(values, 0, config, events);
  std::sort(events.begin(), events.end(),
            [](const ChangeEvent& a, const ChangeEvent& b) { return a.index < b.index; });
  return events;
}

std::vector<ChangeEvent> detect_all(const series::DegreeSeries& series, const CpdConfig& config) {
  const auto values = series.degrees();
  return detect_all(values, config);
}

}  // namespace fixdetect::cpd
