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

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fixdetect/rank_tests.hpp"
#include "fixdetect/series.hpp"

namespace fixdetect::cpd {

enum class Correction { Bonferroni, None };
enum class ChangeKind { Fix, Bug };

std::string_view to_string(Correction correction);
std::optional<Correction> parse_correction(std::string_view text);
std::string_view to_string(ChangeKind kind);
std::optional<ChangeKind> parse_change_kind(std::string_view text);

inline constexpr std::size_t kMaxScanCandidates = 2000;

struct CpdConfig {
  double alpha = 0.01;
  std::size_t min_segment = 5;
  TwoSampleTest test = TwoSampleTest::MannWhitneyU;
  std::size_t stride = 1;
  Correction correction = Correction::Bonferroni;

  void validate() const;
  /// Stride actually used on an n-point series: raised to ceil(n / 2000)
  /// once n exceeds 2000.
  std::size_t effective_stride(std::size_t n) const;
};

struct ChangeEvent {
  std::size_t index = 0;      // |T1|; the change takes effect at point `index`
  double p_value = 1.0;       // after correction
  double raw_p_value = 1.0;   // smallest p over the scanned splits
  std::size_t candidates = 0; // number of splits tested
  double mean_before = 0.0;
  double mean_after = 0.0;
  ChangeKind kind = ChangeKind::Fix;
};

/// Scans splits k = min_segment, min_segment + stride, ..., n - min_segment
/// and reports the earliest split with the smallest p-value when the
/// corrected p is at most alpha and the segment means differ.
std::optional<ChangeEvent> detect_changepoint(std::span<const double> values, const CpdConfig& config);
std::optional<ChangeEvent> detect_changepoint(const series::DegreeSeries& series, const CpdConfig& config);

/// Binary segmentation: detect, then recurse into both halves. Events are
/// sorted by index.
std::vector<ChangeEvent> detect_all(std::span<const double> values, const CpdConfig& config);
std::vector<ChangeEvent> detect_all(const series::DegreeSeries& series, const CpdConfig& config);

}  // namespace fixdetect::cpd
