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

#include <string>

#include "fixdetect/causal.hpp"
#include "fixdetect/changepoint.hpp"
#include "fixdetect/cusum.hpp"
#include "fixdetect/json_io.hpp"
#include "fixdetect/series.hpp"

// JSON encodings of the grouping, series and changepoint types.
namespace fixdetect {

Json to_json(const causal::CausalDegree& degree);
Json to_json(const causal::FailureGrouping& grouping);
causal::FailureGrouping grouping_from_json(const Json& j, bool strict = true);

/// {"method", "signature", "bucket_width_ms", "points": [{"t", "degree", "n_runs"}]}
Json to_json(const series::DegreeSeries& series);
series::DegreeSeries series_from_json(const Json& j, bool strict = true);

/// {"index", "p_value", "mean_before", "mean_after", "kind"}
Json to_json(const cpd::ChangeEvent& event);
cpd::ChangeEvent change_event_from_json(const Json& j, const std::string& path, bool strict = true);

Json to_json(const causal::GroupingConfig& config);
Json to_json(const cpd::CpdConfig& config);
/// Fields present in `j` override those already in `config`.
void merge_from_json(causal::GroupingConfig& config, const Json& j, const std::string& path, bool strict);
void merge_from_json(cpd::CpdConfig& config, const Json& j, const std::string& path, bool strict);

}  // namespace fixdetect
