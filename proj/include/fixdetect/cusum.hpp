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
#include <vector>

#include "fixdetect/changepoint.hpp"

namespace fixdetect::cpd {

struct CusumParams {
  double reference_mean = 0.0;  // mu0
  double slack = 0.0;           // kappa, >= 0
  double threshold = 1.0;       // h, > 0
  std::size_t rebaseline_window = 5;

  friend bool operator==(const CusumParams&, const CusumParams&) = default;
};

/// Two-sided CUSUM over a stream of degrees. An upward excursion beyond the
/// threshold raises a Bug alarm, a downward one a Fix alarm. After an alarm
/// both sums restart from zero and the reference mean moves to the mean of
/// the most recent `rebaseline_window` observations.
///
/// Single owner: one stream, one state.
class CusumState {
 public:
  explicit CusumState(const CusumParams& params);

  std::optional<ChangeKind> step(double x);

  double upper_sum() const noexcept { return upper_; }
  double lower_sum() const noexcept { return lower_; }
  double reference_mean() const noexcept { return params_.reference_mean; }
  const CusumParams& params() const noexcept { return params_; }
  std::size_t observations() const noexcept { return seen_; }

  friend bool operator==(const CusumState&, const CusumState&) = default;

 private:
  double recent_mean() const;

  CusumParams params_;
  double upper_ = 0.0;
  double lower_ = 0.0;
  std::size_t seen_ = 0;
  std::vector<double> recent_;  // ring buffer of the last rebaseline_window values
  std::size_t head_ = 0;
};

struct CusumStepResult {
  CusumState state;
  std::optional<ChangeKind> alarm;
};

CusumStepResult cusum_step(CusumState state, double x);

}  // namespace fixdetect::cpd
