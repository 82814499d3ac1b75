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

#include "fixdetect/cusum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixdetect/error.hpp"

namespace fixdetect::cpd {

CusumState::CusumState(const CusumParams& params) : params_(params) {
  if (!(params_.threshold > 0.0) || !std::isfinite(params_.threshold)) {
    throw Error(ErrorCode::InvalidParameter, "CUSUM threshold h must be positive");
  }
  if (!(params_.slack >= 0.0) || !std::isfinite(params_.slack)) {
    throw Error(ErrorCode::InvalidParameter, "CUSUM slack kappa must be non-negative");
  }
  if (!std::isfinite(params_.reference_mean)) {
    throw Error(ErrorCode::InvalidParameter, "CUSUM reference mean must be finite");
  }
  if (params_.rebaseline_window < 1) {
    throw Error(ErrorCode::InvalidParameter, "CUSUM rebaseline window must be at least 1");
  }
  recent_.reserve(params_.rebaseline_window);
}

double CusumState::recent_mean() const {
  return std::accumulate(recent_.begin(), recent_.end(), 0.0) / static_cast<double>(recent_.size());
}

std::optional<ChangeKind> CusumState::step(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidParameter, "CUSUM observation must be finite");
  ++seen_;
  if (recent_.size() < params_.rebaseline_window) {
    recent_.push_back(x);
  } else {
    recent_[head_] = x;
    head_ = (head_ + 1) % recent_.size();
  }

  upper_ = std::max(0.0, upper_ + (x - params_.reference_mean - params_.slack));
  lower_ = std::max(0.0, lower_ + (params_.reference_mean - x - params_.slack));

  const bool up = upper_ > params_.threshold;
  const bool down = lower_ > params_.threshold;
  if (!up && !down) return std::nullopt;

  // Both sides over h on the same step: the larger excursion wins, Bug on a tie.
  const ChangeKind alarm = (up && (!down || upper_ >= lower_)) ? ChangeKind::Bug : ChangeKind::Fix;
  upper_ = 0.0;
  lower_ = 0.0;
  params_.reference_mean = recent_mean();
  return alarm;
}

CusumStepResult cusum_step(CusumState state, double x) {
  auto alarm = state.step(x);
  return {std::move(state), alarm};
}

}  // namespace fixdetect::cpd
