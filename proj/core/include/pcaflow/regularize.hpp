// -*-c++-*----------------------------------------------------------------------------------------
// Copyright 2026 The pcaflow Authors
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

#ifndef PCAFLOW_REGULARIZE_HPP
#define PCAFLOW_REGULARIZE_HPP

#include <vector>

#include "pcaflow/events.hpp"
#include "pcaflow/pca_flow.hpp"

namespace pcaflow
{
enum class WeightFunction {
  Inverse,     // 1 / dt
  InverseExp,  // exp(-dt / decay)
  InverseLog,  // 1 / ln(1 + dt), dt in microseconds
};

struct WeightedConfig
{
  int m{5};  // odd window side, smaller than the estimation window
  Microseconds min_dt_us{1};
  Microseconds max_age_us{30'000};
  WeightFunction weighting{WeightFunction::Inverse};
  Microseconds decay_us{1'000};  // InverseExp only
  // The fresh estimate takes part in the sum with dt = min_dt.
  bool include_self{true};

  // estimation_n is the PCA window side; m must satisfy 3 <= m <= n - 2.
  void validate(int estimation_n) const;
};

// Unnormalized weight for a neighbor dt microseconds older than the event.
// dt is floored at min_dt. Non-increasing in dt.
double regularization_weight(Microseconds dt, const WeightedConfig & cfg);

// Fuses a valid estimate with the valid flows stored in the m x m window of
// `buffer`, weights normalized to sum to one, then stores the fused flow in
// the buffer. Invalid estimates pass through untouched.
FlowEvent weighted_regularize(
  const FlowEvent & raw, ActiveFlowBuffer & buffer, const WeightedConfig & cfg);

// Stateful wrapper owning the active optical flow buffer.
class WeightedRegularizer
{
public:
  WeightedRegularizer(SensorGeometry geometry, WeightedConfig cfg);

  FlowEvent apply(const FlowEvent & raw);

  const ActiveFlowBuffer & buffer() const { return buffer_; }
  const WeightedConfig & config() const { return cfg_; }

private:
  WeightedConfig cfg_;
  ActiveFlowBuffer buffer_;
  std::vector<FlowSample> samples_;
};

struct LeveledConfig
{
  std::vector<int> levels{7, 5, 3};  // odd, >= 3, strictly decreasing

  void validate() const;
};

// Runs the PCA estimator once per window size and averages the valid
// results. Invalid when no level is valid.
FlowEvent leveled_regularize(
  const Event & e, const ActiveSurface & surface, const LeveledConfig & cfg,
  PcaEstimator & estimator);

class LeveledEstimator
{
public:
  LeveledEstimator(PcaConfig pca, LeveledConfig levels);

  FlowEvent estimate(const Event & e, const ActiveSurface & surface)
  {
    return leveled_regularize(e, surface, levels_, pca_);
  }

  const LeveledConfig & config() const { return levels_; }

private:
  PcaEstimator pca_;
  LeveledConfig levels_;
};

}  // namespace pcaflow

#endif  // PCAFLOW_REGULARIZE_HPP
