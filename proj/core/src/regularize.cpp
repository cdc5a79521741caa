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

#include "pcaflow/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pcaflow/errors.hpp"

namespace pcaflow
{
namespace
{
FlowEvent fuse(
  const FlowEvent & raw, const std::vector<FlowSample> & samples, const WeightedConfig & cfg)
{
  const Event & e = raw.event;
  double wsum = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  if (cfg.include_self) {
    const double w = regularization_weight(cfg.min_dt_us, cfg);
    wsum += w;
    vx += w * raw.vx;
    vy += w * raw.vy;
  }
  for (const FlowSample & s : samples) {
    const double w = regularization_weight(e.t - s.t, cfg);
    wsum += w;
    vx += w * s.vx;
    vy += w * s.vy;
  }
  if (!(wsum > 0.0)) {
    return raw;
  }
  return FlowEvent::from_flow(e, vx / wsum, vy / wsum);
}

}  // namespace

void WeightedConfig::validate(int estimation_n) const
{
  if (m < 3 || m % 2 == 0) {
    throw ConfigError("weighted.m must be odd and >= 3, got " + std::to_string(m));
  }
  if (m > estimation_n - 2) {
    throw ConfigError(
      "weighted.m must not exceed the estimation window minus 2 (" +
      std::to_string(estimation_n - 2) + ")");
  }
  if (min_dt_us <= 0 || max_age_us <= 0 || decay_us <= 0) {
    throw ConfigError("weighted time constants must be positive");
  }
}

double regularization_weight(Microseconds dt, const WeightedConfig & cfg)
{
  const double d = static_cast<double>(std::max(dt, cfg.min_dt_us));
  switch (cfg.weighting) {
    case WeightFunction::Inverse:
      return 1.0 / d;
    case WeightFunction::InverseExp:
      return std::exp(-d / static_cast<double>(cfg.decay_us));
    case WeightFunction::InverseLog:
      return 1.0 / std::log1p(d);
  }
  return 0.0;
}

FlowEvent weighted_regularize(
  const FlowEvent & raw, ActiveFlowBuffer & buffer, const WeightedConfig & cfg)
{
  if (!raw.valid()) {
    return raw;
  }
  std::vector<FlowSample> samples;
  buffer.gather(raw.event, cfg.m, cfg.max_age_us, samples);
  FlowEvent fused = fuse(raw, samples, cfg);
  buffer.update(fused);
  return fused;
}

WeightedRegularizer::WeightedRegularizer(SensorGeometry geometry, WeightedConfig cfg)
: cfg_(cfg), buffer_(geometry)
{
  samples_.reserve(static_cast<std::size_t>(cfg_.m * cfg_.m));
}

FlowEvent WeightedRegularizer::apply(const FlowEvent & raw)
{
  if (!raw.valid()) {
    return raw;
  }
  buffer_.gather(raw.event, cfg_.m, cfg_.max_age_us, samples_);
  FlowEvent fused = fuse(raw, samples_, cfg_);
  buffer_.update(fused);
  return fused;
}

void LeveledConfig::validate() const
{
  if (levels.empty()) {
    throw ConfigError("leveled.levels must not be empty");
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 3 || levels[i] % 2 == 0) {
      throw ConfigError("leveled.levels must be odd and >= 3");
    }
    if (i > 0 && levels[i] >= levels[i - 1]) {
      throw ConfigError("leveled.levels must be strictly decreasing");
    }
  }
}

FlowEvent leveled_regularize(
  const Event & e, const ActiveSurface & surface, const LeveledConfig & cfg,
  PcaEstimator & estimator)
{
  double vx = 0.0;
  double vy = 0.0;
  int valid = 0;
  FlowEvent first_valid;
  FlowStatus failure = FlowStatus::InsufficientSupport;
  for (const int n : cfg.levels) {
    const FlowEvent f = estimator.estimate(e, surface, n);
    if (!f.valid()) {
      failure = f.status;
      continue;
    }
    if (valid == 0) {
      first_valid = f;
    }
    vx += f.vx;
    vy += f.vy;
    ++valid;
  }
  if (valid == 0) {
    return FlowEvent::rejected(e, failure);
  }
  if (valid == 1) {
    return first_valid;
  }
  return FlowEvent::from_flow(e, vx / valid, vy / valid);
}

LeveledEstimator::LeveledEstimator(PcaConfig pca, LeveledConfig levels)
: pca_(pca), levels_(std::move(levels))
{
  levels_.validate();
}

}  // namespace pcaflow
