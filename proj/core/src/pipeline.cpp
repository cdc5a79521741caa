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

#include "pcaflow/pipeline.hpp"

#include <string>

#include "pcaflow/errors.hpp"

namespace pcaflow
{
std::string_view to_string(EstimatorKind k)
{
  switch (k) {
    case EstimatorKind::Pca:
      return "pca";
    case EstimatorKind::PlaneFit:
      return "plane";
    case EstimatorKind::LucasKanade:
      return "lk";
  }
  return "?";
}

std::string_view to_string(RegularizerKind k)
{
  switch (k) {
    case RegularizerKind::None:
      return "none";
    case RegularizerKind::Weighted:
      return "weighted";
    case RegularizerKind::Leveled:
      return "leveled";
  }
  return "?";
}

EstimatorKind parse_estimator(std::string_view name)
{
  for (auto k : {EstimatorKind::Pca, EstimatorKind::PlaneFit, EstimatorKind::LucasKanade}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw ConfigError("unknown estimator '" + std::string(name) + "' (expected pca, plane or lk)");
}

RegularizerKind parse_regularizer(std::string_view name)
{
  for (auto k : {RegularizerKind::None, RegularizerKind::Weighted, RegularizerKind::Leveled}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw ConfigError(
    "unknown regularizer '" + std::string(name) + "' (expected none, weighted or leveled)");
}

void PipelineConfig::validate() const
{
  geometry.validate();
  filter.validate();
  pca.validate();
  plane.validate();
  lk.validate();
  if (regularizer != RegularizerKind::None && estimator != EstimatorKind::Pca) {
    throw ConfigError(
      "regularizer '" + std::string(to_string(regularizer)) +
      "' applies to the pca estimator only, not '" + std::string(to_string(estimator)) + "'");
  }
  if (regularizer == RegularizerKind::Weighted) {
    weighted.validate(pca.n);
  }
  if (regularizer == RegularizerKind::Leveled) {
    leveled.validate();
  }
}

namespace
{
const PipelineConfig & checked(const PipelineConfig & cfg)
{
  cfg.validate();
  return cfg;
}

}  // namespace

FlowPipeline::FlowPipeline(const PipelineConfig & cfg)
: cfg_(checked(cfg)),
  filter_(cfg.geometry, cfg.filter),
  pca_(cfg.pca),
  plane_(cfg.plane),
  lk_(cfg.lk)
{
  if (cfg_.estimator == EstimatorKind::LucasKanade) {
    history_.emplace(cfg_.geometry);
  }
  if (cfg_.regularizer == RegularizerKind::Weighted) {
    weighted_.emplace(cfg_.geometry, cfg_.weighted);
  }
}

FlowEvent FlowPipeline::estimate(const Event & e)
{
  const ActiveSurface & surface = filter_.surface();
  switch (cfg_.estimator) {
    case EstimatorKind::PlaneFit:
      return plane_.estimate(e, surface);
    case EstimatorKind::LucasKanade:
      return lk_.estimate(e, *history_);
    case EstimatorKind::Pca:
      break;
  }
  switch (cfg_.regularizer) {
    case RegularizerKind::Weighted:
      return weighted_->apply(pca_.estimate(e, surface));
    case RegularizerKind::Leveled:
      return leveled_regularize(e, surface, cfg_.leveled, pca_);
    case RegularizerKind::None:
      break;
  }
  return pca_.estimate(e, surface);
}

FlowEvent FlowPipeline::process(const Event & e)
{
  if (!filter_.accept(e)) {
    return FlowEvent::rejected(e, FlowStatus::Filtered);
  }
  if (history_) {
    history_->record(e);
  }
  return estimate(e);
}

FlowEvent FlowPipeline::process_timed(const Event & e, std::chrono::nanoseconds & elapsed)
{
  elapsed = std::chrono::nanoseconds::zero();
  if (!filter_.accept(e)) {
    return FlowEvent::rejected(e, FlowStatus::Filtered);
  }
  if (history_) {
    history_->record(e);
  }
  const auto start = std::chrono::steady_clock::now();
  FlowEvent out = estimate(e);
  elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

std::vector<FlowEvent> run_pipeline(const PipelineConfig & cfg, std::span<const Event> events)
{
  FlowPipeline pipeline(cfg);
  std::vector<FlowEvent> out;
  out.reserve(events.size());
  for (const Event & e : events) {
    out.push_back(pipeline.process(e));
  }
  return out;
}

}  // namespace pcaflow
