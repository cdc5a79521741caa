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

#ifndef PCAFLOW_PIPELINE_HPP
#define PCAFLOW_PIPELINE_HPP

#include <chrono>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pcaflow/baselines.hpp"
#include "pcaflow/events.hpp"
#include "pcaflow/filtering.hpp"
#include "pcaflow/pca_flow.hpp"
#include "pcaflow/regularize.hpp"

namespace pcaflow
{
enum class EstimatorKind { Pca, PlaneFit, LucasKanade };
enum class RegularizerKind { None, Weighted, Leveled };

std::string_view to_string(EstimatorKind k);
std::string_view to_string(RegularizerKind k);
// Accepts "pca", "plane", "lk". Throws ConfigError otherwise.
EstimatorKind parse_estimator(std::string_view name);
// Accepts "none", "weighted", "leveled".
RegularizerKind parse_regularizer(std::string_view name);

struct PipelineConfig
{
  SensorGeometry geometry{};
  FilterConfig filter{};
  EstimatorKind estimator{EstimatorKind::Pca};
  RegularizerKind regularizer{RegularizerKind::None};
  PcaConfig pca{};
  WeightedConfig weighted{};
  LeveledConfig leveled{};
  LocalPlaneConfig plane{};
  EventLkConfig lk{};

  // Regularizers only apply to the PCA estimator; other combinations throw
  // ConfigError.
  void validate() const;
};

// filter -> estimator -> regularizer for one stream, one event at a time.
// Memory is bounded by the sensor size.
class FlowPipeline
{
public:
  explicit FlowPipeline(const PipelineConfig & cfg);

  // Filtered-out events come back with status Filtered.
  FlowEvent process(const Event & e);

  // As process(); `elapsed` receives the time spent in estimation and
  // regularization only (zero for filtered events).
  FlowEvent process_timed(const Event & e, std::chrono::nanoseconds & elapsed);

  const PipelineConfig & config() const { return cfg_; }
  const EventFilter & filter() const { return filter_; }

private:
  FlowEvent estimate(const Event & e);

  PipelineConfig cfg_;
  EventFilter filter_;
  PcaEstimator pca_;
  PlaneFitEstimator plane_;
  LucasKanadeEstimator lk_;
  std::optional<EventHistory> history_;
  std::optional<WeightedRegularizer> weighted_;
};

std::vector<FlowEvent> run_pipeline(const PipelineConfig & cfg, std::span<const Event> events);

}  // namespace pcaflow

#endif  // PCAFLOW_PIPELINE_HPP
