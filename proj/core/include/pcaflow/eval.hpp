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

#ifndef PCAFLOW_EVAL_HPP
#define PCAFLOW_EVAL_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcaflow/events.hpp"
#include "pcaflow/pipeline.hpp"
#include "pcaflow/sim.hpp"

namespace pcaflow
{
struct MeanStd
{
  double mean{0.0};
  double std{0.0};  // population standard deviation
};

MeanStd mean_std(std::span<const double> values);

// An estimate next to its ground truth, both in px/ms.
struct FlowPair
{
  double vx{0.0};
  double vy{0.0};
  double gt_vx{0.0};
  double gt_vy{0.0};
};

// Matches estimates to ground truth on exact (t, x, y, p) keys, consuming
// duplicates in order. Keeps valid estimates of non-noise events. Throws
// NoDataError naming the first estimate without a ground-truth row.
std::vector<FlowPair> match_estimates(
  std::span<const FlowEvent> estimates, std::span<const GroundTruthEvent> truth);

struct AepeStats
{
  MeanStd abs{};  // px/ms
  MeanStd rel{};  // |u - u_gt| / |u_gt|
  std::size_t count{0};
};

// Throws NoDataError on an empty set. Pairs with zero ground truth only
// enter the absolute error.
AepeStats compute_aepe(std::span<const FlowPair> pairs);

struct AaeStats
{
  MeanStd deg{};
  std::size_t count{0};
  std::size_t skipped_zero{0};  // pairs with a zero-length vector
};

// Throws NoDataError when no pair has two nonzero vectors.
AaeStats compute_aae(std::span<const FlowPair> pairs);

struct FlowErrorStats
{
  MeanStd aepe_abs{};
  MeanStd aepe_rel{};
  MeanStd aae_deg{};
  std::size_t count{0};
  std::size_t aae_skipped{0};
};

FlowErrorStats flow_error_stats(std::span<const FlowPair> pairs);

struct LifetimeBin
{
  double center{0.0};  // ms
  std::size_t count{0};
  double fraction{0.0};
};

struct LifetimeHistogram
{
  double bin_width{0.1};
  std::size_t total{0};
  std::vector<LifetimeBin> bins;   // populated bins, ascending center
  std::vector<LifetimeBin> modes;  // local maxima by count, descending count

  // Most populated bin (lowest center on ties). Nullopt when empty.
  std::optional<LifetimeBin> max_bin() const;
  std::optional<LifetimeBin> max_bin_in(double lo_ms, double hi_ms) const;
};

// Fixed-width bins centered on multiples of the width: bin k collects
// lifetimes in [(k - 1/2) w, (k + 1/2) w) and is reported at k w.
// Non-finite and negative lifetimes are ignored.
LifetimeHistogram lifetime_histogram(std::span<const double> lifetimes_ms, double bin_width_ms = 0.1);
LifetimeHistogram lifetime_histogram(std::span<const FlowEvent> estimates, double bin_width_ms = 0.1);

struct TimingStats
{
  MeanStd per_event_us{};
  std::size_t events_measured{0};
  std::size_t warmup_events{0};
};

// Runs the full pipeline over the stream and times the estimation step of
// every accepted event after the first `warmup` events. Filtering is not
// timed. Throws ConfigError unless events.size() > warmup.
TimingStats benchmark(const PipelineConfig & cfg, std::span<const Event> events, std::size_t warmup);

struct EvalReport
{
  std::string label;
  std::size_t estimates{0};
  std::size_t valid{0};
  FlowErrorStats errors{};
  LifetimeHistogram lifetimes{};
  std::optional<TimingStats> timing{};
};

EvalReport evaluate(
  std::span<const FlowEvent> estimates, std::span<const GroundTruthEvent> truth,
  double bin_width_ms = 0.1, std::string label = {});

// Machine-readable report, schema in README.md.
std::string to_json(const EvalReport & report);
// Error rows: magnitude (rel.) and orientation (deg), mean +- std.
std::string to_table(std::span<const EvalReport> reports);

}  // namespace pcaflow

#endif  // PCAFLOW_EVAL_HPP
