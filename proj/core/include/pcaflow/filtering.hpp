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

#ifndef PCAFLOW_FILTERING_HPP
#define PCAFLOW_FILTERING_HPP

#include <cmath>
#include <deque>
#include <span>
#include <vector>

#include "pcaflow/events.hpp"

namespace pcaflow
{
struct RefractoryConfig
{
  Microseconds t_same_us{20'000};
  Microseconds t_opp_us{1'000};

  void validate() const;
};

// Support time T_f is a linear map of alpha = k / ln(f_e), clamped to
// [alpha_min, alpha_max], onto [t_min, t_max]. The default alpha bounds
// correspond to event rates between 1e7 Hz and 1e2 Hz.
struct AdaptiveConfig
{
  double k{1.0};
  Microseconds t_min_us{1'000};
  Microseconds t_max_us{20'000};
  double alpha_min{1.0 / std::log(1e7)};
  double alpha_max{1.0 / std::log(1e2)};
  int min_support{3};
  Microseconds rate_window_us{10'000};

  void validate() const;
};

struct FilterConfig
{
  bool refractory_enabled{true};
  bool activity_enabled{true};
  RefractoryConfig refractory{};
  AdaptiveConfig adaptive{};

  void validate() const;
};

// False iff the pixel fired with the same polarity less than t_same ago or
// with the opposite polarity less than t_opp ago. Empty cells never suppress.
bool refractory_pass(const Event & e, const ActiveSurface & surface, const RefractoryConfig & cfg);

// Support time in microseconds for a global event rate. Rates <= 1 Hz give
// the maximal support time. Non-increasing in the rate.
Microseconds adaptive_support_time(double event_rate_hz, const AdaptiveConfig & cfg);
Microseconds support_time_from_alpha(double alpha, const AdaptiveConfig & cfg);

// True iff at least min_support of the 8 neighbors (same polarity) hold a
// timestamp with e.t - t <= support_time.
bool activity_pass(
  const Event & e, const ActiveSurface & surface, Microseconds support_time,
  const AdaptiveConfig & cfg);

// Stateful filter for one stream. Two per-polarity grids are kept:
//  - surface(): accepted events only. Refractory checks and the estimators
//    read it.
//  - candidates(): every event that passed the refractory stage. Activity
//    support is counted here, otherwise an edge entering an empty sensor
//    could never gather support.
class EventFilter
{
public:
  EventFilter(SensorGeometry geometry, FilterConfig cfg = {});

  // Runs both stages and updates the grids. Throws StreamError when e is
  // older than the previous event and BoundsError when it is off-sensor.
  bool accept(const Event & e);

  const ActiveSurface & surface() const { return surface_; }
  const ActiveSurface & candidates() const { return candidates_; }
  const FilterConfig & config() const { return cfg_; }

  // Rate estimate (Hz) and support time used for the last event.
  double event_rate_hz() const { return rate_hz_; }
  Microseconds support_time() const { return support_time_; }

  void reset();

private:
  FilterConfig cfg_;
  ActiveSurface surface_;
  ActiveSurface candidates_;
  std::deque<Microseconds> recent_;
  Microseconds last_t_{ActiveSurface::kEmpty};
  double rate_hz_{0.0};
  Microseconds support_time_{0};
};

struct FilterResult
{
  std::vector<Event> accepted;
  std::vector<Event> rejected;
};

// Order-preserving partition of a time-sorted stream. Throws StreamError on
// unsorted input.
FilterResult filter_stream(
  std::span<const Event> events, SensorGeometry geometry, const FilterConfig & cfg = {});

}  // namespace pcaflow

#endif  // PCAFLOW_FILTERING_HPP
