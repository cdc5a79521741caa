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

#ifndef PCAFLOW_SIM_HPP
#define PCAFLOW_SIM_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include "pcaflow/events.hpp"

namespace pcaflow
{
// Square-wave stripes moving along +x (or -x for negative speeds). With k
// speeds the sensor is split into k equal-width column bands, band i moving
// at speeds[i]. Edges are `spacing` pixels apart and alternate polarity.
struct StripesPattern
{
  std::vector<double> speeds_px_ms{1.0};
  double spacing_px{8.0};
};

// One straight dark-to-bright edge sweeping the sensor with velocity
// (vx, vy), perpendicular to the edge.
struct TranslatingEdge
{
  double vx{1.0};
  double vy{0.0};
};

// A line through `center` rotating at omega; the leading half-line brightens
// pixels (+), the trailing one darkens them (-).
struct RotatingBar
{
  double omega_rad_s{3.0};
  double cx{0.0};
  double cy{0.0};
};

using Pattern = std::variant<StripesPattern, TranslatingEdge, RotatingBar>;

struct NoiseSpec
{
  double rate_hz{0.0};                // uniform over sensor and time
  double timestamp_jitter_std_us{0.0};  // Gaussian jitter on signal events
};

struct SceneSpec
{
  SensorGeometry geometry{};
  Pattern pattern{TranslatingEdge{}};
  Microseconds duration_us{1'000'000};
  int contrast_threshold{1};  // events per edge crossing
  NoiseSpec noise{};

  // Throws ConfigError.
  void validate() const;
};

struct GroundTruthEvent
{
  Event event{};
  double gt_vx{0.0};
  double gt_vy{0.0};
  double gt_lifetime_ms{0.0};  // 1 / |gt flow|; 0 for noise
  bool is_noise{false};

  friend bool operator==(const GroundTruthEvent &, const GroundTruthEvent &) = default;
};

// Emits one event per edge crossing of a pixel center (times
// contrast_threshold), quantized to 1 us and sorted by (t, y, x, p).
// Deterministic for a fixed seed.
std::vector<GroundTruthEvent> generate(const SceneSpec & spec, std::uint64_t seed);

struct StripesOptions
{
  double spacing_px{8.0};
  NoiseSpec noise{};
  std::uint64_t seed{0};
};

// Left half carries stripes at `slow` px/ms, right half at `fast` px/ms.
// Throws ConfigError unless both are positive and distinct.
std::vector<GroundTruthEvent> two_speed_stripes(
  double slow, double fast, SensorGeometry geometry, Microseconds duration_us,
  const StripesOptions & opts = {});

std::vector<Event> events_of(const std::vector<GroundTruthEvent> & stream);

}  // namespace pcaflow

#endif  // PCAFLOW_SIM_HPP
