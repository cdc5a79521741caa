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

#ifndef PCAFLOW_EVENTS_HPP
#define PCAFLOW_EVENTS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace pcaflow
{
// Timestamps are integer microseconds throughout. Flow is px/ms and
// lifetimes are ms; conversions happen at the formula boundaries.
using Microseconds = std::int64_t;

inline constexpr double kMicrosPerMilli = 1000.0;

enum class Polarity : std::int8_t { Negative = -1, Positive = 1 };

constexpr int polarity_index(Polarity p) { return p == Polarity::Positive ? 0 : 1; }
constexpr Polarity opposite(Polarity p)
{
  return p == Polarity::Positive ? Polarity::Negative : Polarity::Positive;
}
constexpr int polarity_sign(Polarity p) { return static_cast<int>(p); }

struct Event
{
  Microseconds t{0};
  std::uint16_t x{0};
  std::uint16_t y{0};
  Polarity p{Polarity::Positive};

  friend bool operator==(const Event &, const Event &) = default;
};

struct SensorGeometry
{
  int width{480};
  int height{360};

  // Throws ConfigError unless the sensor admits a 3x3 neighborhood.
  void validate() const;

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  bool contains(const Event & e) const { return contains(e.x, e.y); }
  std::size_t pixel_count() const
  {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index(int x, int y) const
  {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }

  friend bool operator==(const SensorGeometry &, const SensorGeometry &) = default;
};

// One neighbor sample gathered from a surface.
struct SpacetimePoint
{
  int x{0};
  int y{0};
  Microseconds t{0};

  friend bool operator==(const SpacetimePoint &, const SpacetimePoint &) = default;
};

// Square window of odd side n centered on (cx, cy), clipped at the borders.
struct Window
{
  int x0, x1, y0, y1;  // inclusive bounds

  static Window around(const SensorGeometry & g, int cx, int cy, int n);
};

// Per-polarity grid of the most recent timestamp at each pixel (the active
// events surface). Stored timestamps never decrease.
class ActiveSurface
{
public:
  static constexpr Microseconds kEmpty = std::numeric_limits<Microseconds>::min();

  explicit ActiveSurface(SensorGeometry geometry);

  const SensorGeometry & geometry() const { return geometry_; }

  // Throws BoundsError for events outside the sensor.
  void update(const Event & e);

  Microseconds at(int x, int y, Polarity p) const
  {
    return cells_[polarity_index(p)][geometry_.index(x, y)];
  }
  bool empty_at(int x, int y, Polarity p) const { return at(x, y, p) == kEmpty; }

  // Non-empty cells of polarity e.p inside the n x n window around e, aged at
  // most max_age relative to e.t. The center pixel is never returned.
  // `out` is cleared first; reusing it avoids per-event allocation.
  void neighborhood(
    const Event & e, int n, Microseconds max_age, std::vector<SpacetimePoint> & out) const;
  std::vector<SpacetimePoint> neighborhood(const Event & e, int n, Microseconds max_age) const;

  void clear();

private:
  SensorGeometry geometry_;
  std::array<std::vector<Microseconds>, 2> cells_;
};

enum class FlowStatus : std::uint8_t {
  Valid,
  Filtered,             // rejected by the event filter, never estimated
  InsufficientSupport,  // too few neighbors
  Degenerate,           // repeated smallest eigenvalue, normal undefined
  NonPlanar,            // planarity gate
  ConsensusRejected,    // not enough inliers
  VerticalPlane,        // plane contains the time axis
  UndefinedFlow,        // no spatial gradient
  IllConditioned,       // rank-deficient least squares / structure tensor
};

std::string_view to_string(FlowStatus s);

// An event with its flow estimate. Invalid estimates carry zero flow and no
// lifetime; valid ones carry lifetime = 1/|flow|.
struct FlowEvent
{
  Event event{};
  double vx{0.0};
  double vy{0.0};
  std::optional<double> lifetime_ms{};
  FlowStatus status{FlowStatus::Filtered};

  bool valid() const { return status == FlowStatus::Valid; }

  static FlowEvent rejected(const Event & e, FlowStatus why) { return {e, 0.0, 0.0, {}, why}; }
  // Lifetime is derived as the reciprocal of |flow|. Zero flow is rejected as
  // UndefinedFlow.
  static FlowEvent from_flow(const Event & e, double vx, double vy);
};

struct FlowSample
{
  int x{0};
  int y{0};
  double vx{0.0};
  double vy{0.0};
  Microseconds t{0};
};

// Per-polarity grid of the most recent valid flow at each pixel ("active
// optical flow"). Same overwrite semantics as ActiveSurface.
class ActiveFlowBuffer
{
public:
  explicit ActiveFlowBuffer(SensorGeometry geometry);

  const SensorGeometry & geometry() const { return geometry_; }

  // Invalid flow events are ignored. Throws BoundsError off-sensor.
  void update(const FlowEvent & f);

  std::optional<FlowSample> at(int x, int y, Polarity p) const;

  // Stored samples of polarity e.p in the m x m window around e with
  // e.t - t <= max_age. Includes the center pixel's previous sample.
  void gather(
    const Event & e, int m, Microseconds max_age, std::vector<FlowSample> & out) const;

  void clear();

private:
  struct Cell
  {
    double vx{0.0};
    double vy{0.0};
    Microseconds t{ActiveSurface::kEmpty};
  };
  SensorGeometry geometry_;
  std::array<std::vector<Cell>, 2> cells_;
};

}  // namespace pcaflow

#endif  // PCAFLOW_EVENTS_HPP
