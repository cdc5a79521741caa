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

#include "pcaflow/events.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcaflow/errors.hpp"

namespace pcaflow
{
namespace
{
[[noreturn]] void throw_out_of_bounds(const SensorGeometry & g, const Event & e)
{
  throw BoundsError(
    "event (" + std::to_string(e.x) + ", " + std::to_string(e.y) + ") outside " +
    std::to_string(g.width) + "x" + std::to_string(g.height) + " sensor");
}
}  // namespace

void SensorGeometry::validate() const
{
  if (width < 3 || height < 3) {
    throw ConfigError(
      "sensor geometry " + std::to_string(width) + "x" + std::to_string(height) +
      " is smaller than 3x3");
  }
  if (width > 65535 || height > 65535) {
    throw ConfigError("sensor geometry exceeds 16-bit pixel coordinates");
  }
}

Window Window::around(const SensorGeometry & g, int cx, int cy, int n)
{
  const int r = n / 2;
  return {std::max(0, cx - r), std::min(g.width - 1, cx + r), std::max(0, cy - r),
          std::min(g.height - 1, cy + r)};
}

ActiveSurface::ActiveSurface(SensorGeometry geometry) : geometry_(geometry)
{
  geometry_.validate();
  for (auto & c : cells_) {
    c.assign(geometry_.pixel_count(), kEmpty);
  }
}

void ActiveSurface::update(const Event & e)
{
  if (!geometry_.contains(e)) {
    throw_out_of_bounds(geometry_, e);
  }
  auto & cell = cells_[polarity_index(e.p)][geometry_.index(e.x, e.y)];
  cell = std::max(cell, e.t);
}

void ActiveSurface::neighborhood(
  const Event & e, int n, Microseconds max_age, std::vector<SpacetimePoint> & out) const
{
  const Window w = Window::around(geometry_, e.x, e.y, n);
  const auto & grid = cells_[polarity_index(e.p)];
  out.resize(static_cast<std::size_t>((w.x1 - w.x0 + 1) * (w.y1 - w.y0 + 1)));
  // Branch-free compaction: write every cell, advance only on a keeper.
  // Empty cells hold kEmpty and always fail the age test.
  const Microseconds oldest = e.t - max_age;
  std::size_t k = 0;
  for (int y = w.y0; y <= w.y1; ++y) {
    const Microseconds * row = grid.data() + geometry_.index(0, y);
    for (int x = w.x0; x <= w.x1; ++x) {
      const Microseconds t = row[x];
      out[k] = {x, y, t};
      k += static_cast<std::size_t>((t >= oldest) & ((x != e.x) | (y != e.y)));
    }
  }
  out.resize(k);
}

std::vector<SpacetimePoint> ActiveSurface::neighborhood(
  const Event & e, int n, Microseconds max_age) const
{
  std::vector<SpacetimePoint> out;
  neighborhood(e, n, max_age, out);
  return out;
}

void ActiveSurface::clear()
{
  for (auto & c : cells_) {
    std::fill(c.begin(), c.end(), kEmpty);
  }
}

std::string_view to_string(FlowStatus s)
{
  switch (s) {
    case FlowStatus::Valid:
      return "valid";
    case FlowStatus::Filtered:
      return "filtered";
    case FlowStatus::InsufficientSupport:
      return "insufficient_support";
    case FlowStatus::Degenerate:
      return "degenerate";
    case FlowStatus::NonPlanar:
      return "non_planar";
    case FlowStatus::ConsensusRejected:
      return "consensus_rejected";
    case FlowStatus::VerticalPlane:
      return "vertical_plane";
    case FlowStatus::UndefinedFlow:
      return "undefined_flow";
    case FlowStatus::IllConditioned:
      return "ill_conditioned";
  }
  return "unknown";
}

FlowEvent FlowEvent::from_flow(const Event & e, double vx, double vy)
{
  const double speed = std::hypot(vx, vy);
  if (!(speed > 0.0) || !std::isfinite(speed)) {
    return rejected(e, FlowStatus::UndefinedFlow);
  }
  return {e, vx, vy, 1.0 / speed, FlowStatus::Valid};
}

ActiveFlowBuffer::ActiveFlowBuffer(SensorGeometry geometry) : geometry_(geometry)
{
  geometry_.validate();
  for (auto & c : cells_) {
    c.assign(geometry_.pixel_count(), Cell{});
  }
}

void ActiveFlowBuffer::update(const FlowEvent & f)
{
  if (!f.valid()) {
    return;
  }
  const Event & e = f.event;
  if (!geometry_.contains(e)) {
    throw_out_of_bounds(geometry_, e);
  }
  auto & cell = cells_[polarity_index(e.p)][geometry_.index(e.x, e.y)];
  if (cell.t != ActiveSurface::kEmpty && cell.t > e.t) {
    return;
  }
  cell = {f.vx, f.vy, e.t};
}

std::optional<FlowSample> ActiveFlowBuffer::at(int x, int y, Polarity p) const
{
  const Cell & c = cells_[polarity_index(p)][geometry_.index(x, y)];
  if (c.t == ActiveSurface::kEmpty) {
    return std::nullopt;
  }
  return FlowSample{x, y, c.vx, c.vy, c.t};
}

void ActiveFlowBuffer::gather(
  const Event & e, int m, Microseconds max_age, std::vector<FlowSample> & out) const
{
  out.clear();
  const Window w = Window::around(geometry_, e.x, e.y, m);
  const auto & grid = cells_[polarity_index(e.p)];
  for (int y = w.y0; y <= w.y1; ++y) {
    for (int x = w.x0; x <= w.x1; ++x) {
      const Cell & c = grid[geometry_.index(x, y)];
      if (c.t == ActiveSurface::kEmpty || e.t - c.t > max_age) {
        continue;
      }
      out.push_back({x, y, c.vx, c.vy, c.t});
    }
  }
}

void ActiveFlowBuffer::clear()
{
  for (auto & c : cells_) {
    std::fill(c.begin(), c.end(), Cell{});
  }
}

}  // namespace pcaflow
