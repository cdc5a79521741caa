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

#ifndef PCAFLOW_BASELINES_HPP
#define PCAFLOW_BASELINES_HPP

#include <array>
#include <vector>

#include "pcaflow/events.hpp"
#include "pcaflow/pca_flow.hpp"

namespace pcaflow
{
// Iterative least-squares plane fitting t = p*x + q*y + r.
struct LocalPlaneConfig
{
  int n{7};
  int min_neighbors{4};
  // Residual cutoff. A positive value is used as is; otherwise the PCA
  // consensus rule applies: max(fraction * temporal extent, floor).
  Microseconds reject_threshold_us{0};
  double reject_threshold_fraction{0.25};
  Microseconds reject_threshold_floor_us{100};
  int max_iters{8};
  // Fit is stable once successive (p, q, r) differ by less than this
  // (ms/px, ms/px, ms).
  double convergence_tol{1e-6};
  Microseconds max_age_us{30'000};

  void validate() const;
};

struct LeastSquaresPlane
{
  double p{0.0};  // dt/dx, ms per pixel
  double q{0.0};  // dt/dy, ms per pixel
  double r{0.0};  // ms
  int survivors{0};
  int iterations{0};
  bool ok{false};
};

// Fits t = p x + q y + r with iterative outlier rejection. Points are in
// (px, px, ms). ok == false on rank deficiency or fewer than 3 survivors.
// The surviving set only shrinks between iterations.
LeastSquaresPlane fit_plane_least_squares(
  std::span<const Point3> points, double reject_threshold_ms, int max_iters,
  double convergence_tol);

class PlaneFitEstimator
{
public:
  explicit PlaneFitEstimator(LocalPlaneConfig cfg = {});

  // flow = (p, q) / (p^2 + q^2). Never throws.
  FlowEvent estimate(const Event & e, const ActiveSurface & surface);

  const LocalPlaneConfig & config() const { return cfg_; }

private:
  LocalPlaneConfig cfg_;
  std::vector<SpacetimePoint> neighbors_;
  std::vector<Point3> points_;
  std::vector<std::uint8_t> alive_;
};

FlowEvent plane_fit_flow(const Event & e, const ActiveSurface & surface, const LocalPlaneConfig & cfg);

// Which count image the spatial gradient comes from.
enum class LkGradient {
  Recent,    // the newer slice only
  Centered,  // mean of both slices, centered on the temporal difference
};

struct EventLkConfig
{
  Microseconds delta_t_us{10'000};
  int window{5};  // odd
  // Smaller structure-tensor eigenvalue must be at least this fraction of
  // the larger one.
  double min_eigen_ratio{1e-6};
  LkGradient gradient{LkGradient::Centered};

  void validate() const;
};

// Recent per-pixel, per-polarity timestamps for the event-count images.
// Keeps the last kCapacity events of each cell; older ones are dropped.
class EventHistory
{
public:
  static constexpr int kCapacity = 8;

  explicit EventHistory(SensorGeometry geometry);

  const SensorGeometry & geometry() const { return geometry_; }

  // Throws BoundsError off-sensor.
  void record(const Event & e);

  // Events of polarity p at (x, y) with t_lo < t <= t_hi. Zero off-sensor.
  int count(int x, int y, Polarity p, Microseconds t_lo, Microseconds t_hi) const;

  void clear();

private:
  struct Cell
  {
    std::array<Microseconds, kCapacity> t{};
    std::uint8_t head{0};
    std::uint8_t size{0};
  };
  SensorGeometry geometry_;
  std::array<std::vector<Cell>, 2> cells_;
};

// Event-based Lucas-Kanade on event-count images: counts over the slices
// (t - 2dt, t - dt] and (t - dt, t], spatial gradients by central
// differences, temporal derivative from the slice difference, 2x2 normal
// equations over the window.
class LucasKanadeEstimator
{
public:
  explicit LucasKanadeEstimator(EventLkConfig cfg = {});

  FlowEvent estimate(const Event & e, const EventHistory & history);

  const EventLkConfig & config() const { return cfg_; }

private:
  EventLkConfig cfg_;
  std::vector<int> recent_;
  std::vector<int> older_;
};

FlowEvent lucas_kanade_flow(const Event & e, const EventHistory & history, const EventLkConfig & cfg);

}  // namespace pcaflow

#endif  // PCAFLOW_BASELINES_HPP
