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

#ifndef PCAFLOW_PCA_FLOW_HPP
#define PCAFLOW_PCA_FLOW_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pcaflow/events.hpp"
#include "pcaflow/linalg.hpp"

namespace pcaflow
{
// How the consensus threshold (1 - eps) * N^2 / 2 reads N.
enum class ConsensusDenominator {
  Window,   // N is the window side n (7 -> 24.5)
  Support,  // N is the number of fitted points; uses (1 - eps) * N
};

struct PcaConfig
{
  int n{7};                // odd window side
  int min_neighbors{4};    // neighbors excluding the event itself
  double planarity_eps{0.05};  // max lambda_3 / trace
  // Inlier tolerance on |t_est - t|. A positive value is used as is;
  // otherwise delta = max(fraction * temporal extent, floor).
  Microseconds consensus_delta_us{0};
  double consensus_delta_fraction{0.25};
  Microseconds consensus_delta_floor_us{100};
  double outlier_ratio_eps{0.5};
  Microseconds max_age_us{30'000};
  ConsensusDenominator consensus_denominator{ConsensusDenominator::Window};

  void validate() const;
};

// A point in the fitting frame: pixels for x and y, milliseconds for t.
struct Point3
{
  double x{0.0};
  double y{0.0};
  double t{0.0};
};

struct Covariance
{
  Vec3 mean{};
  // Unnormalized scatter matrix: sum over points of centered outer products.
  SymMatrix3 sigma{};
};

struct PlaneFit
{
  Vec3 mean{};
  std::array<double, 3> eigenvalues{};  // descending
  Vec3 normal{};                        // unit, normal.z >= 0
  // Plane a*x + b*y + c*t + d = 0 passing through the anchor event.
  double a{0.0}, b{0.0}, c{0.0}, d{0.0};
  int support{0};
  int inliers{0};
  bool degenerate{false};

  // lambda_3 / (lambda_1 + lambda_2 + lambda_3); 1 when the trace is zero.
  double planarity_ratio() const;
};

struct ConsensusResult
{
  int inliers{0};
  bool accepted{false};
};

// Throws DataError with fewer than 3 points.
Covariance covariance(std::span<const Point3> points);

// Eigen decomposition of the covariance and plane parameters through the
// anchor. Throws like covariance().
PlaneFit fit_plane(std::span<const Point3> points, const Point3 & anchor);

// Inlier iff |t_est - t| <= delta_ms where t_est = -(a x + b y + d) / c.
// Throws NumericError for a vertical plane (c ~ 0).
ConsensusResult consensus_check(
  const PlaneFit & fit, std::span<const Point3> points, double delta_ms, double eps, int n,
  ConsensusDenominator mode = ConsensusDenominator::Window);

// Per-point inlier flags under the same rule as consensus_check().
std::vector<std::uint8_t> consensus_inliers(
  const PlaneFit & fit, std::span<const Point3> points, double delta_ms);

// Number of inliers consensus_check() requires, (1 - eps) * N^2 / 2.
double consensus_threshold(double eps, int n, int support, ConsensusDenominator mode);

// Flow in px/ms from a plane normal expressed in (px, px, ms):
//   v = -n_t / (n_x^2 + n_y^2) * (n_x, n_y)
// Throws NumericError when the spatial part vanishes (infinite speed).
std::array<double, 2> flow_from_normal(const Vec3 & normal);

// Lifetime in ms, the time the edge needs to cross one pixel:
// sqrt(n_x^2 + n_y^2) / n_t, i.e. 1 / |flow|. Throws NumericError when n_t ~ 0.
double lifetime_from_normal(const Vec3 & normal);

// Below these magnitudes a normal component counts as zero.
inline constexpr double kMinTimeComponent = 1e-9;
inline constexpr double kMinSpatialNorm2 = 1e-18;

// Per-event PCA estimator. Holds scratch buffers so estimation does not
// allocate; one instance per thread.
class PcaEstimator
{
public:
  explicit PcaEstimator(PcaConfig cfg = {});

  const PcaConfig & config() const { return cfg_; }

  // Fits the event together with its neighborhood on `surface`. Never
  // throws; every failure maps to an invalid FlowEvent.
  FlowEvent estimate(const Event & e, const ActiveSurface & surface);

  // Same pipeline with an explicit window side (used by leveled
  // regularization).
  FlowEvent estimate(const Event & e, const ActiveSurface & surface, int n);

  // Plane fit of the last successful covariance step, for diagnostics.
  const PlaneFit & last_fit() const { return fit_; }

private:
  PcaConfig cfg_;
  std::vector<SpacetimePoint> neighbors_;
  std::vector<Point3> points_;
  PlaneFit fit_;
};

FlowEvent estimate_event(const Event & e, const ActiveSurface & surface, const PcaConfig & cfg);

}  // namespace pcaflow

#endif  // PCAFLOW_PCA_FLOW_HPP
