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

#include "pcaflow/pca_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcaflow/errors.hpp"

namespace pcaflow
{
namespace
{
Covariance covariance_unchecked(std::span<const Point3> points)
{
  const double inv_n = 1.0 / static_cast<double>(points.size());
  Vec3 mean{};
  for (const Point3 & p : points) {
    mean.x += p.x;
    mean.y += p.y;
    mean.z += p.t;
  }
  mean = mean * inv_n;

  SymMatrix3 s{};
  for (const Point3 & p : points) {
    const double dx = p.x - mean.x;
    const double dy = p.y - mean.y;
    const double dt = p.t - mean.z;
    s.a00 += dx * dx;
    s.a01 += dx * dy;
    s.a02 += dx * dt;
    s.a11 += dy * dy;
    s.a12 += dy * dt;
    s.a22 += dt * dt;
  }
  return {mean, s};
}

PlaneFit plane_from_covariance(
  const Covariance & cov, std::size_t support, const Point3 & anchor)
{
  const SmallestEigenpair eig = smallest_eigenpair(cov.sigma);
  PlaneFit fit;
  fit.mean = cov.mean;
  fit.eigenvalues = eig.values;
  fit.normal = eig.vector;
  fit.degenerate = eig.degenerate;
  fit.a = eig.vector.x;
  fit.b = eig.vector.y;
  fit.c = eig.vector.z;
  fit.d = -(fit.a * anchor.x + fit.b * anchor.y + fit.c * anchor.t);
  fit.support = static_cast<int>(support);
  return fit;
}

int count_inliers(const PlaneFit & fit, std::span<const Point3> points, double delta_ms)
{
  const double inv_c = 1.0 / fit.c;
  int inliers = 0;
  for (const Point3 & p : points) {
    const double t_est = -(fit.a * p.x + fit.b * p.y + fit.d) * inv_c;
    if (std::abs(t_est - p.t) <= delta_ms) {
      ++inliers;
    }
  }
  return inliers;
}

}  // namespace

void PcaConfig::validate() const
{
  if (n < 3 || n % 2 == 0) {
    throw ConfigError("pca.n must be odd and >= 3, got " + std::to_string(n));
  }
  if (min_neighbors < 0) {
    throw ConfigError("pca.min_neighbors must be non-negative");
  }
  if (!(planarity_eps > 0.0)) {
    throw ConfigError("pca.planarity_eps must be positive");
  }
  if (!(outlier_ratio_eps > 0.0 && outlier_ratio_eps < 1.0)) {
    throw ConfigError("pca.outlier_ratio_eps must lie in (0, 1)");
  }
  if (consensus_delta_us < 0 || consensus_delta_floor_us <= 0 ||
      !(consensus_delta_fraction > 0.0)) {
    throw ConfigError("pca consensus delta settings must be positive");
  }
  if (max_age_us <= 0) {
    throw ConfigError("pca.max_age_us must be positive");
  }
}

double PlaneFit::planarity_ratio() const
{
  const double trace = eigenvalues[0] + eigenvalues[1] + eigenvalues[2];
  if (!(trace > 0.0)) {
    return 1.0;
  }
  return std::max(0.0, eigenvalues[2]) / trace;
}

Covariance covariance(std::span<const Point3> points)
{
  if (points.size() < 3) {
    throw DataError(
      "covariance needs at least 3 points, got " + std::to_string(points.size()));
  }
  return covariance_unchecked(points);
}

PlaneFit fit_plane(std::span<const Point3> points, const Point3 & anchor)
{
  return plane_from_covariance(covariance(points), points.size(), anchor);
}

double consensus_threshold(double eps, int n, int support, ConsensusDenominator mode)
{
  if (mode == ConsensusDenominator::Support) {
    return (1.0 - eps) * static_cast<double>(support);
  }
  return (1.0 - eps) * static_cast<double>(n) * static_cast<double>(n) / 2.0;
}

ConsensusResult consensus_check(
  const PlaneFit & fit, std::span<const Point3> points, double delta_ms, double eps, int n,
  ConsensusDenominator mode)
{
  if (std::abs(fit.c) < kMinTimeComponent) {
    throw NumericError("vertical plane: time component of the normal is zero");
  }
  ConsensusResult r;
  r.inliers = count_inliers(fit, points, delta_ms);
  r.accepted = static_cast<double>(r.inliers) >
               consensus_threshold(eps, n, static_cast<int>(points.size()), mode);
  return r;
}

std::vector<std::uint8_t> consensus_inliers(
  const PlaneFit & fit, std::span<const Point3> points, double delta_ms)
{
  if (std::abs(fit.c) < kMinTimeComponent) {
    throw NumericError("vertical plane: time component of the normal is zero");
  }
  std::vector<std::uint8_t> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point3 & p = points[i];
    const double t_est = -(fit.a * p.x + fit.b * p.y + fit.d) / fit.c;
    out[i] = std::abs(t_est - p.t) <= delta_ms ? 1 : 0;
  }
  return out;
}

std::array<double, 2> flow_from_normal(const Vec3 & normal)
{
  const double s2 = normal.x * normal.x + normal.y * normal.y;
  if (!(s2 > kMinSpatialNorm2)) {
    throw NumericError("undefined flow: normal has no spatial component");
  }
  const double k = -normal.z / s2;
  return {k * normal.x, k * normal.y};
}

double lifetime_from_normal(const Vec3 & normal)
{
  if (!(normal.z > kMinTimeComponent)) {
    throw NumericError("undefined lifetime: normal has no time component");
  }
  return std::sqrt(normal.x * normal.x + normal.y * normal.y) / normal.z;
}

PcaEstimator::PcaEstimator(PcaConfig cfg) : cfg_(cfg)
{
  cfg_.validate();
  neighbors_.reserve(static_cast<std::size_t>(cfg_.n * cfg_.n));
  points_.reserve(static_cast<std::size_t>(cfg_.n * cfg_.n));
}

FlowEvent PcaEstimator::estimate(const Event & e, const ActiveSurface & surface)
{
  return estimate(e, surface, cfg_.n);
}

FlowEvent PcaEstimator::estimate(const Event & e, const ActiveSurface & surface, int n)
{
  surface.neighborhood(e, n, cfg_.max_age_us, neighbors_);
  if (static_cast<int>(neighbors_.size()) < cfg_.min_neighbors) {
    return FlowEvent::rejected(e, FlowStatus::InsufficientSupport);
  }

  // Fit in a frame centered on the event: pixels relative to (e.x, e.y) and
  // milliseconds relative to e.t. The event itself is the first point. The
  // frame keeps coordinates small, so raw moments are safe to center.
  points_.resize(neighbors_.size() + 1);
  points_[0] = {};
  double sx = 0, sy = 0, st = 0, sxx = 0, sxy = 0, sxt = 0, syy = 0, syt = 0, stt = 0;
  Microseconds t_lo = e.t;
  Microseconds t_hi = e.t;
  for (std::size_t i = 0; i < neighbors_.size(); ++i) {
    const SpacetimePoint & q = neighbors_[i];
    const double x = static_cast<double>(q.x - e.x);
    const double y = static_cast<double>(q.y - e.y);
    const double t = static_cast<double>(q.t - e.t) / kMicrosPerMilli;
    points_[i + 1] = {x, y, t};
    sx += x;
    sy += y;
    st += t;
    sxx += x * x;
    sxy += x * y;
    sxt += x * t;
    syy += y * y;
    syt += y * t;
    stt += t * t;
    t_lo = std::min(t_lo, q.t);
    t_hi = std::max(t_hi, q.t);
  }
  if (points_.size() < 3) {
    return FlowEvent::rejected(e, FlowStatus::InsufficientSupport);
  }
  const double inv_n = 1.0 / static_cast<double>(points_.size());
  Covariance cov;
  cov.mean = {sx * inv_n, sy * inv_n, st * inv_n};
  cov.sigma = {
    sxx - sx * cov.mean.x, sxy - sx * cov.mean.y, sxt - sx * cov.mean.z,
    syy - sy * cov.mean.y, syt - sy * cov.mean.z, stt - st * cov.mean.z};

  fit_ = plane_from_covariance(cov, points_.size(), Point3{});
  if (fit_.degenerate) {
    return FlowEvent::rejected(e, FlowStatus::Degenerate);
  }
  if (!(fit_.planarity_ratio() < cfg_.planarity_eps)) {
    return FlowEvent::rejected(e, FlowStatus::NonPlanar);
  }
  if (std::abs(fit_.c) < kMinTimeComponent) {
    return FlowEvent::rejected(e, FlowStatus::VerticalPlane);
  }

  Microseconds delta_us = cfg_.consensus_delta_us;
  if (delta_us <= 0) {
    const auto extent = static_cast<double>(t_hi - t_lo);
    delta_us = std::max(
      cfg_.consensus_delta_floor_us,
      static_cast<Microseconds>(std::llround(cfg_.consensus_delta_fraction * extent)));
  }
  fit_.inliers =
    count_inliers(fit_, points_, static_cast<double>(delta_us) / kMicrosPerMilli);
  if (!(static_cast<double>(fit_.inliers) >
        consensus_threshold(
          cfg_.outlier_ratio_eps, n, fit_.support, cfg_.consensus_denominator))) {
    return FlowEvent::rejected(e, FlowStatus::ConsensusRejected);
  }

  const Vec3 & v = fit_.normal;
  const double s2 = v.x * v.x + v.y * v.y;
  if (!(s2 > kMinSpatialNorm2)) {
    return FlowEvent::rejected(e, FlowStatus::UndefinedFlow);
  }
  const double k = -v.z / s2;
  return {e, k * v.x, k * v.y, std::sqrt(s2) / v.z, FlowStatus::Valid};
}

FlowEvent estimate_event(const Event & e, const ActiveSurface & surface, const PcaConfig & cfg)
{
  PcaEstimator est(cfg);
  return est.estimate(e, surface);
}

}  // namespace pcaflow
