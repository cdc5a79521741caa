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

#include "pcaflow/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcaflow/errors.hpp"

namespace pcaflow
{
namespace
{
// Relative determinant below which the normal equations count as singular.
constexpr double kMinRelativeDeterminant = 1e-10;

LeastSquaresPlane fit_least_squares(
  std::span<const Point3> points, std::vector<std::uint8_t> & alive, double threshold_ms,
  int max_iters, double tol)
{
  LeastSquaresPlane out;
  alive.assign(points.size(), 1);
  int survivors = static_cast<int>(points.size());
  double prev_p = 0.0, prev_q = 0.0, prev_r = 0.0;
  bool have_prev = false;

  for (int iter = 1; iter <= max_iters; ++iter) {
    double sxx = 0, sxy = 0, sx = 0, syy = 0, sy = 0, sn = 0, sxt = 0, syt = 0, st = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!alive[i]) {
        continue;
      }
      const Point3 & q = points[i];
      sxx += q.x * q.x;
      sxy += q.x * q.y;
      sx += q.x;
      syy += q.y * q.y;
      sy += q.y;
      sn += 1.0;
      sxt += q.x * q.t;
      syt += q.y * q.t;
      st += q.t;
    }
    // Normal equations [sxx sxy sx; sxy syy sy; sx sy sn] (p q r)^T = (sxt syt st)^T.
    const double c00 = syy * sn - sy * sy;
    const double c01 = sy * sx - sxy * sn;
    const double c02 = sxy * sy - syy * sx;
    const double det = sxx * c00 + sxy * c01 + sx * c02;
    const double diag = sxx * syy * sn;
    if (!(diag > 0.0) || !(det > kMinRelativeDeterminant * diag)) {
      out.ok = false;
      out.iterations = iter;
      out.survivors = survivors;
      return out;
    }
    const double c11 = sxx * sn - sx * sx;
    const double c12 = sxy * sx - sxx * sy;
    const double c22 = sxx * syy - sxy * sxy;
    const double inv = 1.0 / det;
    const double p = (c00 * sxt + c01 * syt + c02 * st) * inv;
    const double q = (c01 * sxt + c11 * syt + c12 * st) * inv;
    const double r = (c02 * sxt + c12 * syt + c22 * st) * inv;
    out.p = p;
    out.q = q;
    out.r = r;
    out.iterations = iter;

    for (std::size_t i = 0; i < points.size(); ++i) {
      if (alive[i] && std::abs(points[i].t - (p * points[i].x + q * points[i].y + r)) > threshold_ms) {
        alive[i] = 0;
        --survivors;
      }
    }
    out.survivors = survivors;
    if (survivors < 3) {
      out.ok = false;
      return out;
    }
    const bool converged = have_prev && std::abs(p - prev_p) < tol && std::abs(q - prev_q) < tol &&
                           std::abs(r - prev_r) < tol;
    out.ok = true;
    if (converged) {
      break;
    }
    prev_p = p;
    prev_q = q;
    prev_r = r;
    have_prev = true;
  }
  return out;
}

}  // namespace

void LocalPlaneConfig::validate() const
{
  if (n < 3 || n % 2 == 0) {
    throw ConfigError("plane.n must be odd and >= 3");
  }
  if (max_iters < 1) {
    throw ConfigError("plane.max_iters must be >= 1");
  }
  if (reject_threshold_us < 0 || reject_threshold_floor_us <= 0 ||
      !(reject_threshold_fraction > 0.0)) {
    throw ConfigError("plane reject threshold settings must be positive");
  }
  if (max_age_us <= 0 || !(convergence_tol > 0.0)) {
    throw ConfigError("plane.max_age_us and plane.convergence_tol must be positive");
  }
}

LeastSquaresPlane fit_plane_least_squares(
  std::span<const Point3> points, double reject_threshold_ms, int max_iters,
  double convergence_tol)
{
  std::vector<std::uint8_t> alive;
  if (points.size() < 3) {
    return {};
  }
  return fit_least_squares(points, alive, reject_threshold_ms, max_iters, convergence_tol);
}

PlaneFitEstimator::PlaneFitEstimator(LocalPlaneConfig cfg) : cfg_(cfg)
{
  cfg_.validate();
  neighbors_.reserve(static_cast<std::size_t>(cfg_.n * cfg_.n));
  points_.reserve(static_cast<std::size_t>(cfg_.n * cfg_.n));
}

FlowEvent PlaneFitEstimator::estimate(const Event & e, const ActiveSurface & surface)
{
  surface.neighborhood(e, cfg_.n, cfg_.max_age_us, neighbors_);
  if (static_cast<int>(neighbors_.size()) < cfg_.min_neighbors) {
    return FlowEvent::rejected(e, FlowStatus::InsufficientSupport);
  }
  points_.clear();
  points_.push_back({0.0, 0.0, 0.0});
  Microseconds t_lo = e.t;
  Microseconds t_hi = e.t;
  for (const SpacetimePoint & q : neighbors_) {
    points_.push_back(
      {static_cast<double>(q.x - e.x), static_cast<double>(q.y - e.y),
       static_cast<double>(q.t - e.t) / kMicrosPerMilli});
    t_lo = std::min(t_lo, q.t);
    t_hi = std::max(t_hi, q.t);
  }
  if (points_.size() < 3) {
    return FlowEvent::rejected(e, FlowStatus::InsufficientSupport);
  }

  Microseconds thr = cfg_.reject_threshold_us;
  if (thr <= 0) {
    thr = std::max(
      cfg_.reject_threshold_floor_us,
      static_cast<Microseconds>(
        std::llround(cfg_.reject_threshold_fraction * static_cast<double>(t_hi - t_lo))));
  }
  const LeastSquaresPlane fit = fit_least_squares(
    points_, alive_, static_cast<double>(thr) / kMicrosPerMilli, cfg_.max_iters,
    cfg_.convergence_tol);
  if (!fit.ok) {
    return FlowEvent::rejected(
      e, fit.survivors < 3 ? FlowStatus::InsufficientSupport : FlowStatus::IllConditioned);
  }
  const double g2 = fit.p * fit.p + fit.q * fit.q;
  if (!(g2 > kMinSpatialNorm2)) {
    return FlowEvent::rejected(e, FlowStatus::UndefinedFlow);
  }
  return FlowEvent::from_flow(e, fit.p / g2, fit.q / g2);
}

FlowEvent plane_fit_flow(const Event & e, const ActiveSurface & surface, const LocalPlaneConfig & cfg)
{
  PlaneFitEstimator est(cfg);
  return est.estimate(e, surface);
}

void EventLkConfig::validate() const
{
  if (delta_t_us <= 0) {
    throw ConfigError("lk.delta_t_us must be positive");
  }
  if (window < 3 || window % 2 == 0) {
    throw ConfigError("lk.window must be odd and >= 3");
  }
  if (!(min_eigen_ratio >= 0.0)) {
    throw ConfigError("lk.min_eigen_ratio must be non-negative");
  }
}

EventHistory::EventHistory(SensorGeometry geometry) : geometry_(geometry)
{
  geometry_.validate();
  for (auto & c : cells_) {
    c.assign(geometry_.pixel_count(), Cell{});
  }
}

void EventHistory::record(const Event & e)
{
  if (!geometry_.contains(e)) {
    throw BoundsError("event outside sensor");
  }
  Cell & c = cells_[polarity_index(e.p)][geometry_.index(e.x, e.y)];
  c.t[c.head] = e.t;
  c.head = static_cast<std::uint8_t>((c.head + 1) % kCapacity);
  if (c.size < kCapacity) {
    ++c.size;
  }
}

int EventHistory::count(int x, int y, Polarity p, Microseconds t_lo, Microseconds t_hi) const
{
  if (!geometry_.contains(x, y)) {
    return 0;
  }
  const Cell & c = cells_[polarity_index(p)][geometry_.index(x, y)];
  int n = 0;
  for (int i = 0; i < c.size; ++i) {
    const Microseconds t = c.t[static_cast<std::size_t>(i)];
    n += (t > t_lo && t <= t_hi) ? 1 : 0;
  }
  return n;
}

void EventHistory::clear()
{
  for (auto & c : cells_) {
    std::fill(c.begin(), c.end(), Cell{});
  }
}

LucasKanadeEstimator::LucasKanadeEstimator(EventLkConfig cfg) : cfg_(cfg) { cfg_.validate(); }

FlowEvent LucasKanadeEstimator::estimate(const Event & e, const EventHistory & history)
{
  const int r = cfg_.window / 2 + 1;
  const int side = 2 * r + 1;
  recent_.resize(static_cast<std::size_t>(side * side));
  older_.resize(static_cast<std::size_t>(side * side));
  const Microseconds dt = cfg_.delta_t_us;
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      const int x = e.x - r + i;
      const int y = e.y - r + j;
      const auto k = static_cast<std::size_t>(j * side + i);
      recent_[k] = history.count(x, y, e.p, e.t - dt, e.t);
      older_[k] = history.count(x, y, e.p, e.t - 2 * dt, e.t - dt);
    }
  }

  const double dt_ms = static_cast<double>(dt) / kMicrosPerMilli;
  double sxx = 0, sxy = 0, syy = 0, sxt = 0, syt = 0;
  for (int j = 1; j < side - 1; ++j) {
    for (int i = 1; i < side - 1; ++i) {
      const auto at = [&](const std::vector<int> & img, int ii, int jj) {
        return static_cast<double>(img[static_cast<std::size_t>(jj * side + ii)]);
      };
      double ix = 0.5 * (at(recent_, i + 1, j) - at(recent_, i - 1, j));
      double iy = 0.5 * (at(recent_, i, j + 1) - at(recent_, i, j - 1));
      if (cfg_.gradient == LkGradient::Centered) {
        ix = 0.5 * (ix + 0.5 * (at(older_, i + 1, j) - at(older_, i - 1, j)));
        iy = 0.5 * (iy + 0.5 * (at(older_, i, j + 1) - at(older_, i, j - 1)));
      }
      const double it = (at(recent_, i, j) - at(older_, i, j)) / dt_ms;
      sxx += ix * ix;
      sxy += ix * iy;
      syy += iy * iy;
      sxt += ix * it;
      syt += iy * it;
    }
  }

  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double lmax = 0.5 * tr + disc;
  const double lmin = 0.5 * tr - disc;
  if (!(lmax > 0.0) || lmin < cfg_.min_eigen_ratio * lmax || !(det > 0.0)) {
    return FlowEvent::rejected(e, FlowStatus::IllConditioned);
  }
  const double vx = -(syy * sxt - sxy * syt) / det;
  const double vy = -(sxx * syt - sxy * sxt) / det;
  return FlowEvent::from_flow(e, vx, vy);
}

FlowEvent lucas_kanade_flow(const Event & e, const EventHistory & history, const EventLkConfig & cfg)
{
  LucasKanadeEstimator est(cfg);
  return est.estimate(e, history);
}

}  // namespace pcaflow
