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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pcaflow/baselines.hpp"
#include "pcaflow/errors.hpp"
#include "pcaflow/eval.hpp"
#include "pcaflow/pipeline.hpp"
#include "test_support.hpp"

namespace pcaflow
{
namespace
{
constexpr SensorGeometry kGeom{64, 48};

Event ev(int x, int y, Microseconds t, Polarity p = Polarity::Positive)
{
  return Event{t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), p};
}

std::vector<Point3> plane_points(double p, double q, int half)
{
  std::vector<Point3> pts{{0, 0, 0}};
  for (int y = -half; y <= half; ++y) {
    for (int x = -half; x <= half; ++x) {
      if (x != 0 || y != 0) {
        pts.push_back({double(x), double(y), p * x + q * y});
      }
    }
  }
  return pts;
}

TEST(LeastSquaresPlane, ExactPlaneHalfMsPerPixel)
{
  const auto pts = plane_points(0.5, 0.0, 3);
  const LeastSquaresPlane f = fit_plane_least_squares(pts, 0.1, 8, 1e-9);
  ASSERT_TRUE(f.ok);
  EXPECT_NEAR(f.p, 0.5, 1e-12);
  EXPECT_NEAR(f.q, 0.0, 1e-12);
  EXPECT_EQ(f.survivors, 49);
  const double g2 = f.p * f.p + f.q * f.q;
  EXPECT_NEAR(f.p / g2, 2.0, 1e-12);
}

TEST(LeastSquaresPlane, CollinearRowIsIllConditioned)
{
  std::vector<Point3> row;
  for (int x = -3; x <= 3; ++x) {
    row.push_back({double(x), 0.0, 0.5 * x});
  }
  EXPECT_FALSE(fit_plane_least_squares(row, 0.1, 8, 1e-9).ok);

  ActiveSurface s(kGeom);
  for (int x = -3; x <= 3; ++x) {
    if (x != 0) {
      s.update(ev(20 + x, 20, 10'000 + 500 * x));
    }
  }
  EXPECT_EQ(plane_fit_flow(ev(20, 20, 10'000), s, {}).status, FlowStatus::IllConditioned);
}

TEST(LeastSquaresPlaneProperty, SurvivorsNeverGrow)
{
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> slope(-1.0, 1.0);
  std::bernoulli_distribution outlier(0.2);
  std::normal_distribution<double> big(0.0, 3.0);
  for (int round = 0; round < 200; ++round) {
    auto pts = testing::noisy_plane_patch(rng, 30, slope(rng), slope(rng), 0.05);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (outlier(rng)) {
        pts[i].t += big(rng);
      }
    }
    int prev = static_cast<int>(pts.size());
    for (int iters = 1; iters <= 8; ++iters) {
      const LeastSquaresPlane f = fit_plane_least_squares(pts, 0.2, iters, 0.0);
      EXPECT_LE(f.survivors, prev);
      prev = f.survivors;
      if (!f.ok) {
        break;
      }
    }
  }
}

TEST(PlaneFitVsPca, AgreeOnExactPlanes)
{
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> slope(0.1, 1.0);
  for (int round = 0; round < 50; ++round) {
    const double p = slope(rng) * (rng() % 2 ? 1 : -1);
    const double q = slope(rng) * (rng() % 2 ? 1 : -1);
    ActiveSurface s(kGeom);
    // Only integral-microsecond slopes keep the plane exact on the grid.
    const auto pu = std::llround(p * 1000), qu = std::llround(q * 1000);
    for (int dy = -3; dy <= 3; ++dy) {
      for (int dx = -3; dx <= 3; ++dx) {
        if (dx != 0 || dy != 0) {
          s.update(ev(30 + dx, 20 + dy, 50'000 + pu * dx + qu * dy));
        }
      }
    }
    const Event e = ev(30, 20, 50'000);
    PcaEstimator pca;
    PlaneFitEstimator plane;
    const FlowEvent a = pca.estimate(e, s);
    const FlowEvent b = plane.estimate(e, s);
    ASSERT_TRUE(a.valid() && b.valid());
    EXPECT_NEAR(a.vx, b.vx, 1e-6);
    EXPECT_NEAR(a.vy, b.vy, 1e-6);
  }
}

TEST(LucasKanade, EmptyHistoryInvalid)
{
  EventHistory h(kGeom);
  LucasKanadeEstimator lk;
  EXPECT_FALSE(lk.estimate(ev(20, 20, 50'000), h).valid());
}

TEST(LucasKanade, TranslatingEdgeWithin25Percent)
{
  PipelineConfig cfg;
  cfg.geometry = {96, 72};
  cfg.estimator = EstimatorKind::LucasKanade;
  cfg.lk.delta_t_us = 1000;
  cfg.filter.activity_enabled = false;
  const auto truth = generate(testing::edge_scene(2.0, 0.0, cfg.geometry, 40'000), 1);
  const auto flow = run_pipeline(cfg, events_of(truth));
  std::vector<double> vx;
  for (const auto & f : flow) {
    if (f.valid() && f.event.t > 5'000) {
      vx.push_back(f.vx);
    }
  }
  ASSERT_GT(vx.size(), 100u);
  const MeanStd m = mean_std(vx);
  EXPECT_NEAR(m.mean, 2.0, 0.5);
}

TEST(EventHistory, CountsHalfOpenWindow)
{
  EventHistory h(kGeom);
  h.record(ev(3, 3, 100));
  h.record(ev(3, 3, 200));
  EXPECT_EQ(h.count(3, 3, Polarity::Positive, 100, 200), 1);
  EXPECT_EQ(h.count(3, 3, Polarity::Positive, 99, 200), 2);
  EXPECT_EQ(h.count(3, 3, Polarity::Negative, 0, 300), 0);
  EXPECT_EQ(h.count(-1, 3, Polarity::Positive, 0, 300), 0);
  EXPECT_THROW(h.record(ev(64, 0, 1)), BoundsError);
}

TEST(BaselineConfig, Validation)
{
  LocalPlaneConfig p;
  p.n = 6;
  EXPECT_THROW(PlaneFitEstimator{p}, ConfigError);
  EventLkConfig l;
  l.window = 2;
  EXPECT_THROW(LucasKanadeEstimator{l}, ConfigError);
}

}  // namespace
}  // namespace pcaflow
