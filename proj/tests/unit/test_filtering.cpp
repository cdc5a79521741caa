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

#include "pcaflow/errors.hpp"
#include "pcaflow/filtering.hpp"
#include "pcaflow/sim.hpp"
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

TEST(Refractory, SamePolarityWithin20msSuppressed)
{
  ActiveSurface s(kGeom);
  s.update(ev(3, 3, 0));
  EXPECT_FALSE(refractory_pass(ev(3, 3, 10'000), s, {}));
  EXPECT_TRUE(refractory_pass(ev(3, 3, 20'000), s, {}));
}

TEST(Refractory, OppositePolarityAfter1msPasses)
{
  ActiveSurface s(kGeom);
  s.update(ev(3, 3, 0, Polarity::Positive));
  EXPECT_TRUE(refractory_pass(ev(3, 3, 1'500, Polarity::Negative), s, {}));
  EXPECT_FALSE(refractory_pass(ev(3, 3, 500, Polarity::Negative), s, {}));
}

TEST(Refractory, FirstEventPasses)
{
  ActiveSurface s(kGeom);
  EXPECT_TRUE(refractory_pass(ev(3, 3, 0), s, {}));
}

TEST(Refractory, OnlyLooksAtOwnPixel)
{
  ActiveSurface s(kGeom);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 7; ++x) {
      if (x != 3 || y != 3) {
        s.update(ev(x, y, 900, Polarity::Positive));
        s.update(ev(x, y, 950, Polarity::Negative));
      }
    }
  }
  EXPECT_TRUE(refractory_pass(ev(3, 3, 1000), s, {}));
}

TEST(SupportTime, EndpointsAndMidpoint)
{
  const AdaptiveConfig c;
  EXPECT_EQ(support_time_from_alpha(c.alpha_min, c), c.t_min_us);
  EXPECT_EQ(support_time_from_alpha(c.alpha_max, c), c.t_max_us);
  EXPECT_EQ(
    support_time_from_alpha(0.5 * (c.alpha_min + c.alpha_max), c),
    (c.t_min_us + c.t_max_us) / 2);
}

TEST(SupportTime, LowRateClampsToMaximum)
{
  const AdaptiveConfig c;
  EXPECT_EQ(adaptive_support_time(0.5, c), c.t_max_us);
  EXPECT_EQ(adaptive_support_time(1.0, c), c.t_max_us);
  EXPECT_EQ(adaptive_support_time(1e9, c), c.t_min_us);
}

TEST(SupportTimeProperty, MonotoneInRate)
{
  const AdaptiveConfig c;
  Microseconds prev = adaptive_support_time(1.0, c);
  for (double f = 1.5; f < 1e8; f *= 1.3) {
    const Microseconds t = adaptive_support_time(f, c);
    EXPECT_LE(t, prev) << f;
    prev = t;
  }
}

TEST(Activity, IsolatedEventFails)
{
  ActiveSurface s(kGeom);
  EXPECT_FALSE(activity_pass(ev(10, 10, 100), s, 5000, {}));
}

TEST(Activity, ThreeNeighborsIsEnough)
{
  ActiveSurface s(kGeom);
  s.update(ev(9, 10, 90));
  s.update(ev(11, 10, 90));
  EXPECT_FALSE(activity_pass(ev(10, 10, 100), s, 5000, {}));
  s.update(ev(10, 9, 95));
  EXPECT_TRUE(activity_pass(ev(10, 10, 100), s, 5000, {}));
}

TEST(Activity, StaleNeighborsDoNotCount)
{
  ActiveSurface s(kGeom);
  s.update(ev(9, 10, 0));
  s.update(ev(11, 10, 0));
  s.update(ev(10, 9, 0));
  EXPECT_FALSE(activity_pass(ev(10, 10, 10'000), s, 5000, {}));
}

TEST(Activity, InteriorEdgeEventsSupported)
{
  // Rasterization: a vertical edge at 1 px/ms sweeps past; after two columns
  // each pixel has three coeval neighbors in the previous column.
  ActiveSurface s(kGeom);
  for (int x = 0; x < 20; ++x) {
    for (int y = 0; y < kGeom.height; ++y) {
      const Event e = ev(x, y, x * 1000 + 1);
      if (x >= 1 && y >= 1 && y < kGeom.height - 1) {
        EXPECT_TRUE(activity_pass(e, s, 5000, {})) << x << "," << y;
      }
      s.update(e);
    }
  }
}

TEST(FilterStream, UnsortedInputThrows)
{
  const std::vector<Event> es{ev(1, 1, 100), ev(2, 2, 50)};
  EXPECT_THROW(filter_stream(es, kGeom), StreamError);
}

TEST(FilterStream, EmptyStream)
{
  const FilterResult r = filter_stream({}, kGeom);
  EXPECT_TRUE(r.accepted.empty());
  EXPECT_TRUE(r.rejected.empty());
}

TEST(FilterStream, OutOfBoundsThrows)
{
  const std::vector<Event> es{ev(64, 1, 100)};
  EXPECT_THROW(filter_stream(es, kGeom), BoundsError);
}

TEST(FilterStream, NoiselessEdgePassesAfterWarmup)
{
  const auto s = generate(testing::edge_scene(1.0, 0.3, kGeom, 60'000), 1);
  const auto events = events_of(s);
  EventFilter f(kGeom);
  std::size_t seen = 0, passed = 0;
  for (const Event & e : events) {
    const bool ok = f.accept(e);
    if (e.t > 5'000) {
      ++seen;
      passed += ok;
    }
  }
  ASSERT_GT(seen, 1000u);
  EXPECT_GE(static_cast<double>(passed) / static_cast<double>(seen), 0.95);
}

TEST(FilterStream, SparseNoiseRejected)
{
  SceneSpec spec = testing::edge_scene(1.0, 0.0, {240, 180}, 2'000'000, 1000.0);
  std::vector<Event> noise;
  for (const auto & g : generate(spec, 9)) {
    if (g.is_noise) {
      noise.push_back(g.event);
    }
  }
  const FilterResult r = filter_stream(noise, spec.geometry);
  EXPECT_GE(static_cast<double>(r.rejected.size()) / static_cast<double>(noise.size()), 0.95);
}

// Feeding the accepted part back through a fresh filter keeps the partition
// on an edge stream with no noise, apart from a second warm-up column and the
// border rows where support is cut short.
TEST(FilterProperty, ReplayOfAcceptedEdgeIsStable)
{
  const auto events = events_of(generate(testing::edge_scene(2.0, 0.0, kGeom, 40'000), 3));
  const FilterResult first = filter_stream(events, kGeom);
  const FilterResult again = filter_stream(first.accepted, kGeom);
  EXPECT_EQ(again.accepted.size() + again.rejected.size(), first.accepted.size());
  EXPECT_LE(again.rejected.size(), first.rejected.size());
  const Microseconds start = first.accepted.front().t;
  for (const Event & e : again.rejected) {
    if (e.t > start + 500 && e.y >= 2 && e.y < kGeom.height - 2) {
      ADD_FAILURE() << "re-rejected interior event at t=" << e.t << " x=" << e.x << " y=" << e.y;
    }
  }
}

TEST(FilterConfig, Validation)
{
  FilterConfig c;
  c.adaptive.t_min_us = 30'000;
  EXPECT_THROW(EventFilter(kGeom, c), ConfigError);
  c = {};
  c.adaptive.min_support = 9;
  EXPECT_THROW(EventFilter(kGeom, c), ConfigError);
}

}  // namespace
}  // namespace pcaflow
