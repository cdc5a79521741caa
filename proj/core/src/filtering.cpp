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

#include "pcaflow/filtering.hpp"

#include <algorithm>
#include <string>

#include "pcaflow/errors.hpp"

namespace pcaflow
{
void RefractoryConfig::validate() const
{
  if (t_same_us <= 0 || t_opp_us <= 0) {
    throw ConfigError("refractory periods must be positive");
  }
}

void AdaptiveConfig::validate() const
{
  if (!(t_min_us < t_max_us)) {
    throw ConfigError("adaptive filter requires t_min < t_max");
  }
  if (t_min_us < 0) {
    throw ConfigError("adaptive filter t_min must be non-negative");
  }
  if (!(alpha_min < alpha_max)) {
    throw ConfigError("adaptive filter requires alpha_min < alpha_max");
  }
  if (min_support < 1 || min_support > 8) {
    throw ConfigError("adaptive filter min_support must lie in [1, 8]");
  }
  if (rate_window_us <= 0) {
    throw ConfigError("adaptive filter rate window must be positive");
  }
}

void FilterConfig::validate() const
{
  refractory.validate();
  adaptive.validate();
}

bool refractory_pass(const Event & e, const ActiveSurface & surface, const RefractoryConfig & cfg)
{
  const Microseconds same = surface.at(e.x, e.y, e.p);
  if (same != ActiveSurface::kEmpty && e.t - same < cfg.t_same_us) {
    return false;
  }
  const Microseconds opp = surface.at(e.x, e.y, opposite(e.p));
  if (opp != ActiveSurface::kEmpty && e.t - opp < cfg.t_opp_us) {
    return false;
  }
  return true;
}

Microseconds support_time_from_alpha(double alpha, const AdaptiveConfig & cfg)
{
  const double a = std::clamp(alpha, cfg.alpha_min, cfg.alpha_max);
  const double span = static_cast<double>(cfg.t_max_us - cfg.t_min_us);
  const double t =
    span / (cfg.alpha_max - cfg.alpha_min) * (a - cfg.alpha_min) + static_cast<double>(cfg.t_min_us);
  return std::clamp<Microseconds>(std::llround(t), cfg.t_min_us, cfg.t_max_us);
}

Microseconds adaptive_support_time(double event_rate_hz, const AdaptiveConfig & cfg)
{
  if (!(event_rate_hz > 1.0)) {
    return support_time_from_alpha(cfg.alpha_max, cfg);
  }
  return support_time_from_alpha(cfg.k / std::log(event_rate_hz), cfg);
}

bool activity_pass(
  const Event & e, const ActiveSurface & surface, Microseconds support_time,
  const AdaptiveConfig & cfg)
{
  const Window w = Window::around(surface.geometry(), e.x, e.y, 3);
  int support = 0;
  for (int y = w.y0; y <= w.y1; ++y) {
    for (int x = w.x0; x <= w.x1; ++x) {
      if (x == e.x && y == e.y) {
        continue;
      }
      const Microseconds t = surface.at(x, y, e.p);
      if (t != ActiveSurface::kEmpty && e.t - t <= support_time) {
        if (++support >= cfg.min_support) {
          return true;
        }
      }
    }
  }
  return false;
}

EventFilter::EventFilter(SensorGeometry geometry, FilterConfig cfg)
: cfg_(cfg), surface_(geometry), candidates_(geometry)
{
  cfg_.validate();
}

bool EventFilter::accept(const Event & e)
{
  if (last_t_ != ActiveSurface::kEmpty && e.t < last_t_) {
    throw StreamError(
      "event at t=" + std::to_string(e.t) + " precedes previous t=" + std::to_string(last_t_));
  }
  if (!surface_.geometry().contains(e)) {
    throw BoundsError(
      "event (" + std::to_string(e.x) + ", " + std::to_string(e.y) + ") outside sensor");
  }
  last_t_ = e.t;

  recent_.push_back(e.t);
  while (!recent_.empty() && recent_.front() <= e.t - cfg_.adaptive.rate_window_us) {
    recent_.pop_front();
  }
  rate_hz_ = static_cast<double>(recent_.size()) * 1e6 /
             static_cast<double>(cfg_.adaptive.rate_window_us);

  if (cfg_.refractory_enabled && !refractory_pass(e, surface_, cfg_.refractory)) {
    return false;
  }

  bool pass = true;
  if (cfg_.activity_enabled) {
    support_time_ = adaptive_support_time(rate_hz_, cfg_.adaptive);
    pass = activity_pass(e, candidates_, support_time_, cfg_.adaptive);
    candidates_.update(e);
  }
  if (pass) {
    surface_.update(e);
  }
  return pass;
}

void EventFilter::reset()
{
  surface_.clear();
  candidates_.clear();
  recent_.clear();
  last_t_ = ActiveSurface::kEmpty;
  rate_hz_ = 0.0;
  support_time_ = 0;
}

FilterResult filter_stream(
  std::span<const Event> events, SensorGeometry geometry, const FilterConfig & cfg)
{
  EventFilter filter(geometry, cfg);
  FilterResult out;
  for (const Event & e : events) {
    if (filter.accept(e)) {
      out.accepted.push_back(e);
    } else {
      out.rejected.push_back(e);
    }
  }
  return out;
}

}  // namespace pcaflow
