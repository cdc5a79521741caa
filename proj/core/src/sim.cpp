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

#include "pcaflow/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <tuple>

#include "pcaflow/errors.hpp"

namespace pcaflow
{
namespace
{
struct Crossing
{
  double t_ms;
  int x;
  int y;
  Polarity p;
  double vx;
  double vy;
};

template <class Emit>
void stripes_crossings(const StripesPattern & s, const SensorGeometry & g, double dur_ms, Emit && emit)
{
  const int bands = static_cast<int>(s.speeds_px_ms.size());
  for (int band = 0; band < bands; ++band) {
    const double v = s.speeds_px_ms[static_cast<std::size_t>(band)];
    const int x_begin = band * g.width / bands;
    const int x_end = (band + 1) * g.width / bands;
    for (int x = x_begin; x < x_end; ++x) {
      // Edge j sits at j * spacing + v * t; it crosses column x at
      // t = (x - j * spacing) / v. The half-spacing offset keeps t = 0 free.
      const double xs = static_cast<double>(x) + 0.5 * s.spacing_px;
      const double j_a = xs / s.spacing_px;
      const double j_b = (xs - v * dur_ms) / s.spacing_px;
      const auto j_lo = static_cast<long>(std::floor(std::min(j_a, j_b))) - 1;
      const auto j_hi = static_cast<long>(std::ceil(std::max(j_a, j_b))) + 1;
      for (long j = j_lo; j <= j_hi; ++j) {
        const double t = (xs - static_cast<double>(j) * s.spacing_px) / v;
        if (t < 0.0 || t >= dur_ms) {
          continue;
        }
        const Polarity p = ((j % 2) + 2) % 2 == 0 ? Polarity::Positive : Polarity::Negative;
        for (int y = 0; y < g.height; ++y) {
          emit(Crossing{t, x, y, p, v, 0.0});
        }
      }
    }
  }
}

template <class Emit>
void edge_crossings(const TranslatingEdge & edge, const SensorGeometry & g, double dur_ms, Emit && emit)
{
  const double speed = std::hypot(edge.vx, edge.vy);
  const double ux = edge.vx / speed;
  const double uy = edge.vy / speed;
  // Start one pixel before the first corner the edge reaches.
  const double w = static_cast<double>(g.width - 1);
  const double h = static_cast<double>(g.height - 1);
  const double s0 = std::min({0.0, ux * w, uy * h, ux * w + uy * h}) - 1.0;
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const double t = (ux * x + uy * y - s0) / speed;
      if (t < dur_ms) {
        emit(Crossing{t, x, y, Polarity::Positive, edge.vx, edge.vy});
      }
    }
  }
}

template <class Emit>
void rotating_crossings(const RotatingBar & bar, const SensorGeometry & g, double dur_ms, Emit && emit)
{
  constexpr double kPhase0 = 0.1;  // keeps the initial line off pixel centers
  const double w = bar.omega_rad_s / 1000.0;  // rad/ms
  const double half_turn_ms = std::numbers::pi / std::abs(w);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const double dx = static_cast<double>(x) - bar.cx;
      const double dy = static_cast<double>(y) - bar.cy;
      if (std::hypot(dx, dy) < 1.5) {
        continue;
      }
      const double phi = std::atan2(dy, dx);
      // theta(t) = kPhase0 + w t meets phi + k pi; the first k with t >= 0.
      double rel = (phi - kPhase0) / w;
      rel = std::fmod(rel, half_turn_ms);
      if (rel < 0.0) {
        rel += half_turn_ms;
      }
      const double vx = -w * dy;
      const double vy = w * dx;
      for (double t = rel; t < dur_ms; t += half_turn_ms) {
        // Parity of the half-turn count decides which half-line arrives.
        const double turns = std::round((kPhase0 + w * t - phi) / std::numbers::pi);
        const bool leading = (static_cast<long>(std::abs(turns)) % 2) == 0;
        emit(Crossing{t, x, y, leading ? Polarity::Positive : Polarity::Negative, vx, vy});
      }
    }
  }
}

bool stream_order(const GroundTruthEvent & a, const GroundTruthEvent & b)
{
  return std::make_tuple(a.event.t, a.event.y, a.event.x, a.event.p, a.is_noise) <
         std::make_tuple(b.event.t, b.event.y, b.event.x, b.event.p, b.is_noise);
}

}  // namespace

void SceneSpec::validate() const
{
  if (geometry.width <= 0 || geometry.height <= 0) {
    throw ConfigError("degenerate sensor geometry");
  }
  geometry.validate();
  if (duration_us <= 0) {
    throw ConfigError("scene duration must be positive");
  }
  if (contrast_threshold < 1) {
    throw ConfigError("contrast threshold must be >= 1");
  }
  if (!(noise.rate_hz >= 0.0) || !(noise.timestamp_jitter_std_us >= 0.0)) {
    throw ConfigError("noise rate and jitter must be non-negative");
  }
  if (const auto * s = std::get_if<StripesPattern>(&pattern)) {
    if (s->speeds_px_ms.empty()) {
      throw ConfigError("stripes need at least one speed");
    }
    if (static_cast<int>(s->speeds_px_ms.size()) > geometry.width) {
      throw ConfigError("more stripe bands than sensor columns");
    }
    for (double v : s->speeds_px_ms) {
      if (!(v != 0.0) || !std::isfinite(v)) {
        throw ConfigError("stripe speeds must be finite and nonzero");
      }
    }
    if (!(s->spacing_px >= 1.0)) {
      throw ConfigError("stripe spacing must be at least one pixel");
    }
  } else if (const auto * e = std::get_if<TranslatingEdge>(&pattern)) {
    if (!(std::hypot(e->vx, e->vy) > 0.0) || !std::isfinite(e->vx) || !std::isfinite(e->vy)) {
      throw ConfigError("edge velocity must be finite and nonzero");
    }
  } else if (const auto * r = std::get_if<RotatingBar>(&pattern)) {
    if (!(r->omega_rad_s != 0.0) || !std::isfinite(r->omega_rad_s)) {
      throw ConfigError("rotation speed must be finite and nonzero");
    }
  }
}

std::vector<GroundTruthEvent> generate(const SceneSpec & spec, std::uint64_t seed)
{
  spec.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  const double sigma = spec.noise.timestamp_jitter_std_us;
  const double dur_ms = static_cast<double>(spec.duration_us) / kMicrosPerMilli;

  std::vector<GroundTruthEvent> out;
  auto emit = [&](const Crossing & c) {
    const double lifetime = 1.0 / std::hypot(c.vx, c.vy);
    for (int k = 0; k < spec.contrast_threshold; ++k) {
      double t_us = c.t_ms * kMicrosPerMilli;
      if (sigma > 0.0) {
        t_us += sigma * jitter(rng);
      }
      const Microseconds t = std::max<Microseconds>(0, std::llround(t_us));
      out.push_back(
        {{t, static_cast<std::uint16_t>(c.x), static_cast<std::uint16_t>(c.y), c.p}, c.vx, c.vy,
         lifetime, false});
    }
  };
  std::visit(
    [&](const auto & pattern) {
      using T = std::decay_t<decltype(pattern)>;
      if constexpr (std::is_same_v<T, StripesPattern>) {
        stripes_crossings(pattern, spec.geometry, dur_ms, emit);
      } else if constexpr (std::is_same_v<T, TranslatingEdge>) {
        edge_crossings(pattern, spec.geometry, dur_ms, emit);
      } else {
        rotating_crossings(pattern, spec.geometry, dur_ms, emit);
      }
    },
    spec.pattern);

  const auto noise_count =
    static_cast<std::size_t>(std::llround(spec.noise.rate_hz * dur_ms / kMicrosPerMilli));
  std::uniform_int_distribution<int> ux(0, spec.geometry.width - 1);
  std::uniform_int_distribution<int> uy(0, spec.geometry.height - 1);
  std::uniform_int_distribution<Microseconds> ut(0, spec.duration_us - 1);
  std::bernoulli_distribution up(0.5);
  for (std::size_t i = 0; i < noise_count; ++i) {
    const int x = ux(rng);
    const int y = uy(rng);
    const Microseconds t = ut(rng);
    const Polarity p = up(rng) ? Polarity::Positive : Polarity::Negative;
    out.push_back(
      {{t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), p}, 0.0, 0.0, 0.0, true});
  }

  std::sort(out.begin(), out.end(), stream_order);
  return out;
}

std::vector<GroundTruthEvent> two_speed_stripes(
  double slow, double fast, SensorGeometry geometry, Microseconds duration_us,
  const StripesOptions & opts)
{
  if (!(slow > 0.0) || !(fast > 0.0)) {
    throw ConfigError("stripe speeds must be positive");
  }
  if (slow == fast) {
    throw ConfigError("slow and fast stripe speeds must differ");
  }
  SceneSpec spec;
  spec.geometry = geometry;
  spec.pattern = StripesPattern{{slow, fast}, opts.spacing_px};
  spec.duration_us = duration_us;
  spec.noise = opts.noise;
  return generate(spec, opts.seed);
}

std::vector<Event> events_of(const std::vector<GroundTruthEvent> & stream)
{
  std::vector<Event> out;
  out.reserve(stream.size());
  for (const auto & g : stream) {
    out.push_back(g.event);
  }
  return out;
}

}  // namespace pcaflow
