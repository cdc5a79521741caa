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

// Micro benchmarks of the per-event estimators on a snapshot of a moving
// edge. Each iteration estimates one probe event against a frozen surface.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pcaflow/baselines.hpp"
#include "pcaflow/filtering.hpp"
#include "pcaflow/linalg.hpp"
#include "pcaflow/pca_flow.hpp"
#include "pcaflow/regularize.hpp"
#include "pcaflow/sim.hpp"

namespace
{
using namespace pcaflow;

struct Snapshot
{
  SensorGeometry geometry{240, 180};
  ActiveSurface surface{geometry};
  EventHistory history{geometry};
  std::vector<Event> probes;

  Snapshot()
  {
    SceneSpec spec;
    spec.geometry = geometry;
    spec.pattern = TranslatingEdge{1.732, 1.0};
    spec.duration_us = 80'000;
    const std::vector<Event> events = events_of(generate(spec, 1));
    for (const Event & e : events) {
      surface.update(e);
      history.record(e);
    }
    // The newest events sit on the leading edge, where estimates are valid.
    const std::size_t n = std::min<std::size_t>(1024, events.size());
    probes.assign(events.end() - static_cast<std::ptrdiff_t>(n), events.end());
  }
};

const Snapshot & snapshot()
{
  static const Snapshot s;
  return s;
}

void BM_SmallestEigenpair(benchmark::State & state)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<SymMatrix3> ms;
  for (int i = 0; i < 256; ++i) {
    const Vec3 a{g(rng), g(rng), g(rng)};
    const Vec3 b{g(rng), g(rng), g(rng)};
    const Vec3 c{g(rng), g(rng), g(rng)};
    ms.push_back({
      a.x * a.x + b.x * b.x + c.x * c.x, a.x * a.y + b.x * b.y + c.x * c.y,
      a.x * a.z + b.x * b.z + c.x * c.z, a.y * a.y + b.y * b.y + c.y * c.y,
      a.y * a.z + b.y * b.z + c.y * c.z, a.z * a.z + b.z * b.z + c.z * c.z});
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smallest_eigenpair(ms[i++ & 255]));
  }
}
BENCHMARK(BM_SmallestEigenpair);

void BM_JacobiEigenpair(benchmark::State & state)
{
  const SymMatrix3 m{4.0, 1.0, 0.5, 3.0, 0.25, 0.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(jacobi_smallest_eigenpair(m));
  }
}
BENCHMARK(BM_JacobiEigenpair);

void BM_Neighborhood(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  std::vector<SpacetimePoint> out;
  out.reserve(49);
  std::size_t i = 0;
  for (auto _ : state) {
    s.surface.neighborhood(s.probes[i++ % s.probes.size()], 7, 30'000, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Neighborhood);

void BM_PcaEstimate(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  PcaConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  PcaEstimator est(cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.estimate(s.probes[i++ % s.probes.size()], s.surface));
  }
}
BENCHMARK(BM_PcaEstimate)->Arg(3)->Arg(5)->Arg(7)->Arg(9);

void BM_LeveledEstimate(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  LeveledEstimator est(PcaConfig{}, LeveledConfig{});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.estimate(s.probes[i++ % s.probes.size()], s.surface));
  }
}
BENCHMARK(BM_LeveledEstimate);

void BM_WeightedEstimate(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  PcaEstimator est;
  WeightedRegularizer reg(s.geometry, WeightedConfig{});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reg.apply(est.estimate(s.probes[i++ % s.probes.size()], s.surface)));
  }
}
BENCHMARK(BM_WeightedEstimate);

void BM_PlaneFitEstimate(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  PlaneFitEstimator est;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.estimate(s.probes[i++ % s.probes.size()], s.surface));
  }
}
BENCHMARK(BM_PlaneFitEstimate);

void BM_LucasKanadeEstimate(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  LucasKanadeEstimator est;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.estimate(s.probes[i++ % s.probes.size()], s.history));
  }
}
BENCHMARK(BM_LucasKanadeEstimate);

void BM_FilterAccept(benchmark::State & state)
{
  SceneSpec spec;
  spec.geometry = {240, 180};
  spec.pattern = TranslatingEdge{1.732, 1.0};
  spec.duration_us = 80'000;
  spec.noise.rate_hz = 100'000;
  const std::vector<Event> events = events_of(generate(spec, 2));
  for (auto _ : state) {
    state.PauseTiming();
    EventFilter filter(spec.geometry);
    state.ResumeTiming();
    for (const Event & e : events) {
      benchmark::DoNotOptimize(filter.accept(e));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}
BENCHMARK(BM_FilterAccept)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
