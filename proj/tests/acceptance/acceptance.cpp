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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// (plus indented measurements) and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "pcaflow/eval.hpp"
#include "pcaflow/filtering.hpp"
#include "pcaflow/pipeline.hpp"
#include "pcaflow/regularize.hpp"
#include "pcaflow/sim.hpp"
#include "test_support.hpp"

namespace
{
using namespace pcaflow;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void verdict(int id, bool pass, const std::string & what)
{
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  g_failures += pass ? 0 : 1;
}

[[gnu::format(printf, 1, 2)]] void note(const char * fmt, ...)
{
  std::va_list args;
  va_start(args, fmt);
  std::printf("    ");
  std::vprintf(fmt, args);
  std::printf("\n");
  va_end(args);
}

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Lifetime identity, checked on every run that produces estimates; feeds
// criterion 6.
struct IdentityTally
{
  std::size_t checked{0};
  double worst{0.0};

  void add(const std::vector<FlowEvent> & flow)
  {
    for (const FlowEvent & f : flow) {
      if (f.valid()) {
        ++checked;
        const double dev = f.lifetime_ms ? std::abs(*f.lifetime_ms * std::hypot(f.vx, f.vy) - 1.0)
                                         : INFINITY;
        worst = std::max(worst, dev);
      }
    }
  }
} g_identity;

// --- 1 ----------------------------------------------------------------------

void exact_planes()
{
  const SensorGeometry g{240, 180};
  const double angle = 30.0 * std::numbers::pi / 180.0;
  bool pass = true;
  std::size_t total = 0;
  double elapsed = 0.0;
  for (double v : {0.5, 2.0, 5.0}) {
    const SceneSpec spec = testing::edge_scene(
      v * std::cos(angle), v * std::sin(angle), g, static_cast<Microseconds>(300.0 / v * 1000.0));
    const auto truth = generate(spec, 1);
    PipelineConfig cfg;
    cfg.geometry = g;
    const auto events = events_of(truth);
    const auto t0 = Clock::now();
    const auto flow = run_pipeline(cfg, events);
    elapsed += seconds_since(t0);
    g_identity.add(flow);
    const EvalReport r = evaluate(flow, truth);
    total += r.errors.count;
    const bool ok = r.errors.aepe_rel.mean < 0.01 && r.errors.aae_deg.mean < 1.0;
    pass = pass && ok;
    note(
      "v=%.1f px/ms: %zu events, %zu valid, AEPE_rel %.3g, AAE %.3g deg", v, events.size(),
      r.errors.count, r.errors.aepe_rel.mean, r.errors.aae_deg.mean);
  }
  pass = pass && total >= 10'000 && elapsed < 5.0;
  char buf[160];
  std::snprintf(
    buf, sizeof buf, "exact planes: %zu valid estimates, pipeline time %.2f s", total, elapsed);
  verdict(1, pass, buf);
}

// --- 2 ----------------------------------------------------------------------

void oracle_equivalence()
{
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> slope(-1.0, 1.0);
  std::uniform_int_distribution<int> count(5, 9);  // plus the anchor -> 6..10

  int clean_ok = 0, degenerate = 0;
  int removed = 0, removed_alone = 0, refit = 0, refit_ok = 0;
  double worst_clean = 0.0, worst_refit = 0.0;
  constexpr int kTrials = 1000;
  for (int i = 0; i < kTrials; ++i) {
    const auto clean = testing::noisy_plane_patch(rng, count(rng) + 1, slope(rng), slope(rng), 0.02);
    const PlaneFit f = fit_plane(clean, clean[0]);
    if (f.degenerate) {
      ++degenerate;
      continue;
    }
    const double a = testing::line_angle(f.normal, testing::oracle_normal(clean));
    worst_clean = std::max(worst_clean, a);
    clean_ok += a < 1e-6;

    // Default delta rule on the clean set, outlier displaced by 10 delta on
    // the last point, one consensus pass, refit on what survives.
    const auto [lo, hi] = std::minmax_element(
      clean.begin(), clean.end(), [](const Point3 & p, const Point3 & q) { return p.t < q.t; });
    const double delta = std::max(0.25 * (hi->t - lo->t), 0.1);
    std::vector<Point3> dirty = clean;
    dirty.back().t += (rng() % 2 ? 10.0 : -10.0) * delta;
    const PlaneFit fd = fit_plane(dirty, dirty[0]);
    const auto mask = consensus_inliers(fd, dirty, delta);
    std::vector<Point3> kept;
    for (std::size_t k = 0; k < dirty.size(); ++k) {
      if (mask[k]) {
        kept.push_back(dirty[k]);
      }
    }
    if (mask.back()) {
      continue;
    }
    ++removed;
    removed_alone += kept.size() == clean.size();
    if (kept.size() < 3) {
      continue;
    }
    ++refit;
    const PlaneFit fk = fit_plane(kept, kept.front());
    const double b = testing::line_angle(fk.normal, testing::oracle_normal(kept));
    worst_refit = std::max(worst_refit, b);
    refit_ok += b < 1e-6;
  }
  note(
    "clean: %d/%d within 1e-6 rad (worst %.2e rad), %d degenerate", clean_ok, kTrials,
    worst_clean, degenerate);
  note(
    "outlier at 10 delta: flagged in %d/%d, flagged with every clean point kept in %d/%d",
    removed, kTrials, removed_alone, kTrials);
  note(
    "refit on survivors possible (>= 3 points) in %d/%d, within 1e-6 rad in %d/%d (worst %.2e rad)",
    refit, kTrials, refit_ok, refit, worst_refit);
  const bool pass = degenerate == 0 && clean_ok == kTrials && refit_ok == kTrials;
  verdict(2, pass, "PCA normal vs total-least-squares oracle, with and without one outlier removed by consensus");
}

// --- 3 and 5 share one noisy translation stream ------------------------------

struct NoisyScene
{
  SensorGeometry geometry{480, 360};
  std::vector<GroundTruthEvent> truth;
  std::vector<Event> events;
  double noise_hz{0.0};
};

NoisyScene noisy_translation()
{
  NoisyScene s;
  const double angle = 30.0 * std::numbers::pi / 180.0;
  SceneSpec spec = testing::edge_scene(2.0 * std::cos(angle), 2.0 * std::sin(angle), s.geometry, 300'000);
  const std::size_t signal = generate(spec, 11).size();
  s.noise_hz = 0.1 * static_cast<double>(signal) / 0.3;
  spec.noise.rate_hz = s.noise_hz;
  s.truth = generate(spec, 11);
  s.events = events_of(s.truth);
  return s;
}

struct Variant
{
  const char * name;
  EstimatorKind est;
  RegularizerKind reg;
};

constexpr Variant kVariants[] = {
  {"leveled-PCA", EstimatorKind::Pca, RegularizerKind::Leveled},
  {"weighted-PCA", EstimatorKind::Pca, RegularizerKind::Weighted},
  {"PCA-only", EstimatorKind::Pca, RegularizerKind::None},
  {"plane-fitting", EstimatorKind::PlaneFit, RegularizerKind::None},
  {"LK", EstimatorKind::LucasKanade, RegularizerKind::None},
};

PipelineConfig config_for(const NoisyScene & s, const Variant & v)
{
  PipelineConfig cfg;
  cfg.geometry = s.geometry;
  cfg.estimator = v.est;
  cfg.regularizer = v.reg;
  return cfg;
}

void noise_ordering(const NoisyScene & s)
{
  note("stream: %zu events, noise %.0f ev/s (10%% of signal)", s.events.size(), s.noise_hz);
  std::vector<double> rel, aae;
  for (const Variant & v : kVariants) {
    const auto flow = run_pipeline(config_for(s, v), s.events);
    g_identity.add(flow);
    const EvalReport r = evaluate(flow, s.truth);
    rel.push_back(r.errors.aepe_rel.mean);
    aae.push_back(r.errors.aae_deg.mean);
    note(
      "%-14s valid %7zu  AEPE_rel %.4e +- %.2e  AAE %.4e +- %.2e deg", v.name, r.errors.count,
      r.errors.aepe_rel.mean, r.errors.aepe_rel.std, r.errors.aae_deg.mean, r.errors.aae_deg.std);
  }
  bool ordered = true;
  for (std::size_t i = 1; i < std::size(kVariants); ++i) {
    if (!(rel[i - 1] <= rel[i])) {
      ordered = false;
      note("AEPE_rel ordering broken: %s > %s", kVariants[i - 1].name, kVariants[i].name);
    }
  }
  const bool weighted_best = aae[1] <= aae[0] && aae[1] <= aae[2];
  if (!weighted_best) {
    note("AAE: weighted-PCA is not the best PCA variant");
  }
  verdict(
    3, ordered && weighted_best,
    "noise robustness: AEPE_rel leveled <= weighted <= PCA <= plane <= LK, weighted best AAE");
}

// --- 4 ----------------------------------------------------------------------

void lifetime_modes()
{
  const SensorGeometry g{160, 120};
  StripesOptions opts;
  opts.spacing_px = 8.0;
  opts.noise.rate_hz = 20'000;
  opts.seed = 4;
  const auto truth = two_speed_stripes(1.0 / 6.0, 1.0 / 12.0, g, 1'000'000, opts);
  const auto events = events_of(truth);
  note("stream: %zu events", events.size());

  bool pass = true;
  for (auto [name, reg, tol] :
       {std::tuple{"PCA-only", RegularizerKind::None, 0.10},
        std::tuple{"weighted-PCA", RegularizerKind::Weighted, 0.08}}) {
    PipelineConfig cfg;
    cfg.geometry = g;
    cfg.regularizer = reg;
    // At 6 and 12 ms per pixel the default support window is too short for
    // the activity filter to see coeval neighbors.
    cfg.filter.adaptive.t_min_us = 15'000;
    cfg.filter.adaptive.t_max_us = 30'000;
    const auto flow = run_pipeline(cfg, events);
    g_identity.add(flow);
    const LifetimeHistogram h = lifetime_histogram(flow, 0.1);
    // Split the lifetime axis between the two ground-truth modes.
    const double split = std::sqrt(6.0 * 12.0);
    const auto slow = h.max_bin_in(0.0, split);
    const auto fast = h.max_bin_in(split, INFINITY);
    const double e6 = slow ? std::abs(slow->center - 6.0) / 6.0 : INFINITY;
    const double e12 = fast ? std::abs(fast->center - 12.0) / 12.0 : INFINITY;
    note(
      "%-12s max bins %.2f ms (%.2f%% err) and %.2f ms (%.2f%% err), tolerance %.0f%%", name,
      slow ? slow->center : NAN, 100 * e6, fast ? fast->center : NAN, 100 * e12, 100 * tol);
    pass = pass && e6 <= tol && e12 <= tol;
  }
  verdict(4, pass, "two-speed stripes recover the 6 ms and 12 ms lifetime modes");
}

// --- 5 ----------------------------------------------------------------------

double median_time_us(const PipelineConfig & cfg, const std::vector<Event> & events, int reps)
{
  std::vector<double> means;
  for (int i = 0; i < reps; ++i) {
    means.push_back(benchmark(cfg, events, 1000).per_event_us.mean);
  }
  std::sort(means.begin(), means.end());
  return means[means.size() / 2];
}

void timing_bands(const NoisyScene & s)
{
  constexpr int kReps = 3;
  const double pca = median_time_us(config_for(s, kVariants[2]), s.events, kReps);
  const double plane = median_time_us(config_for(s, kVariants[3]), s.events, kReps);
  const double lk = median_time_us(config_for(s, kVariants[4]), s.events, kReps);
  const double leveled = median_time_us(config_for(s, kVariants[0]), s.events, kReps);
  const double r_plane = plane / pca, r_lk = lk / pca, r_lev = leveled / pca;
  note("stream: %zu events; median of %d runs, us/event", s.events.size(), kReps);
  note("PCA-only %.4f  plane-fitting %.4f  LK %.4f  leveled-PCA %.4f", pca, plane, lk, leveled);
  note("plane/PCA %.2f (need >= 2)  LK/PCA %.2f (need >= 3)  leveled/PCA %.2f (need 1.5..4)",
       r_plane, r_lk, r_lev);
  const bool pass =
    s.events.size() >= 100'000 && r_plane >= 2.0 && r_lk >= 3.0 && r_lev >= 1.5 && r_lev <= 4.0;
  verdict(5, pass, "per-event timing ratios");
}

// --- 6 ----------------------------------------------------------------------

void identities(const NoisyScene & s)
{
  // Weighted outputs against the flows that went into them.
  PcaEstimator pca;
  EventFilter filter(s.geometry);
  WeightedConfig wcfg;
  WeightedRegularizer reg(s.geometry, wcfg);
  std::vector<FlowSample> contrib;
  std::size_t fused = 0, outside = 0;
  for (const Event & e : s.events) {
    if (!filter.accept(e)) {
      continue;
    }
    const FlowEvent raw = pca.estimate(e, filter.surface());
    if (!raw.valid()) {
      continue;
    }
    reg.buffer().gather(e, wcfg.m, wcfg.max_age_us, contrib);
    double lo_x = raw.vx, hi_x = raw.vx, lo_y = raw.vy, hi_y = raw.vy;
    for (const FlowSample & c : contrib) {
      lo_x = std::min(lo_x, c.vx), hi_x = std::max(hi_x, c.vx);
      lo_y = std::min(lo_y, c.vy), hi_y = std::max(hi_y, c.vy);
    }
    const FlowEvent out = reg.apply(raw);
    ++fused;
    const double tol = 1e-12 * (1.0 + std::max(std::abs(hi_x - lo_x), std::abs(hi_y - lo_y)));
    if (out.vx < lo_x - tol || out.vx > hi_x + tol || out.vy < lo_y - tol || out.vy > hi_y + tol) {
      ++outside;
    }
  }

  std::mt19937_64 rng(6);
  double worst_residual = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const SymMatrix3 m = testing::random_psd(rng);
    const SmallestEigenpair e = smallest_eigenpair(m);
    const double r = (m * e.vector - e.vector * e.values[2]).norm() / e.values[0];
    worst_residual = std::max(worst_residual, r);
  }

  note("lifetime x |flow|: %zu valid estimates, worst deviation %.2e", g_identity.checked, g_identity.worst);
  note("weighted convexity: %zu fused estimates, %zu outside their inputs", fused, outside);
  note("eigen residual / lambda1 over 1e4 PSD matrices: worst %.2e", worst_residual);
  const bool pass = g_identity.checked > 0 && g_identity.worst <= 1e-9 && fused > 0 &&
                    outside == 0 && worst_residual <= 1e-9;
  verdict(6, pass, "identity invariants");
}

// --- 7 ----------------------------------------------------------------------

void filter_efficacy()
{
  const SensorGeometry g{480, 360};
  SceneSpec noise_only = testing::edge_scene(1.0, 0.0, g, 10'000'000, 1000.0);
  std::vector<Event> noise;
  for (const auto & e : generate(noise_only, 7)) {
    if (e.is_noise) {
      noise.push_back(e.event);
    }
  }
  const FilterResult rn = filter_stream(noise, g);
  const double rejected = static_cast<double>(rn.rejected.size()) / static_cast<double>(noise.size());

  const double angle = 30.0 * std::numbers::pi / 180.0;
  const auto edge =
    events_of(generate(testing::edge_scene(2.0 * std::cos(angle), 2.0 * std::sin(angle), g, 200'000), 7));
  EventFilter f(g);
  constexpr Microseconds kWarmup = 10'000;
  std::size_t seen = 0, passed = 0;
  for (const Event & e : edge) {
    const bool ok = f.accept(e);
    if (e.t >= kWarmup) {
      ++seen;
      passed += ok;
    }
  }
  const double pass_rate = static_cast<double>(passed) / static_cast<double>(seen);
  note("pure noise at 1e3 ev/s: %zu events, %.2f%% rejected", noise.size(), 100 * rejected);
  note("noiseless edge after %lld us warm-up: %zu events, %.2f%% passed", static_cast<long long>(kWarmup), seen, 100 * pass_rate);
  verdict(7, rejected >= 0.95 && pass_rate >= 0.95, "adaptive activity filter efficacy");
}

// --- 8 ----------------------------------------------------------------------

std::string slurp(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

bool run_cli(const std::vector<std::string> & args)
{
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) {
    note("command failed (%d): %s", code, err.str().c_str());
  }
  return code == 0;
}

std::vector<std::string> full_run(const testing::TempDir & d)
{
  const std::vector<std::string> geom{"--set", "geometry.width=160", "--set", "geometry.height=120"};
  auto cmd = [&](std::vector<std::string> a) {
    a.insert(a.end(), geom.begin(), geom.end());
    return run_cli(a);
  };
  std::vector<std::string> files{d.file("events.bin"), d.file("events.gt.csv")};
  bool ok = cmd(
    {"simulate", "--pattern", "rotating", "--omega", "4", "--duration", "400ms", "--noise-rate",
     "5000", "--jitter-us", "20", "--seed", "7", "--out", d.file("events.bin")});
  std::vector<std::string> flows;
  for (const char * reg : {"none", "weighted", "leveled"}) {
    const std::string out = d.file(std::string("flow_") + reg + ".csv");
    ok = ok && cmd({"flow", "--in", d.file("events.bin"), "--out", out, "--regularizer", reg});
    flows.push_back(out);
    files.push_back(out);
  }
  for (const char * est : {"plane", "lk"}) {
    const std::string out = d.file(std::string("flow_") + est + ".csv");
    ok = ok && cmd({"flow", "--in", d.file("events.bin"), "--out", out, "--estimator", est});
    flows.push_back(out);
    files.push_back(out);
  }
  std::vector<std::string> eval{"eval", "--gt", d.file("events.gt.csv"), "--report", d.file("report.json")};
  for (const auto & f : flows) {
    eval.push_back("--flow");
    eval.push_back(f);
  }
  ok = ok && run_cli(eval);
  files.push_back(d.file("report.json"));
  if (!ok) {
    return {};
  }
  std::vector<std::string> contents;
  for (const auto & f : files) {
    contents.push_back(slurp(f));
  }
  return contents;
}

void determinism()
{
  testing::TempDir a("accept-a"), b("accept-b");
  const auto ra = full_run(a);
  const auto rb = full_run(b);
  std::size_t bytes = 0;
  for (const auto & c : ra) {
    bytes += c.size();
  }
  const bool pass = !ra.empty() && ra == rb;
  note("simulate -> flow (5 variants) -> eval twice: %zu files, %zu bytes each run", ra.size(), bytes);
  verdict(8, pass, "byte-identical outputs across two runs with the same seed and config");
}

}  // namespace

int main()
{
  const auto t0 = Clock::now();
  exact_planes();
  oracle_equivalence();
  const NoisyScene scene = noisy_translation();
  noise_ordering(scene);
  lifetime_modes();
  timing_bands(scene);
  identities(scene);
  filter_efficacy();
  determinism();
  std::printf("%d of 8 criteria failed (%.1f s)\n", g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
