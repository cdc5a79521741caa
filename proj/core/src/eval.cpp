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

#include "pcaflow/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <tuple>

#include <json.hpp>

#include "pcaflow/errors.hpp"

namespace pcaflow
{
namespace
{
using Key = std::tuple<Microseconds, int, int, int>;

Key key_of(const Event & e) { return {e.t, e.x, e.y, polarity_sign(e.p)}; }

std::string describe(const Event & e)
{
  return "(t=" + std::to_string(e.t) + ", x=" + std::to_string(e.x) + ", y=" +
         std::to_string(e.y) + ", p=" + std::to_string(polarity_sign(e.p)) + ")";
}

nlohmann::json to_json(const MeanStd & m) { return {{"mean", m.mean}, {"std", m.std}}; }

std::string format_pm(const MeanStd & m, int precision)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f +- %.*f", precision, m.mean, precision, m.std);
  return buf;
}

}  // namespace

MeanStd mean_std(std::span<const double> values)
{
  if (values.empty()) {
    return {};
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) {
    sq += (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

std::vector<FlowPair> match_estimates(
  std::span<const FlowEvent> estimates, std::span<const GroundTruthEvent> truth)
{
  std::multimap<Key, const GroundTruthEvent *> index;
  for (const auto & g : truth) {
    index.emplace(key_of(g.event), &g);
  }
  std::vector<FlowPair> out;
  out.reserve(estimates.size());
  for (const FlowEvent & f : estimates) {
    const auto it = index.find(key_of(f.event));
    if (it == index.end()) {
      throw NoDataError("no ground truth for estimate " + describe(f.event));
    }
    const GroundTruthEvent & g = *it->second;
    index.erase(it);
    if (f.valid() && !g.is_noise) {
      out.push_back({f.vx, f.vy, g.gt_vx, g.gt_vy});
    }
  }
  return out;
}

AepeStats compute_aepe(std::span<const FlowPair> pairs)
{
  if (pairs.empty()) {
    throw NoDataError("no matched valid estimates to evaluate");
  }
  std::vector<double> abs_err;
  std::vector<double> rel_err;
  abs_err.reserve(pairs.size());
  rel_err.reserve(pairs.size());
  for (const FlowPair & p : pairs) {
    const double d = std::hypot(p.vx - p.gt_vx, p.vy - p.gt_vy);
    abs_err.push_back(d);
    const double g = std::hypot(p.gt_vx, p.gt_vy);
    if (g > 0.0) {
      rel_err.push_back(d / g);
    }
  }
  return {mean_std(abs_err), mean_std(rel_err), pairs.size()};
}

AaeStats compute_aae(std::span<const FlowPair> pairs)
{
  std::vector<double> deg;
  deg.reserve(pairs.size());
  std::size_t skipped = 0;
  for (const FlowPair & p : pairs) {
    const double nu = std::hypot(p.vx, p.vy);
    const double ng = std::hypot(p.gt_vx, p.gt_vy);
    if (!(nu > 0.0) || !(ng > 0.0)) {
      ++skipped;
      continue;
    }
    const double c = std::clamp((p.vx * p.gt_vx + p.vy * p.gt_vy) / (nu * ng), -1.0, 1.0);
    deg.push_back(std::acos(c) * 180.0 / std::numbers::pi);
  }
  if (deg.empty()) {
    throw NoDataError("no pairs with nonzero flow for angular error");
  }
  return {mean_std(deg), deg.size(), skipped};
}

FlowErrorStats flow_error_stats(std::span<const FlowPair> pairs)
{
  const AepeStats aepe = compute_aepe(pairs);
  const AaeStats aae = compute_aae(pairs);
  return {aepe.abs, aepe.rel, aae.deg, aepe.count, aae.skipped_zero};
}

std::optional<LifetimeBin> LifetimeHistogram::max_bin() const
{
  return max_bin_in(-INFINITY, INFINITY);
}

std::optional<LifetimeBin> LifetimeHistogram::max_bin_in(double lo_ms, double hi_ms) const
{
  std::optional<LifetimeBin> best;
  for (const LifetimeBin & b : bins) {
    if (b.center < lo_ms || b.center > hi_ms) {
      continue;
    }
    if (!best || b.count > best->count) {
      best = b;
    }
  }
  return best;
}

LifetimeHistogram lifetime_histogram(std::span<const double> lifetimes_ms, double bin_width_ms)
{
  if (!(bin_width_ms > 0.0)) {
    throw ConfigError("histogram bin width must be positive");
  }
  std::map<long long, std::size_t> counts;
  std::size_t total = 0;
  for (double l : lifetimes_ms) {
    if (!std::isfinite(l) || l < 0.0) {
      continue;
    }
    ++counts[std::llround(l / bin_width_ms)];
    ++total;
  }
  LifetimeHistogram h;
  h.bin_width = bin_width_ms;
  h.total = total;
  for (const auto & [k, c] : counts) {
    h.bins.push_back(
      {static_cast<double>(k) * bin_width_ms, c,
       static_cast<double>(c) / static_cast<double>(total)});
  }
  // Local maxima over the full bin grid; empty neighbors count as zero.
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    const auto left = counts.find(it->first - 1);
    const auto right = counts.find(it->first + 1);
    const std::size_t l = left == counts.end() ? 0 : left->second;
    const std::size_t r = right == counts.end() ? 0 : right->second;
    if (it->second >= l && it->second > r) {
      h.modes.push_back(
        {static_cast<double>(it->first) * bin_width_ms, it->second,
         static_cast<double>(it->second) / static_cast<double>(total)});
    }
  }
  std::stable_sort(h.modes.begin(), h.modes.end(), [](const LifetimeBin & a, const LifetimeBin & b) {
    return a.count > b.count;
  });
  return h;
}

LifetimeHistogram lifetime_histogram(std::span<const FlowEvent> estimates, double bin_width_ms)
{
  std::vector<double> l;
  l.reserve(estimates.size());
  for (const FlowEvent & f : estimates) {
    if (f.valid() && f.lifetime_ms) {
      l.push_back(*f.lifetime_ms);
    }
  }
  return lifetime_histogram(l, bin_width_ms);
}

TimingStats benchmark(const PipelineConfig & cfg, std::span<const Event> events, std::size_t warmup)
{
  if (events.size() <= warmup) {
    throw ConfigError(
      "stream of " + std::to_string(events.size()) + " events is not longer than warmup " +
      std::to_string(warmup));
  }
  FlowPipeline pipeline(cfg);
  std::vector<double> us;
  us.reserve(events.size() - warmup);
  std::chrono::nanoseconds elapsed{};
  for (std::size_t i = 0; i < events.size(); ++i) {
    const FlowEvent f = pipeline.process_timed(events[i], elapsed);
    if (i >= warmup && f.status != FlowStatus::Filtered) {
      us.push_back(static_cast<double>(elapsed.count()) / 1000.0);
    }
  }
  return {mean_std(us), us.size(), warmup};
}

EvalReport evaluate(
  std::span<const FlowEvent> estimates, std::span<const GroundTruthEvent> truth,
  double bin_width_ms, std::string label)
{
  EvalReport r;
  r.label = std::move(label);
  r.estimates = estimates.size();
  r.valid = static_cast<std::size_t>(
    std::count_if(estimates.begin(), estimates.end(), [](const FlowEvent & f) { return f.valid(); }));
  const std::vector<FlowPair> pairs = match_estimates(estimates, truth);
  r.errors = flow_error_stats(pairs);
  r.lifetimes = lifetime_histogram(estimates, bin_width_ms);
  return r;
}

std::string to_json(const EvalReport & report)
{
  nlohmann::ordered_json j;
  j["label"] = report.label;
  j["estimates"] = report.estimates;
  j["valid"] = report.valid;
  const FlowErrorStats & e = report.errors;
  j["errors"] = {
    {"count", e.count},
    {"aepe_abs_px_ms", to_json(e.aepe_abs)},
    {"aepe_rel", to_json(e.aepe_rel)},
    {"aae_deg", to_json(e.aae_deg)},
    {"aae_skipped", e.aae_skipped}};
  nlohmann::ordered_json bins = nlohmann::ordered_json::array();
  for (const LifetimeBin & b : report.lifetimes.bins) {
    bins.push_back({{"center_ms", b.center}, {"count", b.count}, {"fraction", b.fraction}});
  }
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  for (const LifetimeBin & b : report.lifetimes.modes) {
    modes.push_back({{"center_ms", b.center}, {"count", b.count}, {"fraction", b.fraction}});
  }
  nlohmann::ordered_json hist;
  hist["bin_width_ms"] = report.lifetimes.bin_width;
  hist["total"] = report.lifetimes.total;
  if (const auto m = report.lifetimes.max_bin()) {
    hist["max_bin"] = {{"center_ms", m->center}, {"fraction", m->fraction}};
  }
  hist["modes"] = std::move(modes);
  hist["bins"] = std::move(bins);
  j["lifetime_histogram"] = std::move(hist);
  if (report.timing) {
    j["timing"] = {
      {"per_event_us", to_json(report.timing->per_event_us)},
      {"events_measured", report.timing->events_measured},
      {"warmup_events", report.timing->warmup_events}};
  }
  return j.dump(2) + "\n";
}

std::string to_table(std::span<const EvalReport> reports)
{
  std::string out;
  char line[256];
  std::snprintf(
    line, sizeof line, "%-20s %-22s %-22s %-22s %10s\n", "run", "Magnitude (rel.)",
    "Magnitude (px/ms)", "Orientation (deg)", "count");
  out += line;
  for (const EvalReport & r : reports) {
    std::snprintf(
      line, sizeof line, "%-20s %-22s %-22s %-22s %10zu\n", r.label.c_str(),
      format_pm(r.errors.aepe_rel, 4).c_str(), format_pm(r.errors.aepe_abs, 4).c_str(),
      format_pm(r.errors.aae_deg, 3).c_str(), r.errors.count);
    out += line;
    if (const auto m = r.lifetimes.max_bin()) {
      std::snprintf(
        line, sizeof line, "%-20s max lifetime bin %.2f ms (%.2f%%)\n", "", m->center,
        100.0 * m->fraction);
      out += line;
    }
  }
  return out;
}

}  // namespace pcaflow
