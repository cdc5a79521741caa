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

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pcaflow/config.hpp"
#include "pcaflow/errors.hpp"
#include "pcaflow/eval.hpp"
#include "pcaflow/io.hpp"
#include "pcaflow/pipeline.hpp"
#include "pcaflow/sim.hpp"

namespace pcaflow::cli
{
namespace
{
namespace fs = std::filesystem;

constexpr std::size_t kMinBenchEvents = 10'000;

struct ConfigArgs
{
  std::string file;
  std::vector<std::string> overrides;

  void add_to(CLI::App & app)
  {
    app.add_option("--config", file, "key = value config file");
    app.add_option("--set", overrides, "override one config key, key=value")->take_all();
  }

  RunConfig resolve() const
  {
    RunConfig cfg = file.empty() ? RunConfig{} : RunConfig::load(file);
    for (const auto & o : overrides) {
      cfg.apply_override(o);
    }
    return cfg;
  }
};

std::vector<double> parse_list(const std::string & text, const char * what)
{
  std::vector<double> out;
  std::string_view s = text;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const std::string_view item = s.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw ConfigError(std::string("bad ") + what + " list '" + text + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) {
      break;
    }
    s.remove_prefix(comma + 1);
  }
  if (out.empty()) {
    throw ConfigError(std::string("empty ") + what + " list");
  }
  return out;
}

fs::path default_truth_path(const fs::path & events)
{
  fs::path p = events;
  p.replace_extension();
  p += ".gt.csv";
  return p;
}

std::ofstream open_out(const fs::path & path, bool binary = false)
{
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw DataError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs
{
  ConfigArgs config;
  std::string pattern;
  std::string speeds;
  std::string lifetimes;
  double spacing{8.0};
  double vx{1.0};
  double vy{0.0};
  double omega{3.0};
  std::optional<double> cx;
  std::optional<double> cy;
  std::string duration{"1s"};
  int contrast{1};
  double noise_rate{0.0};
  double jitter_us{0.0};
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string gt;
};

int cmd_simulate(const SimulateArgs & a, std::ostream & out)
{
  RunConfig cfg = a.config.resolve();
  if (a.seed) {
    cfg.seed = *a.seed;
  }
  SceneSpec spec;
  spec.geometry = cfg.pipeline.geometry;
  spec.duration_us = parse_duration_us(a.duration);
  spec.contrast_threshold = a.contrast;
  spec.noise = {a.noise_rate, a.jitter_us};
  if (a.pattern == "stripes") {
    StripesPattern s;
    s.spacing_px = a.spacing;
    if (!a.speeds.empty() && !a.lifetimes.empty()) {
      throw ConfigError("give either --speeds or --lifetimes, not both");
    }
    if (!a.lifetimes.empty()) {
      s.speeds_px_ms.clear();
      for (double l : parse_list(a.lifetimes, "lifetime")) {
        if (!(l > 0.0)) {
          throw ConfigError("lifetimes must be positive");
        }
        s.speeds_px_ms.push_back(1.0 / l);
      }
    } else if (!a.speeds.empty()) {
      s.speeds_px_ms = parse_list(a.speeds, "speed");
    }
    spec.pattern = s;
  } else if (a.pattern == "edge") {
    spec.pattern = TranslatingEdge{a.vx, a.vy};
  } else if (a.pattern == "rotating") {
    spec.pattern = RotatingBar{
      a.omega, a.cx.value_or(0.5 * (spec.geometry.width - 1)),
      a.cy.value_or(0.5 * (spec.geometry.height - 1))};
  } else {
    throw ConfigError("unknown pattern '" + a.pattern + "' (expected stripes, edge or rotating)");
  }

  const std::vector<GroundTruthEvent> stream = generate(spec, cfg.seed);
  const fs::path events_path = a.out;
  const fs::path truth_path = a.gt.empty() ? default_truth_path(events_path) : fs::path(a.gt);
  const EventFormat format = format_for_path(events_path);
  {
    std::ofstream ev = open_out(events_path, format == EventFormat::Binary);
    EventWriter w(ev, format);
    for (const auto & g : stream) {
      w.write(g.event);
    }
  }
  {
    std::ofstream gt = open_out(truth_path);
    write_ground_truth(gt, stream);
  }
  out << "wrote " << stream.size() << " events to " << events_path.string() << " and ground truth to "
      << truth_path.string() << "\n";
  return kExitOk;
}

// --- flow -------------------------------------------------------------------

struct FlowArgs
{
  ConfigArgs config;
  std::string in;
  std::string out;
  std::string estimator;
  std::string regularizer;
};

int cmd_flow(const FlowArgs & a, std::ostream & out)
{
  RunConfig cfg = a.config.resolve();
  if (!a.estimator.empty()) {
    cfg.pipeline.estimator = parse_estimator(a.estimator);
  }
  if (!a.regularizer.empty()) {
    cfg.pipeline.regularizer = parse_regularizer(a.regularizer);
  }
  cfg.validate();

  const fs::path in_path = a.in;
  const EventFormat format = format_for_path(in_path);
  std::ifstream in(in_path, format == EventFormat::Binary ? std::ios::binary : std::ios::in);
  if (!in) {
    throw DataError("cannot open '" + in_path.string() + "' for reading");
  }
  std::ofstream fo = open_out(a.out);
  EventReader reader(in, format);
  FlowWriter writer(fo);
  FlowPipeline pipeline(cfg.pipeline);
  std::size_t total = 0;
  std::size_t valid = 0;
  while (const auto e = reader.next()) {
    const FlowEvent f = pipeline.process(*e);
    writer.write(f);
    ++total;
    valid += f.valid() ? 1 : 0;
  }
  out << "processed " << total << " events, " << valid << " valid estimates ("
      << to_string(cfg.pipeline.estimator) << "/" << to_string(cfg.pipeline.regularizer) << ")\n";
  return kExitOk;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs
{
  std::vector<std::string> flows;
  std::vector<std::string> labels;
  std::string gt;
  std::string report;
  std::optional<double> bin_width;
};

int cmd_eval(const EvalArgs & a, std::ostream & out)
{
  if (!a.labels.empty() && a.labels.size() != a.flows.size()) {
    throw ConfigError("--label must be given once per --flow");
  }
  const double bin = a.bin_width.value_or(0.1);
  if (!(bin > 0.0)) {
    throw ConfigError("--bin-width must be positive");
  }
  const std::vector<GroundTruthEvent> truth = read_ground_truth(fs::path(a.gt));
  std::vector<EvalReport> reports;
  for (std::size_t i = 0; i < a.flows.size(); ++i) {
    const std::vector<FlowEvent> flow = read_flow(fs::path(a.flows[i]));
    const std::string label =
      a.labels.empty() ? fs::path(a.flows[i]).stem().string() : a.labels[i];
    reports.push_back(evaluate(flow, truth, bin, label));
  }
  out << to_table(reports);
  if (!a.report.empty()) {
    std::ofstream r = open_out(a.report);
    if (reports.size() == 1) {
      r << to_json(reports.front());
    } else {
      r << "[\n";
      for (std::size_t i = 0; i < reports.size(); ++i) {
        r << to_json(reports[i]) << (i + 1 < reports.size() ? ",\n" : "");
      }
      r << "]\n";
    }
  }
  return kExitOk;
}

// --- bench ------------------------------------------------------------------

struct BenchArgs
{
  ConfigArgs config;
  std::string in;
  std::string estimators{"pca,plane,lk"};
  std::optional<std::size_t> warmup;
};

// "pca", "plane", "lk", or "pca+weighted" / "pca+leveled".
PipelineConfig pipeline_for(const PipelineConfig & base, const std::string & name)
{
  PipelineConfig cfg = base;
  const auto plus = name.find('+');
  cfg.estimator = parse_estimator(name.substr(0, plus));
  cfg.regularizer = plus == std::string::npos ? RegularizerKind::None
                                              : parse_regularizer(name.substr(plus + 1));
  cfg.validate();
  return cfg;
}

int cmd_bench(const BenchArgs & a, std::ostream & out)
{
  RunConfig cfg = a.config.resolve();
  if (a.warmup) {
    cfg.bench_warmup = *a.warmup;
  }
  std::vector<std::string> names;
  {
    std::string_view s = a.estimators;
    while (!s.empty()) {
      const auto comma = s.find(',');
      names.emplace_back(s.substr(0, comma));
      if (comma == std::string_view::npos) {
        break;
      }
      s.remove_prefix(comma + 1);
    }
  }
  if (names.empty()) {
    throw ConfigError("no estimators given");
  }
  std::vector<PipelineConfig> pipelines;
  for (const auto & n : names) {
    pipelines.push_back(pipeline_for(cfg.pipeline, n));
  }

  const std::vector<Event> events = read_events(fs::path(a.in));
  if (events.size() < cfg.bench_warmup + kMinBenchEvents) {
    throw ConfigError(
      "bench needs at least warmup + " + std::to_string(kMinBenchEvents) + " = " +
      std::to_string(cfg.bench_warmup + kMinBenchEvents) + " events, got " +
      std::to_string(events.size()));
  }

  std::vector<TimingStats> stats;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %22s %12s\n", "estimator", "us/event (mean +- std)", "measured");
  out << line;
  for (std::size_t i = 0; i < names.size(); ++i) {
    stats.push_back(benchmark(pipelines[i], events, cfg.bench_warmup));
    const TimingStats & s = stats.back();
    std::snprintf(
      line, sizeof line, "%-16s %10.4f +- %-8.4f %12zu\n", names[i].c_str(), s.per_event_us.mean,
      s.per_event_us.std, s.events_measured);
    out << line;
  }
  if (names.size() > 1) {
    out << "ratios (row / column mean time):\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = 0; j < names.size(); ++j) {
        if (i == j) {
          continue;
        }
        std::snprintf(
          line, sizeof line, "  %s / %s = %.3f\n", names[i].c_str(), names[j].c_str(),
          stats[i].per_event_us.mean / stats[j].per_event_us.mean);
        out << line;
      }
    }
  }
  return kExitOk;
}

// --- config -----------------------------------------------------------------

int cmd_config(const ConfigArgs & a, std::ostream & out)
{
  const RunConfig cfg = a.resolve();
  cfg.validate();
  out << cfg.to_text();
  return kExitOk;
}

}  // namespace

long long parse_duration_us(const std::string & text)
{
  std::string_view s = text;
  long long scale = 1;
  if (s.size() > 2 && s.substr(s.size() - 2) == "us") {
    s.remove_suffix(2);
  } else if (s.size() > 2 && s.substr(s.size() - 2) == "ms") {
    s.remove_suffix(2);
    scale = 1000;
  } else if (s.size() > 1 && s.back() == 's') {
    s.remove_suffix(1);
    scale = 1'000'000;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !(v > 0.0)) {
    throw ConfigError("bad duration '" + text + "'");
  }
  return std::llround(v * static_cast<double>(scale));
}

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Per-event optical flow for event cameras", "pcaflow"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto * s = app.add_subcommand("simulate", "generate a synthetic event stream with ground truth");
  sim.config.add_to(*s);
  s->add_option("--pattern", sim.pattern, "stripes | edge | rotating")->required();
  s->add_option("--speeds", sim.speeds, "stripe speeds in px/ms, comma separated");
  s->add_option("--lifetimes", sim.lifetimes, "stripe lifetimes in ms, comma separated");
  s->add_option("--spacing", sim.spacing, "stripe edge spacing in px");
  s->add_option("--vx", sim.vx, "edge velocity x, px/ms");
  s->add_option("--vy", sim.vy, "edge velocity y, px/ms");
  s->add_option("--omega", sim.omega, "rotation speed, rad/s");
  s->add_option("--cx", sim.cx, "rotation center x (default: sensor center)");
  s->add_option("--cy", sim.cy, "rotation center y (default: sensor center)");
  s->add_option("--duration", sim.duration, "e.g. 1s, 250ms, 5000us");
  s->add_option("--contrast", sim.contrast, "events per edge crossing");
  s->add_option("--noise-rate", sim.noise_rate, "uniform noise, events/s");
  s->add_option("--jitter-us", sim.jitter_us, "timestamp jitter std, us");
  s->add_option("--seed", sim.seed, "random seed (overrides config)");
  s->add_option("--out", sim.out, "event file (.csv or .bin)")->required();
  s->add_option("--gt", sim.gt, "ground-truth CSV (default: <out>.gt.csv)");

  FlowArgs flow;
  auto * f = app.add_subcommand("flow", "estimate per-event flow");
  flow.config.add_to(*f);
  f->add_option("--in", flow.in, "event file")->required();
  f->add_option("--out", flow.out, "flow CSV")->required();
  f->add_option("--estimator", flow.estimator, "pca | plane | lk");
  f->add_option("--regularizer", flow.regularizer, "none | weighted | leveled");

  EvalArgs ev;
  auto * e = app.add_subcommand("eval", "compare flow files against ground truth");
  e->add_option("--flow", ev.flows, "flow CSV, repeatable")->required();
  e->add_option("--label", ev.labels, "row label per --flow");
  e->add_option("--gt", ev.gt, "ground-truth CSV")->required();
  e->add_option("--report", ev.report, "JSON report path");
  e->add_option("--bin-width", ev.bin_width, "lifetime histogram bin, ms");

  BenchArgs bench;
  auto * b = app.add_subcommand("bench", "time per-event estimation");
  bench.config.add_to(*b);
  b->add_option("--in", bench.in, "event file")->required();
  b->add_option("--estimators", bench.estimators, "comma list of pca, plane, lk, pca+weighted, pca+leveled");
  b->add_option("--warmup", bench.warmup, "events excluded from timing (overrides config)");

  ConfigArgs show;
  auto * c = app.add_subcommand("config", "print the resolved configuration");
  show.add_to(*c);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError & pe) {
    err << "usage error: " << pe.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (s->parsed()) {
      return cmd_simulate(sim, out);
    }
    if (f->parsed()) {
      return cmd_flow(flow, out);
    }
    if (e->parsed()) {
      return cmd_eval(ev, out);
    }
    if (b->parsed()) {
      return cmd_bench(bench, out);
    }
    if (c->parsed()) {
      return cmd_config(show, out);
    }
  } catch (const ConfigError & x) {
    err << "config error: " << x.what() << "\n";
    return kExitUsage;
  } catch (const DataError & x) {
    err << "data error: " << x.what() << "\n";
    return kExitData;
  } catch (const NumericError & x) {
    err << "numeric error: " << x.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception & x) {
    err << "error: " << x.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace pcaflow::cli
