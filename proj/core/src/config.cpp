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

#include "pcaflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <type_traits>

#include "pcaflow/errors.hpp"
#include "pcaflow/io.hpp"

namespace pcaflow
{
namespace
{
std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value)
{
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
}

template <class T>
T parse_value(std::string_view key, std::string_view s)
{
  if constexpr (std::is_same_v<T, bool>) {
    if (s == "true" || s == "1" || s == "on") {
      return true;
    }
    if (s == "false" || s == "0" || s == "off") {
      return false;
    }
    bad_value(key, s);
  } else {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      bad_value(key, s);
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(v)) {
        bad_value(key, s);
      }
    }
    return v;
  }
}

template <class T>
std::string show(const T & v)
{
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    return format_double(v);
  } else {
    return std::to_string(v);
  }
}

std::string show_levels(const std::vector<int> & levels)
{
  std::string s;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    s += (i ? "," : "") + std::to_string(levels[i]);
  }
  return s;
}

std::vector<int> parse_levels(std::string_view key, std::string_view s)
{
  std::vector<int> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(parse_value<int>(key, trim(s.substr(0, comma))));
    if (comma == std::string_view::npos) {
      break;
    }
    s.remove_prefix(comma + 1);
  }
  if (out.empty()) {
    bad_value(key, s);
  }
  return out;
}

struct Field
{
  std::string_view name;
  std::function<void(RunConfig &, std::string_view)> set;
  std::function<std::string(const RunConfig &)> get;
};

// A field bound to a member reached through `ref`.
template <class Ref>
Field scalar(std::string_view name, Ref ref)
{
  using T = std::remove_reference_t<decltype(ref(std::declval<RunConfig &>()))>;
  return {
    name, [name, ref](RunConfig & c, std::string_view v) { ref(c) = parse_value<T>(name, v); },
    [ref](const RunConfig & c) { return show(ref(const_cast<RunConfig &>(c))); }};
}

const std::vector<Field> & fields()
{
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    f.push_back(scalar("geometry.width", [](RunConfig & c) -> int & { return c.pipeline.geometry.width; }));
    f.push_back(scalar("geometry.height", [](RunConfig & c) -> int & { return c.pipeline.geometry.height; }));
    f.push_back(scalar("seed", [](RunConfig & c) -> std::uint64_t & { return c.seed; }));
    f.push_back(
      {"estimator",
       [](RunConfig & c, std::string_view v) { c.pipeline.estimator = parse_estimator(v); },
       [](const RunConfig & c) { return std::string(to_string(c.pipeline.estimator)); }});
    f.push_back(
      {"regularizer",
       [](RunConfig & c, std::string_view v) { c.pipeline.regularizer = parse_regularizer(v); },
       [](const RunConfig & c) { return std::string(to_string(c.pipeline.regularizer)); }});

    f.push_back(scalar("filter.refractory", [](RunConfig & c) -> bool & { return c.pipeline.filter.refractory_enabled; }));
    f.push_back(scalar("filter.activity", [](RunConfig & c) -> bool & { return c.pipeline.filter.activity_enabled; }));
    f.push_back(scalar("filter.t_same_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.filter.refractory.t_same_us; }));
    f.push_back(scalar("filter.t_opp_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.filter.refractory.t_opp_us; }));
    f.push_back(scalar("filter.k", [](RunConfig & c) -> double & { return c.pipeline.filter.adaptive.k; }));
    f.push_back(scalar("filter.t_min_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.filter.adaptive.t_min_us; }));
    f.push_back(scalar("filter.t_max_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.filter.adaptive.t_max_us; }));
    f.push_back(scalar("filter.alpha_min", [](RunConfig & c) -> double & { return c.pipeline.filter.adaptive.alpha_min; }));
    f.push_back(scalar("filter.alpha_max", [](RunConfig & c) -> double & { return c.pipeline.filter.adaptive.alpha_max; }));
    f.push_back(scalar("filter.min_support", [](RunConfig & c) -> int & { return c.pipeline.filter.adaptive.min_support; }));
    f.push_back(scalar("filter.rate_window_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.filter.adaptive.rate_window_us; }));

    f.push_back(scalar("pca.n", [](RunConfig & c) -> int & { return c.pipeline.pca.n; }));
    f.push_back(scalar("pca.min_neighbors", [](RunConfig & c) -> int & { return c.pipeline.pca.min_neighbors; }));
    f.push_back(scalar("pca.planarity_eps", [](RunConfig & c) -> double & { return c.pipeline.pca.planarity_eps; }));
    f.push_back(scalar("pca.delta_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.pca.consensus_delta_us; }));
    f.push_back(scalar("pca.delta_fraction", [](RunConfig & c) -> double & { return c.pipeline.pca.consensus_delta_fraction; }));
    f.push_back(scalar("pca.delta_floor_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.pca.consensus_delta_floor_us; }));
    f.push_back(scalar("pca.outlier_eps", [](RunConfig & c) -> double & { return c.pipeline.pca.outlier_ratio_eps; }));
    f.push_back(scalar("pca.max_age_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.pca.max_age_us; }));
    f.push_back(
      {"pca.consensus",
       [](RunConfig & c, std::string_view v) {
         if (v == "window") {
           c.pipeline.pca.consensus_denominator = ConsensusDenominator::Window;
         } else if (v == "support") {
           c.pipeline.pca.consensus_denominator = ConsensusDenominator::Support;
         } else {
           bad_value("pca.consensus", v);
         }
       },
       [](const RunConfig & c) {
         return std::string(
           c.pipeline.pca.consensus_denominator == ConsensusDenominator::Window ? "window"
                                                                                : "support");
       }});

    f.push_back(scalar("weighted.m", [](RunConfig & c) -> int & { return c.pipeline.weighted.m; }));
    f.push_back(scalar("weighted.min_dt_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.weighted.min_dt_us; }));
    f.push_back(scalar("weighted.max_age_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.weighted.max_age_us; }));
    f.push_back(
      {"weighted.weighting",
       [](RunConfig & c, std::string_view v) {
         if (v == "inverse") {
           c.pipeline.weighted.weighting = WeightFunction::Inverse;
         } else if (v == "exp") {
           c.pipeline.weighted.weighting = WeightFunction::InverseExp;
         } else if (v == "log") {
           c.pipeline.weighted.weighting = WeightFunction::InverseLog;
         } else {
           bad_value("weighted.weighting", v);
         }
       },
       [](const RunConfig & c) {
         switch (c.pipeline.weighted.weighting) {
           case WeightFunction::InverseExp:
             return std::string("exp");
           case WeightFunction::InverseLog:
             return std::string("log");
           case WeightFunction::Inverse:
             break;
         }
         return std::string("inverse");
       }});
    f.push_back(scalar("weighted.decay_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.weighted.decay_us; }));
    f.push_back(scalar("weighted.include_self", [](RunConfig & c) -> bool & { return c.pipeline.weighted.include_self; }));

    f.push_back(
      {"leveled.levels",
       [](RunConfig & c, std::string_view v) {
         c.pipeline.leveled.levels = parse_levels("leveled.levels", v);
       },
       [](const RunConfig & c) { return show_levels(c.pipeline.leveled.levels); }});

    f.push_back(scalar("plane.n", [](RunConfig & c) -> int & { return c.pipeline.plane.n; }));
    f.push_back(scalar("plane.min_neighbors", [](RunConfig & c) -> int & { return c.pipeline.plane.min_neighbors; }));
    f.push_back(scalar("plane.reject_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.plane.reject_threshold_us; }));
    f.push_back(scalar("plane.reject_fraction", [](RunConfig & c) -> double & { return c.pipeline.plane.reject_threshold_fraction; }));
    f.push_back(scalar("plane.reject_floor_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.plane.reject_threshold_floor_us; }));
    f.push_back(scalar("plane.max_iters", [](RunConfig & c) -> int & { return c.pipeline.plane.max_iters; }));
    f.push_back(scalar("plane.tol", [](RunConfig & c) -> double & { return c.pipeline.plane.convergence_tol; }));
    f.push_back(scalar("plane.max_age_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.plane.max_age_us; }));

    f.push_back(scalar("lk.delta_t_us", [](RunConfig & c) -> Microseconds & { return c.pipeline.lk.delta_t_us; }));
    f.push_back(scalar("lk.window", [](RunConfig & c) -> int & { return c.pipeline.lk.window; }));
    f.push_back(scalar("lk.min_eigen_ratio", [](RunConfig & c) -> double & { return c.pipeline.lk.min_eigen_ratio; }));

    f.push_back(
      {"lk.gradient",
       [](RunConfig & c, std::string_view v) {
         if (v == "recent") {
           c.pipeline.lk.gradient = LkGradient::Recent;
         } else if (v == "centered") {
           c.pipeline.lk.gradient = LkGradient::Centered;
         } else {
           bad_value("lk.gradient", v);
         }
       },
       [](const RunConfig & c) {
         return std::string(c.pipeline.lk.gradient == LkGradient::Recent ? "recent" : "centered");
       }});

    f.push_back(scalar("eval.bin_width_ms", [](RunConfig & c) -> double & { return c.bin_width_ms; }));
    f.push_back(scalar("bench.warmup", [](RunConfig & c) -> std::size_t & { return c.bench_warmup; }));
    return f;
  }();
  return all;
}

const Field & find_field(std::string_view key)
{
  for (const Field & f : fields()) {
    if (f.name == key) {
      return f;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value)
{
  find_field(key).set(*this, trim(value));
}

std::string RunConfig::get(std::string_view key) const { return find_field(key).get(*this); }

void RunConfig::apply_override(std::string_view assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void RunConfig::validate() const
{
  pipeline.validate();
  if (!(bin_width_ms > 0.0)) {
    throw ConfigError("eval.bin_width_ms must be positive");
  }
}

std::string RunConfig::to_text() const
{
  std::string out;
  for (const Field & f : fields()) {
    out += std::string(f.name) + " = " + f.get(*this) + "\n";
  }
  return out;
}

RunConfig RunConfig::parse(std::istream & in)
{
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) {
      s = s.substr(0, hash);
    }
    s = trim(s);
    if (s.empty()) {
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      cfg.set(trim(s.substr(0, eq)), s.substr(eq + 1));
    } catch (const ConfigError & e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config '" + path.string() + "'");
  }
  return parse(in);
}

std::vector<std::string> RunConfig::keys()
{
  std::vector<std::string> out;
  for (const Field & f : fields()) {
    out.emplace_back(f.name);
  }
  return out;
}

}  // namespace pcaflow
