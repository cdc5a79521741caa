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

#ifndef PCAFLOW_CONFIG_HPP
#define PCAFLOW_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pcaflow/pipeline.hpp"

namespace pcaflow
{
// Every tunable of a run. Serialized as a flat "key = value" file, one key
// per line, '#' starts a comment. Unknown keys are errors.
struct RunConfig
{
  PipelineConfig pipeline{};
  std::uint64_t seed{1};
  double bin_width_ms{0.1};
  std::size_t bench_warmup{1000};

  // Throws ConfigError for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  // "key=value" override, as given on the command line.
  void apply_override(std::string_view assignment);

  void validate() const;

  // All keys with their current values, in a stable order.
  std::string to_text() const;

  static RunConfig parse(std::istream & in);
  static RunConfig load(const std::filesystem::path & path);

  static std::vector<std::string> keys();
};

}  // namespace pcaflow

#endif  // PCAFLOW_CONFIG_HPP
