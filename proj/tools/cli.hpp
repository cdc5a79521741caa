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

#ifndef PCAFLOW_TOOLS_CLI_HPP
#define PCAFLOW_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace pcaflow::cli
{
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

// Runs one command line (args excludes the program name) and returns the
// exit code. Never throws; messages go to `err`.
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

// "1s", "250ms", "5000us" or a bare integer (microseconds).
long long parse_duration_us(const std::string & text);

}  // namespace pcaflow::cli

#endif  // PCAFLOW_TOOLS_CLI_HPP
