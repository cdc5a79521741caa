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

#ifndef PCAFLOW_IO_HPP
#define PCAFLOW_IO_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcaflow/events.hpp"
#include "pcaflow/sim.hpp"

namespace pcaflow
{
// Text: header "t_us,x,y,p", one event per line, p in {1, -1}.
// Binary: 13-byte little-endian records (u64 t_us, u16 x, u16 y, i8 p), no header.
enum class EventFormat { Csv, Binary };

inline constexpr std::string_view kEventHeader = "t_us,x,y,p";
inline constexpr std::string_view kFlowHeader = "t_us,x,y,p,vx_px_ms,vy_px_ms,lifetime_ms,valid";
inline constexpr std::string_view kTruthHeader = "t_us,x,y,p,gt_vx,gt_vy,gt_lifetime_ms,is_noise";
inline constexpr std::size_t kBinaryRecordSize = 13;

// ".bin" and ".evb" select the binary form, anything else text.
EventFormat format_for_path(const std::filesystem::path & path);

// Shortest round-trip decimal form.
std::string format_double(double v);

// Streaming reader. Rejects malformed rows and decreasing timestamps with a
// ParseError carrying the line (text) or record number (binary). An empty
// input, or a header alone, is a valid empty stream.
class EventReader
{
public:
  EventReader(std::istream & in, EventFormat format);

  std::optional<Event> next();
  std::size_t line() const { return line_; }

private:
  std::optional<Event> next_csv();
  std::optional<Event> next_binary();

  std::istream & in_;
  EventFormat format_;
  std::size_t line_{0};
  Microseconds last_t_{0};
  bool started_{false};
  std::string buf_;
};

std::vector<Event> read_events(std::istream & in, EventFormat format);
std::vector<Event> read_events(const std::filesystem::path & path);

class EventWriter
{
public:
  EventWriter(std::ostream & out, EventFormat format);
  void write(const Event & e);

private:
  std::ostream & out_;
  EventFormat format_;
  std::string buf_;
};

void write_events(std::ostream & out, std::span<const Event> events, EventFormat format);
void write_events(const std::filesystem::path & path, std::span<const Event> events);

// Flow rows. Invalid estimates are written as vx = vy = 0, empty lifetime,
// valid = 0.
class FlowWriter
{
public:
  explicit FlowWriter(std::ostream & out);
  void write(const FlowEvent & f);

private:
  std::ostream & out_;
  std::string buf_;
};

void write_flow(std::ostream & out, std::span<const FlowEvent> flow);
// Rows with valid = 0 come back with status Filtered.
std::vector<FlowEvent> read_flow(std::istream & in);
std::vector<FlowEvent> read_flow(const std::filesystem::path & path);

// Noise rows carry gt_vx = gt_vy = 0 and an empty lifetime.
void write_ground_truth(std::ostream & out, std::span<const GroundTruthEvent> truth);
std::vector<GroundTruthEvent> read_ground_truth(std::istream & in);
std::vector<GroundTruthEvent> read_ground_truth(const std::filesystem::path & path);

}  // namespace pcaflow

#endif  // PCAFLOW_IO_HPP
