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

#include "pcaflow/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "pcaflow/errors.hpp"

namespace pcaflow
{
namespace
{
// Splits a CSV line into exactly `n` fields; no quoting in these formats.
template <std::size_t N>
std::array<std::string_view, N> split(std::string_view line, std::size_t lineno)
{
  std::array<std::string_view, N> out{};
  std::size_t i = 0;
  while (true) {
    const auto comma = line.find(',');
    if (i == N - 1) {
      if (comma != std::string_view::npos) {
        throw ParseError("expected " + std::to_string(N) + " fields", lineno);
      }
      out[i] = line;
      return out;
    }
    if (comma == std::string_view::npos) {
      throw ParseError("expected " + std::to_string(N) + " fields", lineno);
    }
    out[i++] = line.substr(0, comma);
    line.remove_prefix(comma + 1);
  }
}

template <class T>
T parse_number(std::string_view s, std::size_t lineno, const char * what)
{
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(s) + "'", lineno);
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) {
      throw ParseError(std::string("non-finite ") + what, lineno);
    }
  }
  return v;
}

Polarity parse_polarity(std::string_view s, std::size_t lineno)
{
  const int p = parse_number<int>(s, lineno, "polarity");
  if (p == 1) {
    return Polarity::Positive;
  }
  if (p == -1) {
    return Polarity::Negative;
  }
  throw ParseError("polarity must be 1 or -1", lineno);
}

Event parse_event_fields(
  std::string_view t, std::string_view x, std::string_view y, std::string_view p, std::size_t lineno)
{
  Event e;
  e.t = static_cast<Microseconds>(parse_number<std::uint64_t>(t, lineno, "timestamp"));
  if (e.t < 0) {
    throw ParseError("timestamp out of range", lineno);
  }
  e.x = parse_number<std::uint16_t>(x, lineno, "x");
  e.y = parse_number<std::uint16_t>(y, lineno, "y");
  e.p = parse_polarity(p, lineno);
  return e;
}

bool parse_flag(std::string_view s, std::size_t lineno, const char * what)
{
  if (s == "1") {
    return true;
  }
  if (s == "0") {
    return false;
  }
  throw ParseError(std::string(what) + " must be 0 or 1", lineno);
}

void strip_cr(std::string & s)
{
  if (!s.empty() && s.back() == '\r') {
    s.pop_back();
  }
}

void append_int(std::string & out, long long v)
{
  char buf[24];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

void append_event(std::string & out, const Event & e)
{
  append_int(out, e.t);
  out += ',';
  append_int(out, e.x);
  out += ',';
  append_int(out, e.y);
  out += ',';
  append_int(out, polarity_sign(e.p));
}

// Reads a headed CSV; calls row(fields, lineno) for every data line.
template <std::size_t N, class Row>
void read_csv(std::istream & in, std::string_view header, Row && row)
{
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (!seen_header) {
      if (line != header) {
        throw ParseError("expected header '" + std::string(header) + "'", lineno);
      }
      seen_header = true;
      continue;
    }
    if (line.empty()) {
      continue;
    }
    row(split<N>(line, lineno), lineno);
  }
}

std::ifstream open_in(const std::filesystem::path & path, bool binary)
{
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "' for reading");
  }
  return in;
}

}  // namespace

EventFormat format_for_path(const std::filesystem::path & path)
{
  const auto ext = path.extension();
  return ext == ".bin" || ext == ".evb" ? EventFormat::Binary : EventFormat::Csv;
}

std::string format_double(double v)
{
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

EventReader::EventReader(std::istream & in, EventFormat format) : in_(in), format_(format) {}

std::optional<Event> EventReader::next()
{
  std::optional<Event> e = format_ == EventFormat::Csv ? next_csv() : next_binary();
  if (e) {
    if (started_ && e->t < last_t_) {
      throw ParseError(
        "timestamps not sorted (" + std::to_string(e->t) + " after " + std::to_string(last_t_) +
          ")",
        line_);
    }
    started_ = true;
    last_t_ = e->t;
  }
  return e;
}

std::optional<Event> EventReader::next_csv()
{
  while (std::getline(in_, buf_)) {
    ++line_;
    strip_cr(buf_);
    if (line_ == 1) {
      if (buf_ != kEventHeader) {
        throw ParseError("expected header '" + std::string(kEventHeader) + "'", line_);
      }
      continue;
    }
    if (buf_.empty()) {
      continue;
    }
    const auto f = split<4>(buf_, line_);
    return parse_event_fields(f[0], f[1], f[2], f[3], line_);
  }
  return std::nullopt;
}

std::optional<Event> EventReader::next_binary()
{
  std::array<unsigned char, kBinaryRecordSize> r{};
  in_.read(reinterpret_cast<char *>(r.data()), static_cast<std::streamsize>(r.size()));
  const auto got = static_cast<std::size_t>(in_.gcount());
  if (got == 0) {
    return std::nullopt;
  }
  ++line_;
  if (got != kBinaryRecordSize) {
    throw ParseError("truncated binary record", line_);
  }
  std::uint64_t t = 0;
  for (int i = 7; i >= 0; --i) {
    t = (t << 8) | r[static_cast<std::size_t>(i)];
  }
  if (t > static_cast<std::uint64_t>(std::numeric_limits<Microseconds>::max())) {
    throw ParseError("timestamp out of range", line_);
  }
  Event e;
  e.t = static_cast<Microseconds>(t);
  e.x = static_cast<std::uint16_t>(r[8] | (r[9] << 8));
  e.y = static_cast<std::uint16_t>(r[10] | (r[11] << 8));
  const auto p = static_cast<std::int8_t>(r[12]);
  if (p == 1) {
    e.p = Polarity::Positive;
  } else if (p == -1) {
    e.p = Polarity::Negative;
  } else {
    throw ParseError("polarity must be 1 or -1", line_);
  }
  return e;
}

std::vector<Event> read_events(std::istream & in, EventFormat format)
{
  EventReader reader(in, format);
  std::vector<Event> out;
  while (auto e = reader.next()) {
    out.push_back(*e);
  }
  return out;
}

std::vector<Event> read_events(const std::filesystem::path & path)
{
  const EventFormat format = format_for_path(path);
  std::ifstream in = open_in(path, format == EventFormat::Binary);
  return read_events(in, format);
}

EventWriter::EventWriter(std::ostream & out, EventFormat format) : out_(out), format_(format)
{
  if (format_ == EventFormat::Csv) {
    out_ << kEventHeader << '\n';
  }
}

void EventWriter::write(const Event & e)
{
  if (format_ == EventFormat::Csv) {
    buf_.clear();
    append_event(buf_, e);
    buf_ += '\n';
    out_ << buf_;
    return;
  }
  std::array<unsigned char, kBinaryRecordSize> r{};
  const auto t = static_cast<std::uint64_t>(e.t);
  for (int i = 0; i < 8; ++i) {
    r[static_cast<std::size_t>(i)] = static_cast<unsigned char>((t >> (8 * i)) & 0xff);
  }
  r[8] = static_cast<unsigned char>(e.x & 0xff);
  r[9] = static_cast<unsigned char>(e.x >> 8);
  r[10] = static_cast<unsigned char>(e.y & 0xff);
  r[11] = static_cast<unsigned char>(e.y >> 8);
  r[12] = static_cast<unsigned char>(static_cast<std::int8_t>(polarity_sign(e.p)));
  out_.write(reinterpret_cast<const char *>(r.data()), static_cast<std::streamsize>(r.size()));
}

void write_events(std::ostream & out, std::span<const Event> events, EventFormat format)
{
  EventWriter w(out, format);
  for (const Event & e : events) {
    w.write(e);
  }
}

void write_events(const std::filesystem::path & path, std::span<const Event> events)
{
  const EventFormat format = format_for_path(path);
  std::ofstream out(path, format == EventFormat::Binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw DataError("cannot open '" + path.string() + "' for writing");
  }
  write_events(out, events, format);
}

FlowWriter::FlowWriter(std::ostream & out) : out_(out) { out_ << kFlowHeader << '\n'; }

void FlowWriter::write(const FlowEvent & f)
{
  buf_.clear();
  append_event(buf_, f.event);
  if (f.valid()) {
    buf_ += ',';
    buf_ += format_double(f.vx);
    buf_ += ',';
    buf_ += format_double(f.vy);
    buf_ += ',';
    if (f.lifetime_ms) {
      buf_ += format_double(*f.lifetime_ms);
    }
    buf_ += ",1\n";
  } else {
    buf_ += ",0,0,,0\n";
  }
  out_ << buf_;
}

void write_flow(std::ostream & out, std::span<const FlowEvent> flow)
{
  FlowWriter w(out);
  for (const FlowEvent & f : flow) {
    w.write(f);
  }
}

std::vector<FlowEvent> read_flow(std::istream & in)
{
  std::vector<FlowEvent> out;
  read_csv<8>(in, kFlowHeader, [&](const auto & f, std::size_t lineno) {
    FlowEvent fe;
    fe.event = parse_event_fields(f[0], f[1], f[2], f[3], lineno);
    const bool valid = parse_flag(f[7], lineno, "valid");
    if (valid) {
      fe.vx = parse_number<double>(f[4], lineno, "vx");
      fe.vy = parse_number<double>(f[5], lineno, "vy");
      if (!f[6].empty()) {
        fe.lifetime_ms = parse_number<double>(f[6], lineno, "lifetime");
      }
      fe.status = FlowStatus::Valid;
    } else {
      fe.status = FlowStatus::Filtered;
    }
    out.push_back(fe);
  });
  return out;
}

std::vector<FlowEvent> read_flow(const std::filesystem::path & path)
{
  std::ifstream in = open_in(path, false);
  return read_flow(in);
}

void write_ground_truth(std::ostream & out, std::span<const GroundTruthEvent> truth)
{
  out << kTruthHeader << '\n';
  std::string buf;
  for (const GroundTruthEvent & g : truth) {
    buf.clear();
    append_event(buf, g.event);
    if (g.is_noise) {
      buf += ",0,0,,1\n";
    } else {
      buf += ',';
      buf += format_double(g.gt_vx);
      buf += ',';
      buf += format_double(g.gt_vy);
      buf += ',';
      buf += format_double(g.gt_lifetime_ms);
      buf += ",0\n";
    }
    out << buf;
  }
}

std::vector<GroundTruthEvent> read_ground_truth(std::istream & in)
{
  std::vector<GroundTruthEvent> out;
  read_csv<8>(in, kTruthHeader, [&](const auto & f, std::size_t lineno) {
    GroundTruthEvent g;
    g.event = parse_event_fields(f[0], f[1], f[2], f[3], lineno);
    g.is_noise = parse_flag(f[7], lineno, "is_noise");
    g.gt_vx = parse_number<double>(f[4], lineno, "gt_vx");
    g.gt_vy = parse_number<double>(f[5], lineno, "gt_vy");
    if (!f[6].empty()) {
      g.gt_lifetime_ms = parse_number<double>(f[6], lineno, "gt_lifetime_ms");
    }
    out.push_back(g);
  });
  return out;
}

std::vector<GroundTruthEvent> read_ground_truth(const std::filesystem::path & path)
{
  std::ifstream in = open_in(path, false);
  return read_ground_truth(in);
}

}  // namespace pcaflow
