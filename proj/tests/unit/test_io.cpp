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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pcaflow/errors.hpp"
#include "pcaflow/io.hpp"
#include "test_support.hpp"

namespace pcaflow
{
namespace
{
std::vector<Event> random_events(std::uint64_t seed, int n)
{
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> xy(0, 65535);
  std::uniform_int_distribution<int> dt(0, 5000);
  std::vector<Event> out;
  Microseconds t = std::uniform_int_distribution<Microseconds>(0, 1LL << 40)(rng);
  for (int i = 0; i < n; ++i) {
    t += dt(rng);
    out.push_back(
      {t, static_cast<std::uint16_t>(xy(rng)), static_cast<std::uint16_t>(xy(rng)),
       rng() % 2 ? Polarity::Positive : Polarity::Negative});
  }
  return out;
}

TEST(EventIoProperty, RoundTripBothFormats)
{
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto events = random_events(seed, 300);
    for (EventFormat f : {EventFormat::Csv, EventFormat::Binary}) {
      std::stringstream ss;
      write_events(ss, events, f);
      EXPECT_EQ(read_events(ss, f), events);
    }
  }
}

TEST(EventIo, BinaryRecordSize)
{
  std::stringstream ss;
  const auto events = random_events(1, 10);
  write_events(ss, events, EventFormat::Binary);
  EXPECT_EQ(ss.str().size() % kBinaryRecordSize, 0u);
  EXPECT_GE(ss.str().size(), 10 * kBinaryRecordSize);
}

TEST(EventIo, FormatFromExtension)
{
  EXPECT_EQ(format_for_path("a.bin"), EventFormat::Binary);
  EXPECT_EQ(format_for_path("a.evb"), EventFormat::Binary);
  EXPECT_EQ(format_for_path("a.csv"), EventFormat::Csv);
}

TEST(EventIo, CsvErrorsCarryLine)
{
  const std::string bad = std::string(kEventHeader) + "\n10,1,1,1\n20,1,1,0\n";
  std::istringstream in(bad);
  try {
    read_events(in, EventFormat::Csv);
    FAIL();
  } catch (const ParseError & e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(EventIo, UnsortedRejected)
{
  std::istringstream in(std::string(kEventHeader) + "\n10,1,1,1\n5,1,1,1\n");
  EXPECT_THROW(read_events(in, EventFormat::Csv), ParseError);
}

TEST(EventIo, MissingHeaderRejected)
{
  std::istringstream in("10,1,1,1\n");
  EXPECT_THROW(read_events(in, EventFormat::Csv), ParseError);
}

TEST(EventIo, TruncatedBinaryRejected)
{
  std::stringstream ss;
  write_events(ss, random_events(3, 4), EventFormat::Binary);
  std::string s = ss.str();
  s.pop_back();
  std::istringstream in(s);
  EXPECT_THROW(read_events(in, EventFormat::Binary), ParseError);
}

TEST(EventIo, EmptyCsvHasHeaderOnly)
{
  std::stringstream ss;
  write_events(ss, {}, EventFormat::Csv);
  EXPECT_EQ(ss.str(), std::string(kEventHeader) + "\n");
  EXPECT_TRUE(read_events(ss, EventFormat::Csv).empty());
}

TEST(FlowIo, RoundTrip)
{
  const Event e{100, 3, 4, Polarity::Negative};
  const std::vector<FlowEvent> flow{
    FlowEvent::from_flow(e, 0.1, -2.5), FlowEvent::rejected(e, FlowStatus::NonPlanar)};
  std::stringstream ss;
  write_flow(ss, flow);
  const auto back = read_flow(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].event, e);
  EXPECT_EQ(back[0].vx, 0.1);
  EXPECT_EQ(back[0].vy, -2.5);
  EXPECT_EQ(*back[0].lifetime_ms, *flow[0].lifetime_ms);
  EXPECT_FALSE(back[1].valid());
}

TEST(TruthIo, RoundTrip)
{
  const auto truth =
    generate(testing::edge_scene(1.3, -0.4, {40, 30}, 30'000, 2000.0), 5);
  std::stringstream ss;
  write_ground_truth(ss, truth);
  EXPECT_EQ(read_ground_truth(ss), truth);
}

TEST(FormatDouble, ShortestRoundTrip)
{
  for (double v : {0.1, 1.0 / 3.0, 2.0, -1e-7, 123456.789}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

}  // namespace
}  // namespace pcaflow
