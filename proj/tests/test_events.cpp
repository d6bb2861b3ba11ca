// Copyright 2026 The TRR-SNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

#include "support.hpp"
#include "trr/events.hpp"

using namespace trr;
using trr::testing::kind_of;

namespace {

EventStream random_stream(std::size_t n, std::uint64_t seed, std::uint16_t w = 34,
                          std::uint16_t h = 34) {
  std::mt19937_64 gen(seed);
  EventStream s;
  s.width = w;
  s.height = h;
  std::uint32_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t += static_cast<std::uint32_t>(gen() % 50);
    s.events.push_back({t, static_cast<std::uint8_t>(gen() % 2),
                        static_cast<std::uint16_t>(gen() % w),
                        static_cast<std::uint16_t>(gen() % h)});
  }
  return s;
}

std::size_t parse_offset(const std::vector<std::uint8_t>& bytes) {
  try {
    parse_events(bytes);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("parse succeeded");
  return 0;
}

}  // namespace

TEST_CASE("binary layout of a single record") {
  EventStream s;
  s.width = 0x0102;
  s.height = 0x0304;
  s.events.push_back({0x0A0B0C0D, 1, 0x0101, 0x0203});
  const std::vector<std::uint8_t> want{
      'T', 'R', 'E', 'V', 1, 0, 0x02, 0x01, 0x04, 0x03,  // magic, version, dims
      1, 0, 0, 0, 0, 0, 0, 0,                              // count
      0x0D, 0x0C, 0x0B, 0x0A, 1, 0x01, 0x01, 0x03, 0x02};  // t, p, x, y
  CHECK(serialize_events(s) == want);
  CHECK(parse_events(want) == s);
}

TEST_CASE("round trip of 10k random records") {
  const EventStream s = random_stream(10000, 1);
  const auto bytes = serialize_events(s);
  CHECK(bytes.size() == kEventHeaderBytes + 10000 * kEventRecordBytes);
  CHECK(parse_events(bytes) == s);
  CHECK(serialize_events(parse_events(bytes)) == bytes);

  std::stringstream csv;
  write_event_csv(csv, s);
  CHECK(parse_event_csv(csv) == s);
}

TEST_CASE("malformed binary input reports the byte offset") {
  const auto good = serialize_events(random_stream(5, 2));
  auto bad = good;
  bad[0] = 'X';
  CHECK(parse_offset(bad) == 0);
  bad = good;
  bad[4] = 9;
  CHECK(parse_offset(bad) == 4);
  CHECK(parse_offset({good.begin(), good.begin() + 10}) == 10);

  // Cut inside the fourth record: the error points at its first byte.
  bad.assign(good.begin(), good.begin() + kEventHeaderBytes + 3 * kEventRecordBytes + 4);
  CHECK(parse_offset(bad) == kEventHeaderBytes + 3 * kEventRecordBytes);

  bad = good;
  bad.push_back(0);
  CHECK(parse_offset(bad) == kEventHeaderBytes + 5 * kEventRecordBytes);

  bad = good;
  bad[kEventHeaderBytes + 2 * kEventRecordBytes + 4] = 2;  // polarity
  CHECK(parse_offset(bad) == kEventHeaderBytes + 2 * kEventRecordBytes);

  bad = good;
  bad[kEventHeaderBytes + kEventRecordBytes + 5] = 40;  // x beyond width 34
  CHECK(parse_offset(bad) == kEventHeaderBytes + kEventRecordBytes);

  EventStream back = random_stream(3, 3);
  back.events[2].t = 0;
  back.events[1].t = 10;
  CHECK(kind_of([&] { parse_events(serialize_events(back)); }) == ErrorKind::kData);
}

TEST_CASE("csv fallback") {
  std::istringstream with_dims("#sensor,8,6\nt,p,x,y\n5,1,7,5\n9, 0 ,0,0\n");
  const EventStream a = parse_event_csv(with_dims);
  CHECK(a.width == 8);
  CHECK(a.height == 6);
  REQUIRE(a.events.size() == 2);
  CHECK(a.events[0] == EventRecord{5, 1, 7, 5});
  CHECK(a.events[1] == EventRecord{9, 0, 0, 0});

  std::istringstream inferred("t,p,x,y\n1,0,3,1\n2,1,0,4\n");
  const EventStream b = parse_event_csv(inferred);
  CHECK(b.width == 4);
  CHECK(b.height == 5);

  std::istringstream bad_field("t,p,x,y\n1,0,3,1\n2,1,zz,4\n");
  CHECK(kind_of([&] { parse_event_csv(bad_field); }) == ErrorKind::kParse);
  std::istringstream outside("#sensor,4,4\nt,p,x,y\n1,0,4,0\n");
  CHECK(kind_of([&] { parse_event_csv(outside); }) == ErrorKind::kParse);
}

TEST_CASE("file helpers pick the format by content") {
  const auto dir = std::filesystem::temp_directory_path() / "trr_test_events";
  std::filesystem::create_directories(dir);
  const EventStream s = random_stream(100, 4);
  write_event_file(dir / "a.bin", s);
  CHECK(parse_event_file(dir / "a.bin") == s);
  write_event_file(dir / "a.csv", s);
  CHECK(parse_event_file(dir / "a.csv") == s);
  CHECK(kind_of([&] { parse_event_file(dir / "missing.bin"); }) == ErrorKind::kIo);
  std::filesystem::remove_all(dir);
}

TEST_CASE("fixed_count slices are near-equal") {
  for (std::size_t n : {0u, 1u, 4u, 5u, 7u, 1000u, 1003u}) {
    for (std::size_t t = 1; t <= 10; ++t) {
      const auto sizes = fixed_count_slices(n, t);
      REQUIRE(sizes.size() == t);
      std::size_t total = 0;
      for (auto v : sizes) total += v;
      CHECK(total == n);
      const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
      CHECK(*hi - *lo <= 1);
      CHECK(std::is_sorted(sizes.rbegin(), sizes.rend()));
    }
  }
  CHECK(fixed_count_slices(7, 3) == std::vector<std::size_t>{3, 2, 2});
}

TEST_CASE("integration conserves every event") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const EventStream s = random_stream(1 + seed * 97, seed, 10, 7);
    for (auto policy : {IntegrationPolicy::kFixedCount, IntegrationPolicy::kFixedDuration}) {
      const Tensor f = integrate_frames(s, 5, policy);
      CHECK(f.shape() == Shape{5, 2, 7, 10});
      double total = 0.0;
      for (float v : f.data()) total += v;
      CHECK(total == static_cast<double>(s.events.size()));

      // Per-pixel, per-polarity totals match a direct count.
      std::vector<double> direct(2 * 7 * 10, 0.0);
      for (const auto& e : s.events) direct[(e.p * 7 + e.y) * 10 + e.x] += 1.0;
      for (std::size_t i = 0; i < direct.size(); ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t < 5; ++t) acc += f.at(t * direct.size() + i);
        CHECK(acc == direct[i]);
      }
    }
  }
}

TEST_CASE("fixed_count places events by arrival order") {
  EventStream s;
  s.width = 2;
  s.height = 1;
  for (std::uint32_t i = 0; i < 5; ++i) s.events.push_back({i * 100, 0, static_cast<std::uint16_t>(i % 2), 0});
  const Tensor f = integrate_frames(s, 2, IntegrationPolicy::kFixedCount);
  // Slices hold events {0,1,2} and {3,4}; x alternates 0,1,0 | 1,0.
  CHECK(f.at(0) == 2.0f);
  CHECK(f.at(1) == 1.0f);
  CHECK(f.at(4) == 1.0f);
  CHECK(f.at(5) == 1.0f);

  // Fixed duration over t in [0, 400]: slice = t * 2 / 401.
  const Tensor d = integrate_frames(s, 2, IntegrationPolicy::kFixedDuration);
  CHECK(d.at(0) + d.at(1) == 3.0f);
  CHECK(d.at(4) + d.at(5) == 2.0f);

  EventStream empty;
  empty.width = 2;
  empty.height = 2;
  CHECK(kind_of([&] { integrate_frames(empty, 3, IntegrationPolicy::kFixedCount); }) ==
        ErrorKind::kData);
  CHECK(kind_of([&] { integrate_frames(s, 0, IntegrationPolicy::kFixedCount); }) ==
        ErrorKind::kContract);
}

TEST_CASE("spatial downsampling sums blocks") {
  const Tensor f = trr::testing::random_tensor({2, 2, 4, 6}, 5, 0.0f, 3.0f);
  const Tensor d = downsample_spatial(f, 2);
  CHECK(d.shape() == Shape{2, 2, 2, 3});
  for (std::size_t n = 0; n < 4; ++n) {
    for (std::size_t y = 0; y < 2; ++y) {
      for (std::size_t x = 0; x < 3; ++x) {
        const float* src = f.data().data() + n * 24;
        const float want = src[(2 * y) * 6 + 2 * x] + src[(2 * y) * 6 + 2 * x + 1] +
                           src[(2 * y + 1) * 6 + 2 * x] + src[(2 * y + 1) * 6 + 2 * x + 1];
        CHECK(d.at((n * 2 + y) * 3 + x) == doctest::Approx(want).epsilon(1e-6));
      }
    }
  }
  CHECK(kind_of([&] { downsample_spatial(f, 4); }) == ErrorKind::kDimension);
  CHECK(trr::testing::bit_equal(downsample_spatial(f, 1), f));
}
