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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "trr/tensor.hpp"

namespace trr {

struct EventRecord {
  std::uint32_t t = 0;  // microseconds
  std::uint8_t p = 0;   // polarity, 0 or 1
  std::uint16_t x = 0;  // column
  std::uint16_t y = 0;  // row

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventStream {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::vector<EventRecord> events;

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

// Binary event file layout (all little-endian):
//   offset 0   4 bytes  magic "TREV"
//   offset 4   u16      version (1)
//   offset 6   u16      sensor width
//   offset 8   u16      sensor height
//   offset 10  u64      record count
//   offset 18  records, 9 bytes each: u32 t, u8 p, u16 x, u16 y
inline constexpr std::size_t kEventHeaderBytes = 18;
inline constexpr std::size_t kEventRecordBytes = 9;

std::vector<std::uint8_t> serialize_events(const EventStream& stream);
EventStream parse_events(std::span<const std::uint8_t> bytes);

// CSV fallback: optional "#sensor,<width>,<height>" line, then a "t,p,x,y"
// header and one record per line. Without the sensor line the dims are
// inferred from the largest coordinates.
EventStream parse_event_csv(std::istream& in);
void write_event_csv(std::ostream& out, const EventStream& stream);

// Reads either format; the binary magic decides.
EventStream parse_event_file(const std::filesystem::path& path);
void write_event_file(const std::filesystem::path& path,
                      const EventStream& stream);

enum class IntegrationPolicy { kFixedCount, kFixedDuration };

const char* to_string(IntegrationPolicy p) noexcept;

// Event counts per slice under fixed_count: near-equal, with the remainder
// going to the earliest slices.
std::vector<std::size_t> fixed_count_slices(std::size_t events,
                                            std::size_t steps);

// Histograms events into [T, 2, H, W] count frames (polarity = channel).
Tensor integrate_frames(const EventStream& stream, std::size_t steps,
                        IntegrationPolicy policy);

// Block-sum pooling of count frames [T, C, H, W] by `factor`.
Tensor downsample_spatial(const Tensor& frames, std::size_t factor);

}  // namespace trr
