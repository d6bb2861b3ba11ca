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

#include "trr/events.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "trr/error.hpp"

namespace trr {

namespace {

constexpr char kMagic[4] = {'T', 'R', 'E', 'V'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<T>(bytes[offset + i]) << (8 * i));
  }
  return value;
}

void validate_record(const EventStream& s, const EventRecord& e,
                     std::size_t index, std::size_t offset) {
  if (e.p > 1) {
    throw ParseError("event " + std::to_string(index) + ": polarity " +
                         std::to_string(e.p) + " is not 0 or 1",
                     offset);
  }
  if (e.x >= s.width || e.y >= s.height) {
    throw ParseError("event " + std::to_string(index) + ": coordinate (" +
                         std::to_string(e.x) + "," + std::to_string(e.y) +
                         ") outside sensor " + std::to_string(s.width) + "x" +
                         std::to_string(s.height),
                     offset);
  }
}

void check_monotone(const EventStream& s) {
  for (std::size_t i = 1; i < s.events.size(); ++i) {
    check(s.events[i].t >= s.events[i - 1].t, ErrorKind::kData,
          "timestamp regression at event " + std::to_string(i) + ": " +
              std::to_string(s.events[i].t) + " < " +
              std::to_string(s.events[i - 1].t));
  }
}

template <typename T>
T parse_field(std::string_view text, std::size_t line, std::size_t offset,
              const char* name) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("line " + std::to_string(line) + ": bad " + name +
                         " field '" + std::string(text) + "'",
                     offset);
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto field = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
    out.push_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

const char* to_string(IntegrationPolicy p) noexcept {
  return p == IntegrationPolicy::kFixedCount ? "fixed_count" : "fixed_duration";
}

std::vector<std::uint8_t> serialize_events(const EventStream& stream) {
  std::vector<std::uint8_t> out;
  out.reserve(kEventHeaderBytes + stream.events.size() * kEventRecordBytes);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint16_t>(out, kVersion);
  put_le<std::uint16_t>(out, stream.width);
  put_le<std::uint16_t>(out, stream.height);
  put_le<std::uint64_t>(out, stream.events.size());
  for (const auto& e : stream.events) {
    put_le<std::uint32_t>(out, e.t);
    put_le<std::uint8_t>(out, e.p);
    put_le<std::uint16_t>(out, e.x);
    put_le<std::uint16_t>(out, e.y);
  }
  return out;
}

EventStream parse_events(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kEventHeaderBytes) {
    throw ParseError("truncated event header: " + std::to_string(bytes.size()) +
                         " bytes",
                     bytes.size());
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("bad event file magic", 0);
  }
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kVersion) {
    throw ParseError("unsupported event file version " + std::to_string(version), 4);
  }
  EventStream s;
  s.width = get_le<std::uint16_t>(bytes, 6);
  s.height = get_le<std::uint16_t>(bytes, 8);
  const auto count = get_le<std::uint64_t>(bytes, 10);
  const std::size_t body = bytes.size() - kEventHeaderBytes;
  if (count > body / kEventRecordBytes) {
    const std::size_t whole = body / kEventRecordBytes;
    throw ParseError("truncated record " + std::to_string(whole) + " of " +
                         std::to_string(count),
                     kEventHeaderBytes + whole * kEventRecordBytes);
  }
  if (body != count * kEventRecordBytes) {
    throw ParseError("trailing bytes after " + std::to_string(count) + " records",
                     kEventHeaderBytes + count * kEventRecordBytes);
  }
  s.events.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t off = kEventHeaderBytes + i * kEventRecordBytes;
    auto& e = s.events[i];
    e.t = get_le<std::uint32_t>(bytes, off);
    e.p = get_le<std::uint8_t>(bytes, off + 4);
    e.x = get_le<std::uint16_t>(bytes, off + 5);
    e.y = get_le<std::uint16_t>(bytes, off + 7);
    validate_record(s, e, i, off);
  }
  check_monotone(s);
  return s;
}

EventStream parse_event_csv(std::istream& in) {
  EventStream s;
  bool have_dims = false;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  std::vector<std::size_t> offsets;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty()) continue;
    if (view.front() == '#') {
      auto fields = split_commas(view.substr(1));
      if (!fields.empty() && fields[0] == "sensor") {
        if (fields.size() != 3) {
          throw ParseError("line " + std::to_string(line_no) +
                               ": expected #sensor,<width>,<height>",
                           line_offset);
        }
        s.width = parse_field<std::uint16_t>(fields[1], line_no, line_offset, "width");
        s.height = parse_field<std::uint16_t>(fields[2], line_no, line_offset, "height");
        have_dims = true;
      }
      continue;
    }
    auto fields = split_commas(view);
    if (!have_header) {
      if (fields.size() != 4 || fields[0] != "t" || fields[1] != "p" ||
          fields[2] != "x" || fields[3] != "y") {
        throw ParseError("line " + std::to_string(line_no) +
                             ": expected header 't,p,x,y'",
                         line_offset);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 4) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                           std::to_string(fields.size()),
                       line_offset);
    }
    EventRecord e;
    e.t = parse_field<std::uint32_t>(fields[0], line_no, line_offset, "t");
    e.p = parse_field<std::uint8_t>(fields[1], line_no, line_offset, "p");
    e.x = parse_field<std::uint16_t>(fields[2], line_no, line_offset, "x");
    e.y = parse_field<std::uint16_t>(fields[3], line_no, line_offset, "y");
    s.events.push_back(e);
    offsets.push_back(line_offset);
  }
  if (!have_header) throw ParseError("missing 't,p,x,y' header", 0);
  if (!have_dims) {
    std::uint16_t w = 0, h = 0;
    for (const auto& e : s.events) {
      w = std::max<std::uint16_t>(w, e.x + 1);
      h = std::max<std::uint16_t>(h, e.y + 1);
    }
    s.width = w;
    s.height = h;
  }
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    validate_record(s, s.events[i], i, offsets[i]);
  }
  check_monotone(s);
  return s;
}

void write_event_csv(std::ostream& out, const EventStream& stream) {
  out << "#sensor," << stream.width << ',' << stream.height << '\n';
  out << "t,p,x,y\n";
  for (const auto& e : stream.events) {
    out << e.t << ',' << static_cast<unsigned>(e.p) << ',' << e.x << ',' << e.y
        << '\n';
  }
}

EventStream parse_event_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  check(static_cast<bool>(in), ErrorKind::kIo,
        "cannot open event file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) {
    return parse_events(bytes);
  }
  std::istringstream text(std::string(bytes.begin(), bytes.end()));
  return parse_event_csv(text);
}

void write_event_file(const std::filesystem::path& path,
                      const EventStream& stream) {
  std::ofstream out(path, std::ios::binary);
  check(static_cast<bool>(out), ErrorKind::kIo,
        "cannot write event file " + path.string());
  if (path.extension() == ".csv") {
    write_event_csv(out, stream);
  } else {
    const auto bytes = serialize_events(stream);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  check(static_cast<bool>(out), ErrorKind::kIo,
        "failed writing event file " + path.string());
}

std::vector<std::size_t> fixed_count_slices(std::size_t events,
                                            std::size_t steps) {
  check(steps >= 1, ErrorKind::kContract, "frame integration needs T >= 1");
  std::vector<std::size_t> sizes(steps, events / steps);
  for (std::size_t i = 0; i < events % steps; ++i) ++sizes[i];
  return sizes;
}

Tensor integrate_frames(const EventStream& stream, std::size_t steps,
                        IntegrationPolicy policy) {
  check(steps >= 1, ErrorKind::kContract, "frame integration needs T >= 1");
  const std::size_t h = stream.height, w = stream.width;
  Tensor frames({steps, 2, h, w}, 0.0f);
  auto out = frames.mutable_data();
  auto bump = [&](std::size_t slice, const EventRecord& e) {
    out[((slice * 2 + e.p) * h + e.y) * w + e.x] += 1.0f;
  };
  const auto& ev = stream.events;
  if (policy == IntegrationPolicy::kFixedCount) {
    check(!ev.empty(), ErrorKind::kData,
          "fixed_count integration of an empty event stream");
    const auto sizes = fixed_count_slices(ev.size(), steps);
    std::size_t i = 0;
    for (std::size_t slice = 0; slice < steps; ++slice) {
      for (std::size_t k = 0; k < sizes[slice]; ++k) bump(slice, ev[i++]);
    }
  } else if (!ev.empty()) {
    const std::uint64_t first = ev.front().t;
    const std::uint64_t span = static_cast<std::uint64_t>(ev.back().t) - first + 1;
    for (const auto& e : ev) {
      const std::uint64_t slice = (e.t - first) * steps / span;
      bump(static_cast<std::size_t>(slice), e);
    }
  }
  return frames;
}

Tensor downsample_spatial(const Tensor& frames, std::size_t factor) {
  check(frames.rank() == 4, ErrorKind::kDimension,
        "downsample_spatial: expected [T,C,H,W], got " +
            shape_to_string(frames.shape()));
  check(factor >= 1, ErrorKind::kContract, "downsample factor must be >= 1");
  const auto& s = frames.shape();
  check(s[2] % factor == 0 && s[3] % factor == 0, ErrorKind::kDimension,
        "downsample_spatial: spatial dims " + std::to_string(s[2]) + "x" +
            std::to_string(s[3]) + " not divisible by " + std::to_string(factor));
  const std::size_t oh = s[2] / factor, ow = s[3] / factor;
  Tensor out({s[0], s[1], oh, ow}, 0.0f);
  const auto in = frames.data();
  auto y = out.mutable_data();
  for (std::size_t p = 0; p < s[0] * s[1]; ++p) {
    for (std::size_t r = 0; r < s[2]; ++r) {
      for (std::size_t c = 0; c < s[3]; ++c) {
        y[(p * oh + r / factor) * ow + c / factor] += in[(p * s[2] + r) * s[3] + c];
      }
    }
  }
  return out;
}

}  // namespace trr
