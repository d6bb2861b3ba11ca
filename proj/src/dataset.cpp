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

#include "trr/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "rng.hpp"
#include "trr/error.hpp"

namespace trr {

namespace {

constexpr char kMagic[4] = {'T', 'R', 'D', 'S'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  if constexpr (std::is_same_v<T, float>) {
    std::uint32_t bits;
    std::memcpy(&bits, &value, 4);
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  } else {
    using U = std::make_unsigned_t<T>;
    const auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(u >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, std::size_t& offset) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw ParseError("truncated dataset file", offset);
  offset += sizeof(T);
  if constexpr (std::is_same_v<T, float>) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  } else {
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<U>(buf[i]) << (8 * i));
    return static_cast<T>(u);
  }
}

Dataset empty_like(const Dataset& d) {
  Dataset out;
  out.kind = d.kind;
  out.timesteps = d.timesteps;
  out.channels = d.channels;
  out.height = d.height;
  out.width = d.width;
  out.classes = d.classes;
  return out;
}

Tensor render_blobs(const std::vector<std::pair<float, float>>& centres,
                    float sigma, float dx, float dy, std::size_t h,
                    std::size_t w) {
  Tensor img({1, h, w}, 0.0f);
  auto v = img.mutable_data();
  const float inv = 1.0f / (2.0f * sigma * sigma);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (const auto& [cx, cy] : centres) {
        const float ex = static_cast<float>(x) - (cx + dx);
        const float ey = static_cast<float>(y) - (cy + dy);
        acc += std::exp(-(ex * ex + ey * ey) * inv);
      }
      v[y * w + x] = std::min(acc, 1.0f);
    }
  }
  return img;
}

}  // namespace

const char* to_string(SyntheticKind k) noexcept {
  return k == SyntheticKind::kMovingBar ? "moving_bar" : "static_blobs";
}

Shape Dataset::sample_shape() const {
  if (kind == InputMode::kTemporal) return {timesteps, channels, height, width};
  return {channels, height, width};
}

void Dataset::add(Tensor sample, std::int32_t label) {
  check(sample.shape() == sample_shape(), ErrorKind::kDimension,
        "dataset sample shape " + shape_to_string(sample.shape()) +
            " != expected " + shape_to_string(sample_shape()));
  check(label >= 0 && static_cast<std::size_t>(label) < classes,
        ErrorKind::kData, "label " + std::to_string(label) + " out of range");
  samples.push_back(std::move(sample));
  labels.push_back(label);
}

Batch make_batch(const Dataset& data, std::span<const std::size_t> indices) {
  check(!indices.empty(), ErrorKind::kContract, "empty batch");
  const std::size_t batch = indices.size();
  Batch out;
  out.labels.reserve(batch);
  for (auto i : indices) {
    check(i < data.size(), ErrorKind::kContract, "batch index out of range");
    out.labels.push_back(data.labels[i]);
  }
  const std::size_t frame = data.channels * data.height * data.width;
  if (data.kind == InputMode::kStatic) {
    out.input = Tensor({batch, data.channels, data.height, data.width});
    auto dst = out.input.mutable_data();
    for (std::size_t b = 0; b < batch; ++b) {
      const auto src = data.samples[indices[b]].data();
      std::copy(src.begin(), src.end(), dst.begin() + b * frame);
    }
    return out;
  }
  const std::size_t steps = data.timesteps;
  out.input = Tensor({steps, batch, data.channels, data.height, data.width});
  auto dst = out.input.mutable_data();
  for (std::size_t b = 0; b < batch; ++b) {
    const auto src = data.samples[indices[b]].data();
    for (std::size_t t = 0; t < steps; ++t) {
      std::copy_n(src.begin() + t * frame, frame,
                  dst.begin() + (t * batch + b) * frame);
    }
  }
  return out;
}

Tensor encode_static(const Tensor& batch, std::size_t steps) {
  check(steps >= 1, ErrorKind::kContract, "encode_static: T must be >= 1");
  Shape shape{steps};
  shape.insert(shape.end(), batch.shape().begin(), batch.shape().end());
  Tensor out(shape);
  const auto src = batch.data();
  auto dst = out.mutable_data();
  for (std::size_t t = 0; t < steps; ++t) {
    std::copy(src.begin(), src.end(), dst.begin() + t * src.size());
  }
  return out;
}

Tensor render_moving_bar(const BarParams& bar, std::size_t steps,
                         std::size_t height, std::size_t width) {
  Tensor frames({steps, 2, height, width}, 0.0f);
  auto out = frames.mutable_data();
  const float nx = std::cos(bar.axis_angle), ny = std::sin(bar.axis_angle);
  const float middle = static_cast<float>(steps - 1) * 0.5f;
  for (std::size_t t = 0; t < steps; ++t) {
    // Symmetric about the middle step, so reversing time is the same as
    // flipping the direction.
    const float pos =
        bar.offset + bar.direction * bar.speed * (static_cast<float>(t) - middle);
    for (std::size_t y = 0; y < height; ++y) {
      const float py = static_cast<float>(y) + 0.5f - static_cast<float>(height) * 0.5f;
      for (std::size_t x = 0; x < width; ++x) {
        const float px = static_cast<float>(x) + 0.5f - static_cast<float>(width) * 0.5f;
        const float d = std::fabs(px * nx + py * ny - pos);
        if (d < bar.half_width) {
          out[((t * 2 + 0) * height + y) * width + x] = 1.0f;
        } else if (d < bar.half_width + 1.0f) {
          out[((t * 2 + 1) * height + y) * width + x] = 1.0f;
        }
      }
    }
  }
  return frames;
}

DatasetSplit split_per_class(const Dataset& all, double train_fraction) {
  check(train_fraction > 0.0 && train_fraction <= 1.0, ErrorKind::kContract,
        "train fraction must lie in (0,1]");
  std::vector<std::size_t> per_class(all.classes, 0);
  for (auto y : all.labels) ++per_class[y];
  std::vector<std::size_t> quota(all.classes);
  for (std::size_t k = 0; k < all.classes; ++k) {
    quota[k] = static_cast<std::size_t>(
        std::llround(static_cast<double>(per_class[k]) * train_fraction));
  }
  DatasetSplit split{empty_like(all), empty_like(all)};
  std::vector<std::size_t> seen(all.classes, 0);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto y = all.labels[i];
    auto& dst = seen[y]++ < quota[y] ? split.train : split.test;
    dst.samples.push_back(all.samples[i]);
    dst.labels.push_back(y);
  }
  return split;
}

DatasetSplit generate_synthetic(const SyntheticDatasetSpec& spec) {
  check(spec.classes >= 2 && spec.samples_per_class >= 1 && spec.timesteps >= 1,
        ErrorKind::kContract,
        "synthetic spec needs classes >= 2, samples_per_class >= 1, T >= 1");
  check(spec.height >= 4 && spec.width >= 4, ErrorKind::kContract,
        "synthetic spec needs at least 4x4 pixels");
  check(spec.noise >= 0.0f && spec.noise <= 1.0f, ErrorKind::kContract,
        "noise must lie in [0,1]");
  detail::SplitMix64 rng(detail::mix_seed(spec.seed, 0x73796e7468ull));

  Dataset all;
  all.classes = spec.classes;
  all.height = spec.height;
  all.width = spec.width;

  if (spec.kind == SyntheticKind::kMovingBar) {
    all.kind = InputMode::kTemporal;
    all.timesteps = spec.timesteps;
    all.channels = 2;
    const std::size_t axes = (spec.classes + 1) / 2;
    const float extent = static_cast<float>(std::min(spec.height, spec.width));
    const float slow = extent / 16.0f, fast = 2.0f * slow;
    for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
      for (std::size_t k = 0; k < spec.classes; ++k) {
        BarParams bar;
        bar.axis_angle = std::numbers::pi_v<float> * static_cast<float>(k / 2) /
                         static_cast<float>(axes);
        bar.speed = (k % 2 == 0) ? slow : fast;
        bar.direction = rng.below(2) == 0 ? 1.0f : -1.0f;
        bar.offset = rng.uniform(-0.15f, 0.15f) * extent;
        bar.half_width = rng.uniform(0.8f, 1.3f) * extent / 16.0f;
        Tensor frames = render_moving_bar(bar, spec.timesteps, spec.height, spec.width);
        for (auto& v : frames.mutable_data()) {
          if (rng.uniform() < spec.noise) v += 1.0f;
        }
        all.add(std::move(frames), static_cast<std::int32_t>(k));
      }
    }
  } else {
    all.kind = InputMode::kStatic;
    all.timesteps = 0;
    all.channels = 1;
    const float h = static_cast<float>(spec.height), w = static_cast<float>(spec.width);
    std::vector<std::vector<std::pair<float, float>>> templates(spec.classes);
    for (auto& centres : templates) {
      for (int b = 0; b < 2; ++b) {
        centres.emplace_back(rng.uniform(0.2f, 0.8f) * w, rng.uniform(0.2f, 0.8f) * h);
      }
    }
    const float sigma = std::min(h, w) / 10.0f;
    for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
      for (std::size_t k = 0; k < spec.classes; ++k) {
        const float dx = static_cast<float>(rng.below(3)) - 1.0f;
        const float dy = static_cast<float>(rng.below(3)) - 1.0f;
        Tensor img = render_blobs(templates[k], sigma, dx, dy, spec.height, spec.width);
        for (auto& v : img.mutable_data()) v += spec.noise * rng.uniform(-1.0f, 1.0f);
        all.add(std::move(img), static_cast<std::int32_t>(k));
      }
    }
  }
  return split_per_class(all, spec.train_fraction);
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  check(static_cast<bool>(out), ErrorKind::kIo, "cannot write dataset " + path.string());
  out.write(kMagic, 4);
  write_le<std::uint16_t>(out, kVersion);
  write_le<std::uint8_t>(out, data.kind == InputMode::kTemporal ? 0 : 1);
  write_le<std::uint8_t>(out, 0);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.timesteps));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.channels));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.height));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.width));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.classes));
  write_le<std::uint64_t>(out, data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    write_le<std::int32_t>(out, data.labels[i]);
    for (float v : data.samples[i].data()) write_le<float>(out, v);
  }
  check(static_cast<bool>(out), ErrorKind::kIo, "failed writing dataset " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  check(static_cast<bool>(in), ErrorKind::kIo, "cannot open dataset " + path.string());
  std::size_t offset = 0;
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw ParseError("bad dataset magic", 0);
  offset = 4;
  const auto version = read_le<std::uint16_t>(in, offset);
  if (version != kVersion) {
    throw ParseError("unsupported dataset version " + std::to_string(version), 4);
  }
  Dataset d;
  const auto kind = read_le<std::uint8_t>(in, offset);
  if (kind > 1) throw ParseError("bad dataset kind", offset - 1);
  d.kind = kind == 0 ? InputMode::kTemporal : InputMode::kStatic;
  read_le<std::uint8_t>(in, offset);
  d.timesteps = read_le<std::uint32_t>(in, offset);
  d.channels = read_le<std::uint32_t>(in, offset);
  d.height = read_le<std::uint32_t>(in, offset);
  d.width = read_le<std::uint32_t>(in, offset);
  d.classes = read_le<std::uint32_t>(in, offset);
  const auto count = read_le<std::uint64_t>(in, offset);
  const std::size_t numel = shape_numel(d.sample_shape());
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t record_offset = offset;
    const auto label = read_le<std::int32_t>(in, offset);
    if (label < 0 || static_cast<std::size_t>(label) >= d.classes) {
      throw ParseError("sample " + std::to_string(i) + ": label out of range",
                       record_offset);
    }
    std::vector<float> values(numel);
    for (auto& v : values) v = read_le<float>(in, offset);
    d.samples.emplace_back(d.sample_shape(), std::move(values));
    d.labels.push_back(label);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError("trailing bytes in dataset file", offset);
  }
  return d;
}

}  // namespace trr
