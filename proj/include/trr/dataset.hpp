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
#include <span>
#include <vector>

#include "trr/losses.hpp"
#include "trr/model.hpp"
#include "trr/tensor.hpp"

namespace trr {

// Labelled samples. Temporal samples are [T,C,H,W] event-count frames;
// static samples are [C,H,W] images.
struct Dataset {
  InputMode kind = InputMode::kTemporal;
  std::size_t timesteps = 0;  // 0 for static data
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t classes = 0;
  std::vector<Tensor> samples;
  Labels labels;

  std::size_t size() const { return samples.size(); }
  Shape sample_shape() const;
  void add(Tensor sample, std::int32_t label);
};

struct Batch {
  Tensor input;  // [T,B,C,H,W] or [B,C,H,W]
  Labels labels;
};

Batch make_batch(const Dataset& data, std::span<const std::size_t> indices);

// Repeats a static batch [B,C,H,W] along a new leading time axis.
Tensor encode_static(const Tensor& batch, std::size_t steps);

enum class SyntheticKind { kMovingBar, kStaticBlobs };

const char* to_string(SyntheticKind k) noexcept;

struct SyntheticDatasetSpec {
  SyntheticKind kind = SyntheticKind::kMovingBar;
  std::size_t classes = 10;
  std::size_t samples_per_class = 100;
  std::size_t timesteps = 5;
  std::size_t height = 16;
  std::size_t width = 16;
  float noise = 0.05f;  // per-pixel probability of a spurious event
  std::uint64_t seed = 0;
  double train_fraction = 0.9;
};

struct DatasetSplit {
  Dataset train;
  Dataset test;
};

// Moving bar: class = (motion axis, speed); the direction along the axis
// is drawn per sample, so reversing a sample in time yields a sample of
// the same class moving the opposite way.
// Static blobs: class = a fixed random arrangement of Gaussian blobs.
DatasetSplit generate_synthetic(const SyntheticDatasetSpec& spec);

struct BarParams {
  float axis_angle = 0.0f;  // radians, direction of motion axis
  float speed = 1.0f;       // pixels per step
  float direction = 1.0f;   // +1 or -1 along the axis
  float offset = 0.0f;      // bar position at the middle step
  float half_width = 1.0f;
};

// Noise-free bar rendering as [T, 2, H, W] counts: channel 0 marks the
// bar body, channel 1 its one-pixel halo.
Tensor render_moving_bar(const BarParams& bar, std::size_t steps,
                         std::size_t height, std::size_t width);

// Per-class split: the first round(n * fraction) samples of every class go
// to train.
DatasetSplit split_per_class(const Dataset& all, double train_fraction);

// Dataset file layout (little-endian):
//   "TRDS" | u16 version=1 | u8 kind (0 temporal, 1 static) | u8 0 |
//   u32 T | u32 C | u32 H | u32 W | u32 classes | u64 count |
//   count x (i32 label | f32 values in sample order)
void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace trr
