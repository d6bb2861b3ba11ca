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

#include "trr/model.hpp"

namespace trr {

// Checkpoint layout (little-endian):
//   "TRCK" | u32 version=1 | u64 manifest bytes | manifest (UTF-8 JSON) |
//   payload of f32 values
// The manifest records the model configuration and, per tensor, its name,
// shape, byte offset into the payload and element count.
std::vector<std::uint8_t> serialize_checkpoint(const SnnModel& model);
void save_checkpoint(const SnnModel& model, const std::filesystem::path& path);

// Rebuilds the model the checkpoint describes.
SnnModel load_checkpoint(const std::filesystem::path& path);
SnnModel parse_checkpoint(std::span<const std::uint8_t> bytes);

// Loads weights into an already configured model; any difference in
// architecture, tensor names or shapes is a checkpoint error.
void load_checkpoint_into(SnnModel& model, const std::filesystem::path& path);
void parse_checkpoint_into(SnnModel& model, std::span<const std::uint8_t> bytes);

ModelConfig read_checkpoint_config(const std::filesystem::path& path);

}  // namespace trr
