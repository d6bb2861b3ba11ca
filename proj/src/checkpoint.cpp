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

#include "trr/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "trr/error.hpp"

namespace trr {

namespace {

using json = nlohmann::json;

constexpr char kMagic[4] = {'T', 'R', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kPreamble = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> b, std::size_t at, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
  return v;
}

json config_to_json(const ModelConfig& c) {
  return json{{"architecture", to_string(c.architecture)},
              {"width_divisor", c.width_divisor},
              {"in_channels", c.in_channels},
              {"height", c.height},
              {"width", c.width},
              {"classes", c.classes},
              {"timesteps", c.timesteps},
              {"tau", c.lif.tau},
              {"threshold", c.lif.threshold},
              {"surrogate_width", c.lif.surrogate_width}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  const auto arch = j.at("architecture").get<std::string>();
  if (arch == "vgg9") {
    c.architecture = Architecture::kVgg9;
  } else if (arch == "vgg9_mini") {
    c.architecture = Architecture::kVgg9Mini;
  } else {
    fail(ErrorKind::kCheckpoint, "checkpoint: unknown architecture '" + arch + "'");
  }
  c.width_divisor = j.at("width_divisor").get<std::size_t>();
  c.in_channels = j.at("in_channels").get<std::size_t>();
  c.height = j.at("height").get<std::size_t>();
  c.width = j.at("width").get<std::size_t>();
  c.classes = j.at("classes").get<std::size_t>();
  c.timesteps = j.at("timesteps").get<std::size_t>();
  c.lif.tau = j.at("tau").get<float>();
  c.lif.threshold = j.at("threshold").get<float>();
  c.lif.surrogate_width = j.at("surrogate_width").get<float>();
  return c;
}

struct Parsed {
  json manifest;
  std::span<const std::uint8_t> payload;
};

Parsed split(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPreamble) throw ParseError("truncated checkpoint header", bytes.size());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ParseError("bad checkpoint magic", 0);
  const auto version = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
  if (version != kVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version), 4);
  }
  const auto length = get_le(bytes, 8, 8);
  if (length > bytes.size() - kPreamble) {
    throw ParseError("checkpoint manifest runs past end of file", 8);
  }
  Parsed p;
  const auto* text = reinterpret_cast<const char*>(bytes.data() + kPreamble);
  try {
    p.manifest = json::parse(text, text + length);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint manifest: ") + e.what(),
                     kPreamble + (e.byte > 0 ? e.byte - 1 : 0));  // e.byte is 1-based
  }
  p.payload = bytes.subspan(kPreamble + length);
  return p;
}

void fill_model(SnnModel& model, const Parsed& p) {
  const auto& tensors = p.manifest.at("tensors");
  auto params = model.parameters();
  check(tensors.size() == params.size(), ErrorKind::kCheckpoint,
        "checkpoint holds " + std::to_string(tensors.size()) +
            " tensors, model expects " + std::to_string(params.size()));
  std::uint64_t expected_bytes = 0;
  for (const auto& param : params) expected_bytes += 4 * param.tensor.numel();
  check(p.payload.size() == expected_bytes, ErrorKind::kCheckpoint,
        "checkpoint payload holds " + std::to_string(p.payload.size()) +
            " bytes, model needs " + std::to_string(expected_bytes));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& entry = tensors[i];
    const auto name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<Shape>();
    const auto offset = entry.at("offset").get<std::uint64_t>();
    const auto count = entry.at("count").get<std::uint64_t>();
    auto& param = params[i];
    check(name == param.name, ErrorKind::kCheckpoint,
          "checkpoint tensor " + std::to_string(i) + " is '" + name +
              "', model expects '" + param.name + "'");
    check(shape == param.tensor.shape(), ErrorKind::kCheckpoint,
          "checkpoint tensor '" + name + "' has shape " + shape_to_string(shape) +
              ", model expects " + shape_to_string(param.tensor.shape()));
    check(count == shape_numel(shape) && offset % 4 == 0 &&
              offset + 4 * count <= p.payload.size(),
          ErrorKind::kCheckpoint,
          "checkpoint tensor '" + name + "' has an invalid payload range");
    auto dst = param.tensor.mutable_data();
    for (std::size_t k = 0; k < count; ++k) {
      const auto bits = static_cast<std::uint32_t>(get_le(p.payload, offset + 4 * k, 4));
      std::memcpy(&dst[k], &bits, 4);
    }
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  check(static_cast<bool>(in), ErrorKind::kIo, "cannot open checkpoint " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const SnnModel& model) {
  json tensors = json::array();
  std::uint64_t offset = 0;
  const auto params = model.parameters();
  for (const auto& p : params) {
    tensors.push_back({{"name", p.name},
                       {"shape", p.tensor.shape()},
                       {"offset", offset},
                       {"count", p.tensor.numel()}});
    offset += 4 * p.tensor.numel();
  }
  const json manifest{{"model", config_to_json(model.config())}, {"tensors", tensors}};
  const std::string text = manifest.dump();

  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.reserve(out.size() + offset);
  for (const auto& p : params) {
    for (float v : p.tensor.data()) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put_u32(out, bits);
    }
  }
  return out;
}

void save_checkpoint(const SnnModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(model);
  std::ofstream out(path, std::ios::binary);
  check(static_cast<bool>(out), ErrorKind::kIo, "cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  check(static_cast<bool>(out), ErrorKind::kIo, "failed writing checkpoint " + path.string());
}

SnnModel parse_checkpoint(std::span<const std::uint8_t> bytes) {
  const auto p = split(bytes);
  ModelConfig config;
  try {
    config = config_from_json(p.manifest.at("model"));
  } catch (const json::exception& e) {
    fail(ErrorKind::kCheckpoint, std::string("checkpoint manifest: ") + e.what());
  }
  SnnModel model(config, 0);
  try {
    fill_model(model, p);
  } catch (const json::exception& e) {
    fail(ErrorKind::kCheckpoint, std::string("checkpoint manifest: ") + e.what());
  }
  return model;
}

SnnModel load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

void parse_checkpoint_into(SnnModel& model, std::span<const std::uint8_t> bytes) {
  const auto p = split(bytes);
  ModelConfig stored;
  try {
    stored = config_from_json(p.manifest.at("model"));
  } catch (const json::exception& e) {
    fail(ErrorKind::kCheckpoint, std::string("checkpoint manifest: ") + e.what());
  }
  const auto expected = config_to_json(model.config());
  const auto found = config_to_json(stored);
  for (const auto& [key, value] : expected.items()) {
    check(found.at(key) == value, ErrorKind::kCheckpoint,
          "checkpoint " + key + " = " + found.at(key).dump() +
              " but the configured model has " + value.dump());
  }
  try {
    fill_model(model, p);
  } catch (const json::exception& e) {
    fail(ErrorKind::kCheckpoint, std::string("checkpoint manifest: ") + e.what());
  }
}

void load_checkpoint_into(SnnModel& model, const std::filesystem::path& path) {
  parse_checkpoint_into(model, read_file(path));
}

ModelConfig read_checkpoint_config(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const auto p = split(bytes);
  try {
    return config_from_json(p.manifest.at("model"));
  } catch (const json::exception& e) {
    fail(ErrorKind::kCheckpoint, std::string("checkpoint manifest: ") + e.what());
  }
}

}  // namespace trr
