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

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "trr/dataset.hpp"
#include "trr/model.hpp"
#include "trr/training.hpp"

namespace trr {

enum class DataSource { kMovingBar, kStaticBlobs, kFile };

struct DataSettings {
  DataSource source = DataSource::kMovingBar;
  std::filesystem::path train_path;  // source == file
  std::filesystem::path test_path;
  std::size_t classes = 10;
  std::size_t samples_per_class = 100;
  std::size_t height = 16;
  std::size_t width = 16;
  float noise = 0.05f;
  std::uint64_t seed = 0;
  double train_fraction = 0.9;
};

struct ModelSettings {
  Architecture architecture = Architecture::kVgg9Mini;
  std::size_t width_divisor = 16;
  LIFParams lif;
  bool check_binary = false;
};

// Everything a run needs. Every field has a key in exactly one section.
struct RunConfig {
  ModelSettings model;
  DataSettings data;
  TrrConfig train;
  std::vector<std::uint64_t> ablation_seeds{0, 1, 2};
};

// Config text: "[model]", "[data]", "[train]" and "[ablation]" sections
// holding "key = value" lines; '#' and ';' start comment lines. Keys are
// unique across sections, so overrides may name them bare ("alpha=0.3") or
// qualified ("train.alpha=0.3"). Unknown keys and sections are config
// errors naming the offender.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

void apply_override(RunConfig& config, const std::string& assignment);
void set_config_value(RunConfig& config, const std::string& key,
                      const std::string& value);
std::string get_config_value(const RunConfig& config, const std::string& key);
std::vector<std::string> config_keys();  // qualified, in canonical order

// Every key with its resolved value, in canonical order; parsing the result
// gives back an identical config.
std::string format_config(const RunConfig& config);
void save_config(const RunConfig& config, const std::filesystem::path& path);

DatasetSplit prepare_data(const RunConfig& config);
ModelConfig make_model_config(const RunConfig& config, const Dataset& data);

}  // namespace trr
