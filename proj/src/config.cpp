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

#include "trr/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "trr/error.hpp"

namespace trr {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  fail(ErrorKind::kConfig,
       "invalid value '" + value + "' for key '" + key + "': expected " + expected);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, const char* expected) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) bad_value(key, value, expected);
  return out;
}

float parse_float(const std::string& key, const std::string& value) {
  return parse_number<float>(key, value, "a number");
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  return parse_number<std::size_t>(key, value, "a non-negative integer");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "true or false");
}

std::string format_float(float v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

const char* source_name(DataSource s) {
  switch (s) {
    case DataSource::kMovingBar: return "moving_bar";
    case DataSource::kStaticBlobs: return "static_blobs";
    case DataSource::kFile: return "file";
  }
  return "moving_bar";
}

struct Entry {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define TRR_FLOAT(sec, name, field)                                               \
  Entry{sec, name, [](const RunConfig& c) { return format_float(c.field); },     \
        [](RunConfig& c, const std::string& v) { c.field = parse_float(name, v); }}
#define TRR_SIZE(sec, name, field)                                                \
  Entry{sec, name, [](const RunConfig& c) { return std::to_string(c.field); },   \
        [](RunConfig& c, const std::string& v) { c.field = parse_size(name, v); }}
#define TRR_BOOL(sec, name, field)                                                \
  Entry{sec, name, [](const RunConfig& c) { return format_bool(c.field); },      \
        [](RunConfig& c, const std::string& v) { c.field = parse_bool(name, v); }}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      Entry{"model", "architecture",
            [](const RunConfig& c) { return std::string(to_string(c.model.architecture)); },
            [](RunConfig& c, const std::string& v) {
              if (v == "vgg9") {
                c.model.architecture = Architecture::kVgg9;
              } else if (v == "vgg9_mini") {
                c.model.architecture = Architecture::kVgg9Mini;
              } else {
                bad_value("architecture", v, "vgg9 or vgg9_mini");
              }
            }},
      TRR_SIZE("model", "width_divisor", model.width_divisor),
      TRR_FLOAT("model", "tau", model.lif.tau),
      TRR_FLOAT("model", "threshold", model.lif.threshold),
      TRR_FLOAT("model", "surrogate_width", model.lif.surrogate_width),
      TRR_BOOL("model", "check_binary", model.check_binary),

      Entry{"data", "dataset",
            [](const RunConfig& c) { return std::string(source_name(c.data.source)); },
            [](RunConfig& c, const std::string& v) {
              if (v == "moving_bar") {
                c.data.source = DataSource::kMovingBar;
              } else if (v == "static_blobs") {
                c.data.source = DataSource::kStaticBlobs;
              } else if (v == "file") {
                c.data.source = DataSource::kFile;
              } else {
                bad_value("dataset", v, "moving_bar, static_blobs or file");
              }
            }},
      Entry{"data", "train_path",
            [](const RunConfig& c) { return c.data.train_path.string(); },
            [](RunConfig& c, const std::string& v) { c.data.train_path = v; }},
      Entry{"data", "test_path",
            [](const RunConfig& c) { return c.data.test_path.string(); },
            [](RunConfig& c, const std::string& v) { c.data.test_path = v; }},
      TRR_SIZE("data", "classes", data.classes),
      TRR_SIZE("data", "samples_per_class", data.samples_per_class),
      TRR_SIZE("data", "height", data.height),
      TRR_SIZE("data", "width", data.width),
      TRR_FLOAT("data", "noise", data.noise),
      Entry{"data", "data_seed",
            [](const RunConfig& c) { return std::to_string(c.data.seed); },
            [](RunConfig& c, const std::string& v) {
              c.data.seed = parse_number<std::uint64_t>("data_seed", v,
                                                        "a non-negative integer");
            }},
      Entry{"data", "train_fraction",
            [](const RunConfig& c) { return format_double(c.data.train_fraction); },
            [](RunConfig& c, const std::string& v) {
              c.data.train_fraction = parse_number<double>("train_fraction", v, "a number");
            }},

      TRR_SIZE("train", "timesteps", train.timesteps),
      TRR_FLOAT("train", "alpha", train.alpha),
      TRR_FLOAT("train", "t_tem", train.t_tem),
      Entry{"train", "mode",
            [](const RunConfig& c) {
              return c.train.mode ? std::string(to_string(*c.train.mode)) : "auto";
            },
            [](RunConfig& c, const std::string& v) {
              if (v == "auto") {
                c.train.mode.reset();
              } else if (v == "temporal") {
                c.train.mode = InputMode::kTemporal;
              } else if (v == "static") {
                c.train.mode = InputMode::kStatic;
              } else {
                bad_value("mode", v, "auto, temporal or static");
              }
            }},
      TRR_SIZE("train", "reversal_location", train.reversal_location),
      Entry{"train", "perturbation",
            [](const RunConfig& c) { return std::string(to_string(c.train.perturbation)); },
            [](RunConfig& c, const std::string& v) {
              if (v == "none") {
                c.train.perturbation = Perturbation::kNone;
              } else if (v == "reverse") {
                c.train.perturbation = Perturbation::kReverse;
              } else if (v == "shuffle") {
                c.train.perturbation = Perturbation::kShuffle;
              } else {
                bad_value("perturbation", v, "none, reverse or shuffle");
              }
            }},
      TRR_BOOL("train", "enable_consistency", train.enable_consistency),
      TRR_BOOL("train", "enable_hybridization", train.enable_hybridization),
      TRR_BOOL("train", "consistency_stop_grad", train.consistency_stop_grad),
      Entry{"train", "optimizer",
            [](const RunConfig&) { return std::string("sgd_momentum"); },
            [](RunConfig& c, const std::string& v) {
              if (v != "sgd_momentum") bad_value("optimizer", v, "sgd_momentum");
              c.train.optimizer = Optimizer::kSgdMomentum;
            }},
      TRR_FLOAT("train", "lr", train.lr),
      TRR_FLOAT("train", "momentum", train.momentum),
      TRR_FLOAT("train", "weight_decay", train.weight_decay),
      TRR_SIZE("train", "epochs", train.epochs),
      TRR_SIZE("train", "batch_size", train.batch_size),
      TRR_FLOAT("train", "lr_decay_factor", train.lr_decay_factor),
      TRR_SIZE("train", "lr_decay_every", train.lr_decay_every),
      Entry{"train", "seed",
            [](const RunConfig& c) { return std::to_string(c.train.seed); },
            [](RunConfig& c, const std::string& v) {
              c.train.seed = parse_number<std::uint64_t>("seed", v, "a non-negative integer");
            }},

      Entry{"ablation", "seeds",
            [](const RunConfig& c) {
              std::string out;
              for (std::size_t i = 0; i < c.ablation_seeds.size(); ++i) {
                if (i) out += ',';
                out += std::to_string(c.ablation_seeds[i]);
              }
              return out;
            },
            [](RunConfig& c, const std::string& v) {
              std::vector<std::uint64_t> seeds;
              std::stringstream ss(v);
              std::string item;
              while (std::getline(ss, item, ',')) {
                seeds.push_back(parse_number<std::uint64_t>(
                    "seeds", trim(item), "a comma-separated list of integers"));
              }
              if (seeds.empty()) bad_value("seeds", v, "at least one seed");
              c.ablation_seeds = std::move(seeds);
            }},
  };
  return table;
}

#undef TRR_FLOAT
#undef TRR_SIZE
#undef TRR_BOOL

const Entry& find_entry(const std::string& key, const std::string& section = {}) {
  std::string bare = key;
  std::string sec = section;
  if (const auto dot = key.find('.'); dot != std::string::npos) {
    sec = key.substr(0, dot);
    bare = key.substr(dot + 1);
  }
  for (const auto& e : entries()) {
    if (bare == e.key && (sec.empty() || sec == e.section)) return e;
  }
  fail(ErrorKind::kConfig, "unknown config key '" + key + "'" +
                               (section.empty() ? "" : " in section [" + section + "]"));
}

bool known_section(const std::string& s) {
  return std::any_of(entries().begin(), entries().end(),
                     [&](const Entry& e) { return s == e.section; });
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (t.front() == '[') {
      check(t.back() == ']', ErrorKind::kConfig, where + "unterminated section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      check(known_section(section), ErrorKind::kConfig,
            where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    check(eq != std::string::npos, ErrorKind::kConfig, where + "expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    try {
      find_entry(key, section).set(config, value);
    } catch (const Error& e) {
      fail(ErrorKind::kConfig, where + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  check(static_cast<bool>(in), ErrorKind::kIo, "cannot open config " + path.string());
  return parse_config(in);
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  find_entry(key).set(config, value);
}

std::string get_config_value(const RunConfig& config, const std::string& key) {
  return find_entry(key).get(config);
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  check(eq != std::string::npos, ErrorKind::kConfig,
        "override '" + assignment + "' is not of the form key=value");
  set_config_value(config, trim(std::string_view(assignment).substr(0, eq)),
                   trim(std::string_view(assignment).substr(eq + 1)));
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : entries()) keys.push_back(std::string(e.section) + "." + e.key);
  return keys;
}

std::string format_config(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& e : entries()) {
    if (section != e.section) {
      if (!section.empty()) out += '\n';
      section = e.section;
      out += "[" + section + "]\n";
    }
    out += std::string(e.key) + " = " + e.get(config) + "\n";
  }
  return out;
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  check(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out << format_config(config);
  check(static_cast<bool>(out), ErrorKind::kIo, "failed writing " + path.string());
}

DatasetSplit prepare_data(const RunConfig& config) {
  const auto& d = config.data;
  if (d.source == DataSource::kFile) {
    check(!d.train_path.empty() && !d.test_path.empty(), ErrorKind::kConfig,
          "dataset = file needs train_path and test_path");
    DatasetSplit split{load_dataset(d.train_path), load_dataset(d.test_path)};
    const auto& a = split.train;
    const auto& b = split.test;
    check(a.kind == b.kind && a.timesteps == b.timesteps && a.channels == b.channels &&
              a.height == b.height && a.width == b.width && a.classes == b.classes,
          ErrorKind::kData, "train and test dataset files disagree on their layout");
    return split;
  }
  SyntheticDatasetSpec spec;
  spec.kind = d.source == DataSource::kMovingBar ? SyntheticKind::kMovingBar
                                                 : SyntheticKind::kStaticBlobs;
  spec.classes = d.classes;
  spec.samples_per_class = d.samples_per_class;
  spec.timesteps = config.train.timesteps;
  spec.height = d.height;
  spec.width = d.width;
  spec.noise = d.noise;
  spec.seed = d.seed;
  spec.train_fraction = d.train_fraction;
  return generate_synthetic(spec);
}

ModelConfig make_model_config(const RunConfig& config, const Dataset& data) {
  ModelConfig m;
  m.architecture = config.model.architecture;
  m.width_divisor = config.model.width_divisor;
  m.lif = config.model.lif;
  m.check_binary = config.model.check_binary;
  m.in_channels = data.channels;
  m.height = data.height;
  m.width = data.width;
  m.classes = data.classes;
  m.timesteps = config.train.timesteps;
  m.validate();
  return m;
}

}  // namespace trr
