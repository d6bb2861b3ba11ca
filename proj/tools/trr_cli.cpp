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

// Command-line front end. Talks to the engine only through the C API.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trr/trr.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Carries a failed status out of a command.
struct Failure {
  trr_status status;
  std::string message;
};

void ok(trr_status status) {
  if (status != TRR_OK) throw Failure{status, trr_last_error()};
}

template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Destroy(ptr); }
};

using Config = Handle<trr_config, trr_config_destroy>;
using Data = Handle<trr_data, trr_data_destroy>;
using Model = Handle<trr_model, trr_model_destroy>;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

fs::path output_dir(const Common& c, const std::string& verb) {
  if (!c.out_dir.empty()) return c.out_dir;
  const char* root = std::getenv("TRR_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "runs") / verb;
}

void load_config(const Common& c, Config& config) {
  if (c.config_path.empty()) {
    ok(trr_config_create(&config.ptr));
  } else {
    ok(trr_config_load(c.config_path.c_str(), &config.ptr));
  }
  for (const auto& o : c.overrides) ok(trr_config_apply(config.ptr, o.c_str()));
}

std::string config_value(const Config& config, const char* key) {
  size_t needed = 0;
  ok(trr_config_get(config.ptr, key, nullptr, 0, &needed));
  std::string value(needed, '\0');
  ok(trr_config_get(config.ptr, key, value.data(), value.size(), &needed));
  value.resize(needed - 1);
  return value;
}

void stamp_config(const Config& config, const fs::path& dir) {
  fs::create_directories(dir);
  ok(trr_config_save(config.ptr, (dir / "config.ini").c_str()));
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "Config file (key = value with sections)");
  cmd->add_option("-s,--set", c.overrides, "Override a config key: key=value");
  cmd->add_option("-o,--out", c.out_dir,
                  "Output directory (default: $TRR_OUTPUT_ROOT/<verb> or runs/<verb>)");
}

int gen_data(const Common& c) {
  Config config;
  load_config(c, config);
  const fs::path dir = output_dir(c, "gen-data");
  stamp_config(config, dir);
  Data data;
  ok(trr_data_prepare(config.ptr, &data.ptr));
  ok(trr_data_save(data.ptr, (dir / "train.trds").c_str(), (dir / "test.trds").c_str()));
  size_t train = 0, test = 0;
  ok(trr_data_size(data.ptr, &train, &test));
  std::cout << "wrote " << train << " training and " << test << " test samples to "
            << dir.string() << "\n";
  return 0;
}

struct ConvertArgs {
  std::vector<std::string> inputs;
  std::vector<int> labels;
  std::string output;
  std::string policy = "fixed_count";
  size_t downsample = 1;
};

int convert_events(const Common& c, const ConvertArgs& a) {
  const fs::path out = a.output;
  if (out.extension() != ".trds") {
    if (a.inputs.size() != 1) {
      throw Failure{TRR_ERR_INVALID_ARGUMENT, "format conversion takes exactly one --input"};
    }
    ok(trr_events_convert(a.inputs[0].c_str(), a.output.c_str()));
    std::cout << "wrote " << a.output << "\n";
    return 0;
  }
  if (a.labels.size() != a.inputs.size()) {
    throw Failure{TRR_ERR_INVALID_ARGUMENT,
                  "building a dataset needs one --label per --input"};
  }
  Config config;
  load_config(c, config);
  const size_t steps = std::stoul(config_value(config, "timesteps"));
  const size_t classes = std::stoul(config_value(config, "classes"));
  std::vector<const char*> paths;
  for (const auto& p : a.inputs) paths.push_back(p.c_str());
  std::vector<int32_t> labels(a.labels.begin(), a.labels.end());
  const trr_integration policy =
      a.policy == "fixed_duration" ? TRR_FIXED_DURATION : TRR_FIXED_COUNT;
  ok(trr_events_to_dataset(paths.data(), labels.data(), paths.size(), steps, policy,
                           a.downsample, classes, a.output.c_str()));
  std::cout << "wrote " << paths.size() << " samples to " << a.output << "\n";
  return 0;
}

int train(const Common& c) {
  Config config;
  load_config(c, config);
  const fs::path dir = output_dir(c, "train");
  Data data;
  ok(trr_data_prepare(config.ptr, &data.ptr));
  Model model;
  const auto seed = std::stoull(config_value(config, "seed"));
  ok(trr_model_create(config.ptr, data.ptr, seed, &model.ptr));
  trr_train_summary summary{};
  ok(trr_train(config.ptr, data.ptr, model.ptr, dir.c_str(), &summary));
  std::cout << std::fixed << std::setprecision(4) << "epochs " << summary.epochs
            << "  iterations " << summary.iterations << "  final loss "
            << summary.final_train_loss << "  test accuracy "
            << 100.0 * summary.test_accuracy << "%\n"
            << "run directory " << dir.string() << "\n";
  return 0;
}

int eval(const Common& c, const std::string& checkpoint) {
  Config config;
  load_config(c, config);
  const fs::path dir = output_dir(c, "eval");
  stamp_config(config, dir);
  Data data;
  ok(trr_data_prepare(config.ptr, &data.ptr));
  Model model;
  ok(trr_model_load(config.ptr, data.ptr, checkpoint.c_str(), &model.ptr));
  trr_eval_result r{};
  ok(trr_evaluate(model.ptr, data.ptr, &r));
  std::vector<int32_t> pred(r.samples);
  size_t count = 0;
  ok(trr_predict(model.ptr, data.ptr, pred.data(), pred.size(), &count));
  std::ofstream csv(dir / "predictions.csv");
  csv << "index,prediction\n";
  for (size_t i = 0; i < count; ++i) csv << i << ',' << pred[i] << '\n';
  std::ofstream summary(dir / "eval.csv");
  summary << std::setprecision(17) << "accuracy,samples,asfr_stage1,asfr_stage2,"
          << "asfr_stage3,asfr_stage4\n"
          << r.accuracy << ',' << r.samples;
  for (double a : r.asfr) summary << ',' << a;
  summary << '\n';
  std::cout << std::fixed << std::setprecision(4) << "accuracy " << 100.0 * r.accuracy
            << "% on " << r.samples << " test samples\n";
  return 0;
}

int ablate(const Common& c) {
  Config config;
  load_config(c, config);
  const fs::path dir = output_dir(c, "ablate");
  Data data;
  ok(trr_data_prepare(config.ptr, &data.ptr));
  trr_ablation_row rows[4];
  ok(trr_ablate(config.ptr, data.ptr, dir.c_str(), rows));
  std::cout << std::fixed << std::setprecision(2);
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(10) << r.label << std::right << std::setw(8)
              << 100.0 * r.mean_accuracy << "  (" << std::showpos << r.delta_vs_baseline
              << std::noshowpos << ")\n";
  }
  std::cout << "tables in " << dir.string() << "\n";
  return 0;
}

int asfr_report(const Common& c, const std::string& checkpoint) {
  Config config;
  load_config(c, config);
  const fs::path dir = output_dir(c, "asfr-report");
  stamp_config(config, dir);
  Data data;
  ok(trr_data_prepare(config.ptr, &data.ptr));
  Model model;
  ok(trr_model_load(config.ptr, data.ptr, checkpoint.c_str(), &model.ptr));
  double asfr[TRR_NUM_STAGES];
  ok(trr_asfr_report(model.ptr, data.ptr, (dir / "asfr.csv").c_str(), asfr));
  std::cout << std::fixed << std::setprecision(6);
  for (int s = 0; s < TRR_NUM_STAGES; ++s) {
    std::cout << "stage" << s + 1 << ' ' << asfr[s] << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal reversal regularization for spiking networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(trr_version()));

  Common common;
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  auto* conv = app.add_subcommand("convert-events",
                                  "Convert event files, or integrate them into a dataset");
  auto* tr = app.add_subcommand("train", "Train a model");
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  auto* ab = app.add_subcommand("ablate", "Baseline / +TR / +FH / TRR comparison");
  auto* as = app.add_subcommand("asfr-report", "Per-stage firing rates of a checkpoint");
  for (auto* cmd : {gen, conv, tr, ev, ab, as}) add_common(cmd, common);

  ConvertArgs convert;
  conv->add_option("-i,--input", convert.inputs, "Event file (binary or .csv)")->required();
  conv->add_option("-l,--label", convert.labels, "Class label per input (dataset output)");
  conv->add_option("--output", convert.output,
                   "Output: .csv or binary event file, or .trds dataset")
      ->required();
  conv->add_option("--policy", convert.policy, "Frame integration policy")
      ->check(CLI::IsMember({"fixed_count", "fixed_duration"}));
  conv->add_option("--downsample", convert.downsample, "Spatial block-sum factor")
      ->check(CLI::PositiveNumber);

  std::string checkpoint;
  for (auto* cmd : {ev, as}) {
    cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return gen_data(common);
    if (conv->parsed()) return convert_events(common, convert);
    if (tr->parsed()) return train(common);
    if (ev->parsed()) return eval(common, checkpoint);
    if (ab->parsed()) return ablate(common);
    if (as->parsed()) return asfr_report(common, checkpoint);
  } catch (const Failure& f) {
    std::cerr << "trr: " << trr_status_name(f.status) << ": " << f.message << "\n";
    const bool usage = f.status == TRR_ERR_CONFIG || f.status == TRR_ERR_INVALID_ARGUMENT;
    return usage ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "trr: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
