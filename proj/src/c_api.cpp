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

#include "trr/trr.h"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <new>
#include <string>

#include "trr/checkpoint.hpp"
#include "trr/config.hpp"
#include "trr/error.hpp"
#include "trr/events.hpp"
#include "trr/training.hpp"

struct trr_config {
  trr::RunConfig config;
};

struct trr_data {
  trr::DatasetSplit split;
};

struct trr_model {
  trr::SnnModel model;
};

namespace {

thread_local std::string g_last_error;

trr_status status_of(trr::ErrorKind kind) {
  switch (kind) {
    case trr::ErrorKind::kDimension: return TRR_ERR_DIMENSION;
    case trr::ErrorKind::kContract: return TRR_ERR_CONTRACT;
    case trr::ErrorKind::kParse: return TRR_ERR_PARSE;
    case trr::ErrorKind::kData: return TRR_ERR_DATA;
    case trr::ErrorKind::kIo: return TRR_ERR_IO;
    case trr::ErrorKind::kCheckpoint: return TRR_ERR_CHECKPOINT;
    case trr::ErrorKind::kNumeric: return TRR_ERR_NUMERIC;
    case trr::ErrorKind::kConfig: return TRR_ERR_CONFIG;
  }
  return TRR_ERR_INTERNAL;
}

template <typename F>
trr_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return TRR_OK;
  } catch (const trr::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TRR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TRR_ERR_INTERNAL;
  }
}

trr_status invalid(const char* what) {
  g_last_error = what;
  return TRR_ERR_INVALID_ARGUMENT;
}

void stamp(const trr::RunConfig& config, const char* output_dir) {
  if (!output_dir) return;
  std::filesystem::create_directories(output_dir);
  trr::save_config(config, std::filesystem::path(output_dir) / "config.ini");
}

trr::SnnModel configured_model(const trr_config* config, const trr_data* data,
                               std::uint64_t seed) {
  const auto mc = trr::make_model_config(config->config, data->split.train);
  return trr::make_calibrated_model(mc, seed, data->split.train);
}

}  // namespace

extern "C" {

const char* trr_last_error(void) { return g_last_error.c_str(); }

const char* trr_status_name(trr_status status) {
  switch (status) {
    case TRR_OK: return "ok";
    case TRR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TRR_ERR_DIMENSION: return "dimension error";
    case TRR_ERR_CONTRACT: return "contract error";
    case TRR_ERR_PARSE: return "parse error";
    case TRR_ERR_DATA: return "data error";
    case TRR_ERR_IO: return "io error";
    case TRR_ERR_CHECKPOINT: return "checkpoint error";
    case TRR_ERR_NUMERIC: return "numeric error";
    case TRR_ERR_CONFIG: return "config error";
    case TRR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* trr_version(void) { return "0.1.0"; }

trr_status trr_config_create(trr_config** out) {
  if (!out) return invalid("trr_config_create: out is NULL");
  return guarded([&] { *out = new trr_config{}; });
}

trr_status trr_config_load(const char* path, trr_config** out) {
  if (!path || !out) return invalid("trr_config_load: NULL argument");
  return guarded([&] { *out = new trr_config{trr::load_config(path)}; });
}

trr_status trr_config_set(trr_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return invalid("trr_config_set: NULL argument");
  return guarded([&] { trr::set_config_value(config->config, key, value); });
}

trr_status trr_config_apply(trr_config* config, const char* assignment) {
  if (!config || !assignment) return invalid("trr_config_apply: NULL argument");
  return guarded([&] { trr::apply_override(config->config, assignment); });
}

trr_status trr_config_get(const trr_config* config, const char* key, char* buf,
                          size_t buf_size, size_t* needed) {
  if (!config || !key) return invalid("trr_config_get: NULL argument");
  return guarded([&] {
    const std::string value = trr::get_config_value(config->config, key);
    if (needed) *needed = value.size() + 1;
    if (buf && buf_size > value.size()) std::memcpy(buf, value.c_str(), value.size() + 1);
  });
}

trr_status trr_config_save(const trr_config* config, const char* path) {
  if (!config || !path) return invalid("trr_config_save: NULL argument");
  return guarded([&] { trr::save_config(config->config, path); });
}

void trr_config_destroy(trr_config* config) { delete config; }

trr_status trr_data_prepare(const trr_config* config, trr_data** out) {
  if (!config || !out) return invalid("trr_data_prepare: NULL argument");
  return guarded([&] { *out = new trr_data{trr::prepare_data(config->config)}; });
}

trr_status trr_data_save(const trr_data* data, const char* train_path,
                         const char* test_path) {
  if (!data || !train_path || !test_path) return invalid("trr_data_save: NULL argument");
  return guarded([&] {
    trr::save_dataset(data->split.train, train_path);
    trr::save_dataset(data->split.test, test_path);
  });
}

trr_status trr_data_size(const trr_data* data, size_t* train, size_t* test) {
  if (!data) return invalid("trr_data_size: data is NULL");
  if (train) *train = data->split.train.size();
  if (test) *test = data->split.test.size();
  return TRR_OK;
}

void trr_data_destroy(trr_data* data) { delete data; }

trr_status trr_events_convert(const char* input_path, const char* output_path) {
  if (!input_path || !output_path) return invalid("trr_events_convert: NULL argument");
  return guarded([&] {
    trr::write_event_file(output_path, trr::parse_event_file(input_path));
  });
}

trr_status trr_events_to_dataset(const char* const* paths, const int32_t* labels,
                                 size_t count, size_t timesteps, trr_integration policy,
                                 size_t downsample, size_t classes,
                                 const char* output_path) {
  if (!paths || !labels || !output_path || count == 0) {
    return invalid("trr_events_to_dataset: need at least one input and an output path");
  }
  if (policy != TRR_FIXED_COUNT && policy != TRR_FIXED_DURATION) {
    return invalid("trr_events_to_dataset: unknown integration policy");
  }
  return guarded([&] {
    trr::Dataset out;
    out.kind = trr::InputMode::kTemporal;
    out.timesteps = timesteps;
    out.channels = 2;
    out.classes = classes;
    const auto p = policy == TRR_FIXED_COUNT ? trr::IntegrationPolicy::kFixedCount
                                             : trr::IntegrationPolicy::kFixedDuration;
    for (size_t i = 0; i < count; ++i) {
      const auto stream = trr::parse_event_file(paths[i]);
      trr::Tensor frames = trr::integrate_frames(stream, timesteps, p);
      if (downsample > 1) frames = trr::downsample_spatial(frames, downsample);
      if (i == 0) {
        out.height = frames.dim(2);
        out.width = frames.dim(3);
      }
      trr::check(frames.dim(2) == out.height && frames.dim(3) == out.width,
                 trr::ErrorKind::kData,
                 std::string("event file ") + paths[i] + " has different sensor dimensions");
      out.add(std::move(frames), labels[i]);
    }
    trr::save_dataset(out, output_path);
  });
}

trr_status trr_model_create(const trr_config* config, const trr_data* data, uint64_t seed,
                            trr_model** out) {
  if (!config || !data || !out) return invalid("trr_model_create: NULL argument");
  return guarded([&] { *out = new trr_model{configured_model(config, data, seed)}; });
}

trr_status trr_model_load(const trr_config* config, const trr_data* data,
                          const char* checkpoint_path, trr_model** out) {
  if (!config || !data || !checkpoint_path || !out) {
    return invalid("trr_model_load: NULL argument");
  }
  return guarded([&] {
    const auto mc = trr::make_model_config(config->config, data->split.train);
    auto model = std::make_unique<trr_model>(trr_model{trr::SnnModel(mc, 0)});
    trr::load_checkpoint_into(model->model, checkpoint_path);
    *out = model.release();
  });
}

trr_status trr_model_save(const trr_model* model, const char* path) {
  if (!model || !path) return invalid("trr_model_save: NULL argument");
  return guarded([&] { trr::save_checkpoint(model->model, path); });
}

void trr_model_destroy(trr_model* model) { delete model; }

trr_status trr_train(const trr_config* config, const trr_data* data, trr_model* model,
                     const char* output_dir, trr_train_summary* out) {
  if (!config || !data || !model) return invalid("trr_train: NULL argument");
  return guarded([&] {
    stamp(config->config, output_dir);
    trr::TrainOptions opts;
    if (output_dir) opts.output_dir = output_dir;
    const auto report = trr::train(config->config.train, model->model, data->split.train,
                                   data->split.test.size() ? &data->split.test : nullptr,
                                   opts);
    if (!out) return;
    *out = trr_train_summary{};
    out->epochs = report.epochs.size();
    out->iterations = report.iterations.size();
    out->wall_seconds = report.wall_seconds;
    if (!report.epochs.empty()) {
      const auto& last = report.epochs.back();
      out->final_train_loss = last.train_total;
      if (last.test) {
        out->test_accuracy = last.test->accuracy;
        for (int s = 0; s < TRR_NUM_STAGES; ++s) out->asfr[s] = last.test->asfr[s];
      }
    }
  });
}

trr_status trr_evaluate(const trr_model* model, const trr_data* data, trr_eval_result* out) {
  if (!model || !data || !out) return invalid("trr_evaluate: NULL argument");
  return guarded([&] {
    const auto r = trr::evaluate(model->model, data->split.test);
    out->accuracy = r.accuracy;
    out->samples = r.predictions.size();
    for (int s = 0; s < TRR_NUM_STAGES; ++s) {
      out->asfr[s] = r.asfr[s];
      out->spike_counts[s] = r.spike_counts[s];
      out->elements[s] = r.elements[s];
    }
  });
}

trr_status trr_predict(const trr_model* model, const trr_data* data, int32_t* predictions,
                       size_t capacity, size_t* count) {
  if (!model || !data) return invalid("trr_predict: NULL argument");
  return guarded([&] {
    const auto r = trr::evaluate(model->model, data->split.test);
    if (count) *count = r.predictions.size();
    if (predictions) {
      std::copy_n(r.predictions.begin(), std::min(capacity, r.predictions.size()),
                  predictions);
    }
  });
}

trr_status trr_asfr_report(const trr_model* model, const trr_data* data,
                           const char* csv_path, double asfr[TRR_NUM_STAGES]) {
  if (!model || !data) return invalid("trr_asfr_report: NULL argument");
  return guarded([&] {
    const auto r = trr::evaluate(model->model, data->split.test);
    if (asfr) {
      for (int s = 0; s < TRR_NUM_STAGES; ++s) asfr[s] = r.asfr[s];
    }
    if (csv_path) {
      std::ofstream csv(csv_path);
      trr::check(static_cast<bool>(csv), trr::ErrorKind::kIo,
                 std::string("cannot write ") + csv_path);
      csv << "stage1,stage2,stage3,stage4\n" << std::setprecision(17);
      for (int s = 0; s < TRR_NUM_STAGES; ++s) csv << (s ? "," : "") << r.asfr[s];
      csv << '\n';
      trr::check(static_cast<bool>(csv), trr::ErrorKind::kIo,
                 std::string("failed writing ") + csv_path);
    }
  });
}

trr_status trr_ablate(const trr_config* config, const trr_data* data,
                      const char* output_dir, trr_ablation_row rows[4]) {
  if (!config || !data) return invalid("trr_ablate: NULL argument");
  return guarded([&] {
    stamp(config->config, output_dir);
    const auto mc = trr::make_model_config(config->config, data->split.train);
    const std::filesystem::path dir = output_dir ? output_dir : "";
    const auto table = trr::run_ablation_suite(config->config.train, mc, data->split,
                                               config->config.ablation_seeds, dir);
    if (output_dir) {
      trr::write_ablation_csv(table, dir / "ablation.csv");
      trr::write_ablation_asfr_csv(table, dir / "asfr.csv");
    }
    if (!rows) return;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& r = table.rows[i];
      rows[i] = trr_ablation_row{};
      std::strncpy(rows[i].label, r.variant.label.c_str(), sizeof rows[i].label - 1);
      rows[i].mean_accuracy = r.mean_accuracy;
      rows[i].delta_vs_baseline = r.delta_vs_baseline;
      for (int s = 0; s < TRR_NUM_STAGES; ++s) rows[i].asfr[s] = r.mean_asfr[s];
    }
  });
}

}  // extern "C"
