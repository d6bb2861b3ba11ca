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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trr/dataset.hpp"
#include "trr/losses.hpp"
#include "trr/model.hpp"

namespace trr {

enum class Optimizer { kSgdMomentum };

struct TrrConfig {
  std::size_t timesteps = 5;
  float alpha = 0.5f;
  float t_tem = 2.0f;
  std::optional<InputMode> mode;  // unset: follow the dataset
  std::size_t reversal_location = 1;
  Perturbation perturbation = Perturbation::kReverse;
  bool enable_consistency = true;
  bool enable_hybridization = true;
  bool consistency_stop_grad = false;
  Optimizer optimizer = Optimizer::kSgdMomentum;
  float lr = 0.1f;
  float momentum = 0.9f;
  float weight_decay = 1e-3f;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  float lr_decay_factor = 0.1f;
  std::size_t lr_decay_every = 30;
  std::uint64_t seed = 0;

  void validate() const;
  // True when neither extra branch is needed and training is plain CE.
  bool is_vanilla() const { return !enable_consistency && !enable_hybridization; }
};

// v <- momentum * v + (g + weight_decay * p);  p <- p - lr * v.
// Velocity buffers start at zero.
class SgdMomentum {
 public:
  SgdMomentum(std::vector<Tensor> params, float momentum, float weight_decay);
  void step(float lr);
  const std::vector<std::vector<float>>& velocity() const { return velocity_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<float>> velocity_;
  float momentum_;
  float weight_decay_;
};

void sgd_momentum_step(std::span<float> param, std::span<const float> grad,
                       std::span<float> velocity, float lr, float momentum,
                       float weight_decay);

// Learning rate for a 0-based epoch under the step schedule.
float scheduled_lr(const TrrConfig& config, std::size_t epoch);

// Training-set order for one epoch: Fisher-Yates driven by (seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t count, std::uint64_t seed,
                                     std::size_t epoch);

// Seed of the shuffle perturbation for one global iteration.
std::uint64_t iteration_shuffle_seed(std::uint64_t seed, std::size_t iteration);

struct IterationRecord {
  std::size_t epoch = 0;
  std::size_t iteration = 0;  // global, 0-based
  float lr = 0.0f;
  LossBreakdown loss;
};

struct EvalResult {
  double accuracy = 0.0;
  std::array<double, kNumStages> asfr{};
  std::array<std::uint64_t, kNumStages> spike_counts{};
  std::array<std::uint64_t, kNumStages> elements{};
  std::vector<std::int32_t> predictions;
};

struct EpochRecord {
  std::size_t epoch = 0;
  float lr = 0.0f;
  double train_ce = 0.0;  // means over the epoch's iterations
  double train_consistency = 0.0;
  double train_hybrid_ce = 0.0;
  double train_total = 0.0;
  double train_accuracy = 0.0;  // from the original branch while training
  std::optional<EvalResult> test;
  double wall_seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::vector<IterationRecord> iterations;
  double wall_seconds = 0.0;
  std::filesystem::path checkpoint_path;
};

struct TrainOptions {
  // When set, log.jsonl, summary.csv, timing.csv and model.ckpt are written
  // here.
  std::filesystem::path output_dir;
  std::size_t eval_batch_size = 128;
  // Evaluate the test set every this many epochs (0: after the last epoch
  // only).
  std::size_t eval_interval = 1;
  std::function<void(const IterationRecord&)> on_iteration;
};

// Fresh model for `seed` whose affines are calibrated on the first
// (up to) 128 training samples: mean 0, standard deviation 1.
SnnModel make_calibrated_model(const ModelConfig& config, std::uint64_t seed,
                               const Dataset& train_set);

// Argmax with ties to the lowest index.
std::vector<std::int32_t> argmax_rows(const Tensor& logits);

EvalResult evaluate(const SnnModel& model, const Dataset& data,
                    std::size_t batch_size = 128);

struct StepOutput {
  TrrLoss loss;
  Tensor logits;  // original branch
};

// Forward pass and loss of one training step, without updating anything.
StepOutput training_step_loss(const TrrConfig& config, const SnnModel& model,
                       const Batch& batch, InputMode mode,
                       std::uint64_t shuffle_seed);

TrainReport train(const TrrConfig& config, SnnModel& model, const Dataset& train_set,
                  const Dataset* test_set = nullptr, const TrainOptions& options = {});

struct AblationVariant {
  std::string label;
  bool consistency;
  bool hybridization;
};

// Baseline, +TR (consistency only), +FH (hybridization only), TRR (both).
std::vector<AblationVariant> ablation_variants();

struct AblationRow {
  AblationVariant variant;
  std::vector<double> accuracy;  // per seed, in [0,1]
  double mean_accuracy = 0.0;
  double delta_vs_baseline = 0.0;  // accuracy points (percent)
  std::array<double, kNumStages> mean_asfr{};
};

struct AblationTable {
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;
};

// Trains every variant for every seed on the same data. The variant's
// perturbation is forced to `reverse` unless the base config says shuffle;
// the baseline always runs without perturbation.
AblationTable run_ablation_suite(const TrrConfig& base, const ModelConfig& model,
                                 const DatasetSplit& data,
                                 const std::vector<std::uint64_t>& seeds,
                                 const std::filesystem::path& output_dir = {});

// ablation.csv: one row per variant with accuracies in percent.
void write_ablation_csv(const AblationTable& table, const std::filesystem::path& path);
// asfr.csv: variant,stage1..stage4 with seed-averaged test-set ASFR.
void write_ablation_asfr_csv(const AblationTable& table,
                             const std::filesystem::path& path);

}  // namespace trr
