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
#include <string>
#include <vector>

#include "trr/lif.hpp"
#include "trr/losses.hpp"
#include "trr/tensor.hpp"

namespace trr {

enum class Architecture { kVgg9, kVgg9Mini };
enum class InputMode { kTemporal, kStatic };
enum class Perturbation { kNone, kReverse, kShuffle };

const char* to_string(Architecture a) noexcept;
const char* to_string(InputMode m) noexcept;
const char* to_string(Perturbation p) noexcept;

inline constexpr std::size_t kNumStages = 4;
inline constexpr std::size_t kConvLayers = 8;

struct ModelConfig {
  Architecture architecture = Architecture::kVgg9Mini;
  std::size_t width_divisor = 16;  // vgg9_mini: full widths divided by this
  std::size_t in_channels = 2;
  std::size_t height = 16;
  std::size_t width = 16;
  std::size_t classes = 10;
  std::size_t timesteps = 5;
  LIFParams lif;
  SpikeMode spike_mode = SpikeMode::kHeaviside;
  bool check_binary = false;  // assert every stage emits {0,1} only

  // Output channels of the eight conv-spiking layers.
  std::array<std::size_t, kConvLayers> channels() const;
  void validate() const;
};

struct NamedParameter {
  std::string name;
  Tensor tensor;
};

// VGG-9: four stages of two conv-spiking layers each, average pooling
// between stages, then global average pool and a shared fc head.
// Stage 1 is the spike encoder.
class SnnModel {
 public:
  SnnModel(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }

  // Parameters in a fixed order; the handles alias the model's storage.
  std::vector<NamedParameter> parameters() const;
  void zero_grad();

  // Stage s in [1, kNumStages] on a train [T,B,C,H,W]. Stages after the
  // first pool their input first. Returns the stage's spike train.
  Tensor run_stage(std::size_t stage, const Tensor& train) const;

  // Data-dependent initialisation of the per-channel affines: layer by
  // layer, scale and shift are set so the affine output over `input` has
  // per-channel mean `target_mean` and standard deviation `target_std`.
  void calibrate(const Tensor& input, InputMode mode, float target_mean,
                 float target_std);

  // fc applied per timestep to pooled features, then averaged over T.
  Tensor head(const Tensor& spikes) const;
  // fc applied to a firing-rate map [B,C,H,W].
  Tensor head_from_rate(const Tensor& rate) const;

 private:
  struct ConvLayer {
    Tensor weight;  // [Cout, Cin, 3, 3]
    Tensor scale;   // [Cout]
    Tensor shift;   // [Cout]
  };

  Tensor conv_spiking(const ConvLayer& layer, const Tensor& train) const;

  ModelConfig config_;
  std::vector<ConvLayer> convs_;
  Tensor fc_weight_;
  Tensor fc_bias_;
};

// Spike trains emitted by each stage during a forward pass.
struct ForwardTrace {
  std::vector<Tensor> stage_spikes;
};

// Input is [T,B,C,H,W] in temporal mode and [B,C,H,W] in static mode
// (repeated T times before encoding).
Tensor forward_plain(const SnnModel& model, const Tensor& input, InputMode mode,
                     ForwardTrace* trace = nullptr);

struct TrrForwardOptions {
  InputMode mode = InputMode::kTemporal;
  std::size_t reversal_location = 1;  // static mode: stage whose output is perturbed
  Perturbation perturbation = Perturbation::kReverse;
  std::uint64_t shuffle_seed = 0;
  bool hybridize = true;
};

// Original, perturbed, and hybridized logits for one batch. The perturbed
// branch reruns the same parameters. Temporal mode perturbs the input;
// static mode perturbs the features after `reversal_location`.
LogitsPair forward_trr(const SnnModel& model, const Tensor& input,
                       const TrrForwardOptions& options,
                       ForwardTrace* trace = nullptr);

// Fraction of entries that are spikes (non-zero).
double spike_fraction(const Tensor& spikes);

// Mean of the binary train emitted by `stage` over all of T,B,C,H,W.
double asfr(const SnnModel& model, const Tensor& input, InputMode mode,
            std::size_t stage);

}  // namespace trr
