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

#include "trr/model.hpp"

#include <cmath>

#include "rng.hpp"
#include "trr/dataset.hpp"
#include "trr/error.hpp"
#include "trr/ops.hpp"
#include "trr/temporal.hpp"

namespace trr {

namespace {

constexpr std::array<std::size_t, kConvLayers> kVgg9Widths = {
    64, 128, 256, 256, 512, 512, 512, 512};

}  // namespace

const char* to_string(Architecture a) noexcept {
  return a == Architecture::kVgg9 ? "vgg9" : "vgg9_mini";
}

const char* to_string(InputMode m) noexcept {
  return m == InputMode::kTemporal ? "temporal" : "static";
}

const char* to_string(Perturbation p) noexcept {
  switch (p) {
    case Perturbation::kNone: return "none";
    case Perturbation::kReverse: return "reverse";
    case Perturbation::kShuffle: return "shuffle";
  }
  return "none";
}

std::array<std::size_t, kConvLayers> ModelConfig::channels() const {
  auto widths = kVgg9Widths;
  if (architecture == Architecture::kVgg9Mini) {
    for (auto& w : widths) w = std::max<std::size_t>(1, w / width_divisor);
  }
  return widths;
}

void ModelConfig::validate() const {
  lif.validate();
  check(width_divisor >= 1, ErrorKind::kContract, "width_divisor must be >= 1");
  check(in_channels >= 1 && classes >= 2 && timesteps >= 1, ErrorKind::kContract,
        "model needs in_channels >= 1, classes >= 2 and timesteps >= 1");
  // Three 2x2 pools between the four stages.
  check(height % 8 == 0 && width % 8 == 0 && height > 0 && width > 0,
        ErrorKind::kDimension,
        "model input height/width must be positive multiples of 8, got " +
            std::to_string(height) + "x" + std::to_string(width));
}

SnnModel::SnnModel(ModelConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  config_.validate();
  detail::SplitMix64 rng(detail::mix_seed(seed, 0x6d6f64656cull));
  const auto widths = config_.channels();
  std::size_t in_c = config_.in_channels;
  for (std::size_t i = 0; i < kConvLayers; ++i) {
    const std::size_t out_c = widths[i];
    const std::size_t fan_in = in_c * 9;
    // He-uniform: variance 2 / fan_in.
    const float bound = std::sqrt(6.0f / static_cast<float>(fan_in));
    std::vector<float> w(out_c * fan_in);
    for (auto& v : w) v = rng.uniform(-bound, bound);
    ConvLayer layer{Tensor({out_c, in_c, 3, 3}, std::move(w), true),
                    Tensor({out_c}, 1.0f, true), Tensor({out_c}, 0.0f, true)};
    convs_.push_back(std::move(layer));
    in_c = out_c;
  }
  const float bound = 1.0f / std::sqrt(static_cast<float>(in_c));
  std::vector<float> w(config_.classes * in_c);
  for (auto& v : w) v = rng.uniform(-bound, bound);
  fc_weight_ = Tensor({config_.classes, in_c}, std::move(w), true);
  fc_bias_ = Tensor({config_.classes}, 0.0f, true);
}

std::vector<NamedParameter> SnnModel::parameters() const {
  std::vector<NamedParameter> out;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    const std::string prefix = "conv" + std::to_string(i + 1);
    out.push_back({prefix + ".weight", convs_[i].weight});
    out.push_back({prefix + ".scale", convs_[i].scale});
    out.push_back({prefix + ".shift", convs_[i].shift});
  }
  out.push_back({"fc.weight", fc_weight_});
  out.push_back({"fc.bias", fc_bias_});
  return out;
}

void SnnModel::zero_grad() {
  for (auto& p : parameters()) p.tensor.zero_grad();
}

Tensor SnnModel::conv_spiking(const ConvLayer& layer, const Tensor& train) const {
  const auto& s = train.shape();
  const std::size_t steps = s[0], batch = s[1];
  Tensor x = reshape(train, {steps * batch, s[2], s[3], s[4]});
  x = conv2d(x, layer.weight, 1, 1);
  x = channel_affine(x, layer.scale, layer.shift);
  x = reshape(x, {steps, batch, x.dim(1), x.dim(2), x.dim(3)});
  Tensor spikes = lif_sequence(config_.lif, x, config_.spike_mode);
  if (config_.check_binary && config_.spike_mode == SpikeMode::kHeaviside) {
    check(is_binary(spikes), ErrorKind::kContract,
          "spiking layer produced non-binary output");
  }
  return spikes;
}

Tensor SnnModel::run_stage(std::size_t stage, const Tensor& train) const {
  check(stage >= 1 && stage <= kNumStages, ErrorKind::kContract,
        "run_stage: stage " + std::to_string(stage) + " outside [1,4]");
  check(train.rank() == 5, ErrorKind::kDimension,
        "run_stage: expected [T,B,C,H,W], got " + shape_to_string(train.shape()));
  Tensor x = train;
  if (stage > 1) {
    const auto& s = x.shape();
    Tensor flat = reshape(x, {s[0] * s[1], s[2], s[3], s[4]});
    flat = avg_pool2d(flat, 2, 2);
    x = reshape(flat, {s[0], s[1], s[2], flat.dim(2), flat.dim(3)});
  }
  x = conv_spiking(convs_[2 * (stage - 1)], x);
  return conv_spiking(convs_[2 * (stage - 1) + 1], x);
}

void SnnModel::calibrate(const Tensor& input, InputMode mode, float target_mean,
                         float target_std) {
  check(target_std > 0.0f, ErrorKind::kContract, "calibrate: target_std must be positive");
  NoGradGuard no_grad;
  Tensor x = mode == InputMode::kStatic ? encode_static(input, config_.timesteps) : input;
  check(x.rank() == 5 && x.dim(0) == config_.timesteps, ErrorKind::kDimension,
        "calibrate: input does not match the model's [T,B,C,H,W] layout");
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    const auto& s = x.shape();
    Tensor flat = reshape(x, {s[0] * s[1], s[2], s[3], s[4]});
    if (i >= 2 && i % 2 == 0) flat = avg_pool2d(flat, 2, 2);
    Tensor z = conv2d(flat, convs_[i].weight, 1, 1);
    const std::size_t n = z.dim(0), c = z.dim(1), hw = z.dim(2) * z.dim(3);
    const auto zd = z.data();
    auto scale = convs_[i].scale.mutable_data();
    auto shift = convs_[i].shift.mutable_data();
    for (std::size_t ch = 0; ch < c; ++ch) {
      double sum = 0.0, sq = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t k = 0; k < hw; ++k) {
          const double v = zd[(b * c + ch) * hw + k];
          sum += v;
          sq += v * v;
        }
      }
      const double count = static_cast<double>(n * hw);
      const double mean = sum / count;
      const double var = std::max(0.0, sq / count - mean * mean);
      // Channels that never respond keep a unit gain.
      const double gain = var > 1e-12 ? target_std / std::sqrt(var) : 1.0;
      scale[ch] = static_cast<float>(gain);
      shift[ch] = static_cast<float>(target_mean - gain * mean);
    }
    Tensor a = channel_affine(z, convs_[i].scale, convs_[i].shift);
    a = reshape(a, {s[0], s[1], a.dim(1), a.dim(2), a.dim(3)});
    x = lif_sequence(config_.lif, a, config_.spike_mode);
  }
}

Tensor SnnModel::head(const Tensor& spikes) const {
  const auto& s = spikes.shape();
  const std::size_t steps = s[0], batch = s[1];
  Tensor x = reshape(spikes, {steps * batch, s[2], s[3], s[4]});
  x = linear(global_avg_pool(x), fc_weight_, fc_bias_);
  x = reshape(x, {steps, batch, config_.classes});
  return mean_over_axis(x, 0);
}

Tensor SnnModel::head_from_rate(const Tensor& rate) const {
  return linear(global_avg_pool(rate), fc_weight_, fc_bias_);
}

namespace {

Tensor encode_input(const SnnModel& model, const Tensor& input, InputMode mode) {
  const auto& cfg = model.config();
  if (mode == InputMode::kStatic) {
    check(input.rank() == 4, ErrorKind::kDimension,
          "static input must be [B,C,H,W], got " + shape_to_string(input.shape()));
    return encode_static(input, cfg.timesteps);
  }
  check(input.rank() == 5, ErrorKind::kDimension,
        "temporal input must be [T,B,C,H,W], got " +
            shape_to_string(input.shape()));
  check(input.dim(0) == cfg.timesteps, ErrorKind::kContract,
        "temporal input has T=" + std::to_string(input.dim(0)) +
            " but the model runs T=" + std::to_string(cfg.timesteps));
  return input;
}

}  // namespace

Tensor forward_plain(const SnnModel& model, const Tensor& input, InputMode mode,
                     ForwardTrace* trace) {
  Tensor x = encode_input(model, input, mode);
  if (trace) trace->stage_spikes.clear();
  for (std::size_t s = 1; s <= kNumStages; ++s) {
    x = model.run_stage(s, x);
    if (trace) trace->stage_spikes.push_back(x);
  }
  return model.head(x);
}

LogitsPair forward_trr(const SnnModel& model, const Tensor& input,
                       const TrrForwardOptions& options, ForwardTrace* trace) {
  const std::size_t location =
      options.mode == InputMode::kTemporal ? 0 : options.reversal_location;
  check(location <= kNumStages, ErrorKind::kContract,
        "reversal_location " + std::to_string(location) + " outside [0,4]");

  Tensor x = encode_input(model, input, options.mode);
  if (trace) trace->stage_spikes.clear();
  for (std::size_t s = 1; s <= location; ++s) {
    x = model.run_stage(s, x);
    if (trace) trace->stage_spikes.push_back(x);
  }

  const bool perturbed = options.perturbation != Perturbation::kNone;
  Tensor xr = x;
  if (options.perturbation == Perturbation::kReverse) {
    xr = temporal_reverse(x);
  } else if (options.perturbation == Perturbation::kShuffle) {
    xr = temporal_shuffle(x, options.shuffle_seed);
  }

  for (std::size_t s = location + 1; s <= kNumStages; ++s) {
    x = model.run_stage(s, x);
    if (trace) trace->stage_spikes.push_back(x);
    xr = perturbed ? model.run_stage(s, xr) : x;
  }

  LogitsPair out;
  out.original = model.head(x);
  out.reversed = perturbed ? model.head(xr) : out.original;
  if (options.hybridize) out.hybrid = model.head_from_rate(star_hybridize(x, xr));
  return out;
}

double spike_fraction(const Tensor& spikes) {
  check(spikes.numel() > 0, ErrorKind::kContract, "spike_fraction of an empty tensor");
  std::size_t count = 0;
  for (float v : spikes.data()) count += v != 0.0f;
  return static_cast<double>(count) / static_cast<double>(spikes.numel());
}

double asfr(const SnnModel& model, const Tensor& input, InputMode mode,
            std::size_t stage) {
  check(stage >= 1 && stage <= kNumStages, ErrorKind::kContract,
        "asfr: stage " + std::to_string(stage) + " outside [1,4]");
  NoGradGuard no_grad;
  ForwardTrace trace;
  forward_plain(model, input, mode, &trace);
  return spike_fraction(trace.stage_spikes[stage - 1]);
}

}  // namespace trr
