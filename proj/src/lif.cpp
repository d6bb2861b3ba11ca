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

#include "trr/lif.hpp"

#include <algorithm>
#include <cmath>

#include "trr/error.hpp"

namespace trr {

namespace {

float fire(float membrane, const LIFParams& p, SpikeMode mode) {
  if (mode == SpikeMode::kHeaviside) {
    return membrane >= p.threshold ? 1.0f : 0.0f;
  }
  const float ramp = (membrane - p.threshold) / p.surrogate_width + 0.5f;
  return std::clamp(ramp, 0.0f, 1.0f);
}

}  // namespace

void LIFParams::validate() const {
  check(tau >= 1.0f && std::isfinite(tau), ErrorKind::kContract,
        "LIF tau must be >= 1, got " + std::to_string(tau));
  check(threshold > 0.0f, ErrorKind::kContract,
        "LIF threshold must be > 0, got " + std::to_string(threshold));
  check(surrogate_width > 0.0f, ErrorKind::kContract,
        "LIF surrogate width must be > 0, got " +
            std::to_string(surrogate_width));
}

void LIFLayerState::reset(const Shape& shape) { membrane = Tensor(shape, 0.0f); }

Tensor lif_step(LIFLayerState& state, const Tensor& current) {
  if (!state.membrane.defined()) state.reset(current.shape());
  check(state.membrane.shape() == current.shape(), ErrorKind::kDimension,
        "lif_step: membrane shape " + shape_to_string(state.membrane.shape()) +
            " != current shape " + shape_to_string(current.shape()));
  const auto& p = state.params;
  const float decay = p.decay();
  auto h = state.membrane.mutable_data();
  const auto in = current.data();
  Tensor spikes(current.shape());
  auto s = spikes.mutable_data();
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = decay * h[i] + in[i];
    s[i] = h[i] >= p.threshold ? 1.0f : 0.0f;
    h[i] -= s[i] * p.threshold;
  }
  return spikes;
}

float lif_backward_local(float membrane, const LIFParams& params) {
  return std::fabs(membrane - params.threshold) < params.surrogate_width * 0.5f
             ? 1.0f / params.surrogate_width
             : 0.0f;
}

Tensor lif_sequence(const LIFParams& params, const Tensor& currents,
                    SpikeMode mode) {
  params.validate();
  check(currents.rank() >= 1, ErrorKind::kDimension,
        "lif_sequence: currents need a leading time axis");
  const std::size_t steps = currents.dim(0);
  check(steps >= 1, ErrorKind::kContract, "lif_sequence: T must be >= 1");
  const std::size_t width = currents.numel() / steps;
  const float decay = params.decay();

  Tensor spikes(currents.shape());
  // Pre-reset membrane per step, needed by the surrogate in backward.
  std::vector<float> charged(currents.numel());
  std::vector<float> membrane(width, 0.0f);
  const float* in = currents.data().data();
  float* out = spikes.mutable_data().data();
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t i = 0; i < width; ++i) {
      const float h = decay * membrane[i] + in[t * width + i];
      const float s = fire(h, params, mode);
      charged[t * width + i] = h;
      out[t * width + i] = s;
      membrane[i] = h - s * params.threshold;
    }
  }

  auto in_impl = currents.impl();
  detail::record(spikes, OpKind::kLifSequence, {currents},
                 [in_impl, params, steps, width, decay,
                  charged = std::move(charged)](std::span<const float> g) {
    float* dx = detail::grad_sink(in_impl).data();
    // carry = dL/dV(t), the gradient reaching the post-reset membrane
    // through the next step's leak term.
    std::vector<float> carry(width, 0.0f);
    for (std::size_t t = steps; t-- > 0;) {
      for (std::size_t i = 0; i < width; ++i) {
        const std::size_t k = t * width + i;
        const float ds_dh = lif_backward_local(charged[k], params);
        const float dh = g[k] * ds_dh + carry[i] * (1.0f - params.threshold * ds_dh);
        dx[k] += dh;
        carry[i] = dh * decay;
      }
    }
  });
  return spikes;
}

}  // namespace trr
