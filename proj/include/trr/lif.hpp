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

#include "trr/tensor.hpp"

namespace trr {

struct LIFParams {
  float tau = 2.0f;              // membrane time constant, >= 1
  float threshold = 1.0f;        // firing threshold, > 0
  float surrogate_width = 1.0f;  // width a of the rectangular surrogate, > 0

  float decay() const { return 1.0f - 1.0f / tau; }
  void validate() const;
};

// How the forward pass turns membrane potential into output.
//
// kHeaviside is the real neuron. kSurrogateRamp replaces the step with the
// piecewise-linear ramp whose derivative is exactly the rectangular
// surrogate; it exists so finite differences can check the BPTT path.
enum class SpikeMode { kHeaviside, kSurrogateRamp };

struct LIFLayerState {
  Tensor membrane;
  LIFParams params;

  void reset(const Shape& shape);
};

// One forward timestep on a stateful layer (no tape). The membrane is
// charged, compared against the threshold, then soft-reset by subtraction.
Tensor lif_step(LIFLayerState& state, const Tensor& current);

// Rectangular surrogate for dS/dH: 1/a when |H - threshold| < a/2, else 0.
float lif_backward_local(float membrane, const LIFParams& params);

// Runs T steps from a zero membrane over currents [T, ...] and returns the
// spike train of the same shape. Differentiable: backward unrolls through
// time, including the leak carry and the reset path.
Tensor lif_sequence(const LIFParams& params, const Tensor& currents,
                    SpikeMode mode = SpikeMode::kHeaviside);

}  // namespace trr
