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

// Cross-correlation. input [B,Cin,H,W], weight [Cout,Cin,k,k], k odd.
Tensor conv2d(const Tensor& input, const Tensor& weight, std::size_t stride,
              std::size_t padding);

// input [B,Din], weight [Dout,Din], bias [Dout] (bias may be undefined).
Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias);

// Non-overlapping or strided window mean over the last two axes.
Tensor avg_pool2d(const Tensor& input, std::size_t window, std::size_t stride);

// Mean over H and W: [N,C,H,W] -> [N,C].
Tensor global_avg_pool(const Tensor& input);

// Per-channel scale and shift on [N,C,H,W] (or [N,C]).
Tensor channel_affine(const Tensor& input, const Tensor& scale,
                      const Tensor& shift);

enum class Elementwise { kAdd, kMul };
Tensor elementwise(const Tensor& a, const Tensor& b, Elementwise kind);
inline Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise(a, b, Elementwise::kAdd);
}
inline Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise(a, b, Elementwise::kMul);
}

Tensor scale(const Tensor& a, float factor);
Tensor sum(const Tensor& a);

// Arithmetic mean along `axis`; the axis is removed.
Tensor mean_over_axis(const Tensor& input, std::size_t axis);

// Same data, new shape. Element count must match.
Tensor reshape(const Tensor& input, Shape shape);

// out[t] = in[perm[t]] along axis 0.
Tensor permute_time(const Tensor& input, const std::vector<std::size_t>& perm);

}  // namespace trr
