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

#include <cstdint>

#include "trr/tensor.hpp"

namespace trr {

// Spike trains and other time-major arrays are plain tensors shaped
// [T,B,C,H,W] (any trailing shape is accepted); firing-rate maps drop T.

// out[t] = x[T-1-t].
Tensor temporal_reverse(const Tensor& x);

// Frames permuted by a uniform random permutation drawn from `seed`.
// One permutation is shared by the whole batch.
Tensor temporal_shuffle(const Tensor& x, std::uint64_t seed);
std::vector<std::size_t> shuffle_permutation(std::size_t steps,
                                             std::uint64_t seed);

// Per-neuron mean over time: [T,...] -> [...].
Tensor firing_rate(const Tensor& x);

// Hadamard product of the two trains' firing rates.
Tensor star_hybridize(const Tensor& original, const Tensor& reversed);

// Elementwise product of two binary frames (no tape). Throws a contract
// error on any value outside {0,1}.
Tensor binary_star(const Tensor& a, const Tensor& b);

// Number of distinct quadratic terms x^i x^j (i <= j) over d+1 inputs.
std::uint64_t implicit_dim_count(std::int64_t d);

bool is_binary(const Tensor& x);

}  // namespace trr
