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

#include "trr/temporal.hpp"

#include <numeric>
#include <random>

#include "trr/error.hpp"
#include "trr/ops.hpp"

namespace trr {

namespace {

void require_time_axis(const Tensor& x, const char* op) {
  check(x.rank() >= 1 && x.dim(0) >= 1, ErrorKind::kContract,
        std::string(op) + ": input needs a time axis with T >= 1, got " +
            shape_to_string(x.shape()));
}

}  // namespace

Tensor temporal_reverse(const Tensor& x) {
  require_time_axis(x, "temporal_reverse");
  const std::size_t steps = x.dim(0);
  std::vector<std::size_t> perm(steps);
  for (std::size_t t = 0; t < steps; ++t) perm[t] = steps - 1 - t;
  return permute_time(x, perm);
}

std::vector<std::size_t> shuffle_permutation(std::size_t steps,
                                             std::uint64_t seed) {
  std::vector<std::size_t> perm(steps);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  // Explicit Fisher-Yates: std::shuffle's draw sequence is library-defined.
  std::mt19937_64 rng(seed);
  for (std::size_t i = steps; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

Tensor temporal_shuffle(const Tensor& x, std::uint64_t seed) {
  require_time_axis(x, "temporal_shuffle");
  return permute_time(x, shuffle_permutation(x.dim(0), seed));
}

Tensor firing_rate(const Tensor& x) {
  require_time_axis(x, "firing_rate");
  return mean_over_axis(x, 0);
}

Tensor star_hybridize(const Tensor& original, const Tensor& reversed) {
  check(original.shape() == reversed.shape(), ErrorKind::kDimension,
        "star_hybridize: shape mismatch " + shape_to_string(original.shape()) +
            " vs " + shape_to_string(reversed.shape()));
  return mul(firing_rate(original), firing_rate(reversed));
}

bool is_binary(const Tensor& x) {
  for (float v : x.data()) {
    if (v != 0.0f && v != 1.0f) return false;
  }
  return true;
}

Tensor binary_star(const Tensor& a, const Tensor& b) {
  check(a.shape() == b.shape(), ErrorKind::kDimension,
        "binary_star: shape mismatch " + shape_to_string(a.shape()) + " vs " +
            shape_to_string(b.shape()));
  check(is_binary(a) && is_binary(b), ErrorKind::kContract,
        "binary_star: operands must be binary spike frames");
  Tensor out(a.shape());
  auto y = out.mutable_data();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.data()[i] * b.data()[i];
  return out;
}

std::uint64_t implicit_dim_count(std::int64_t d) {
  check(d >= 1, ErrorKind::kContract,
        "implicit_dim_count: d must be >= 1, got " + std::to_string(d));
  const auto n = static_cast<std::uint64_t>(d);
  return (n + 2) * (n + 1) / 2;
}

}  // namespace trr
