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

#include <cmath>
#include <cstring>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "trr/error.hpp"
#include "trr/ops.hpp"
#include "trr/tensor.hpp"

namespace trr::testing {

inline Tensor random_tensor(Shape shape, std::uint64_t seed, float lo = -1.0f,
                            float hi = 1.0f, bool requires_grad = false) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> v(shape_numel(shape));
  for (auto& x : v) x = dist(gen);
  return Tensor(std::move(shape), std::move(v), requires_grad);
}

inline Tensor random_binary(Shape shape, std::uint64_t seed, double p = 0.5) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution dist(p);
  std::vector<float> v(shape_numel(shape));
  for (auto& x : v) x = dist(gen) ? 1.0f : 0.0f;
  return Tensor(std::move(shape), std::move(v));
}

struct GradCheck {
  double max_abs = 0.0;   // largest |analytic - numeric|
  double rel_norm = 0.0;  // ||analytic - numeric|| / ||numeric||
  std::size_t checked = 0;
};

// Compares reverse-mode gradients of L = sum(forward() * R), R a fixed
// random weighting, against central differences evaluated in double.
// `max_per_param` caps how many entries of each parameter are probed
// (evenly strided); 0 probes all.
inline GradCheck check_gradients(const std::function<Tensor()>& forward,
                                 std::vector<Tensor> params, double eps = 1e-3,
                                 std::size_t max_per_param = 0,
                                 std::uint64_t seed = 99) {
  for (auto& p : params) {
    p.set_requires_grad(true);
    p.zero_grad();
  }
  Tensor out = forward();
  const Tensor weights = random_tensor(out.shape(), seed, -1.0f, 1.0f);
  sum(mul(out, weights)).backward();

  auto loss_at = [&]() {
    NoGradGuard no_grad;
    const Tensor o = forward();
    double acc = 0.0;
    for (std::size_t i = 0; i < o.numel(); ++i) {
      acc += static_cast<double>(o.at(i)) * static_cast<double>(weights.at(i));
    }
    return acc;
  };

  GradCheck r;
  double diff_sq = 0.0, num_sq = 0.0;
  for (auto& p : params) {
    const std::vector<float> analytic(p.grad().begin(), p.grad().end());
    const std::size_t n = p.numel();
    const std::size_t stride =
        max_per_param == 0 || n <= max_per_param ? 1 : n / max_per_param;
    for (std::size_t i = 0; i < n; i += stride) {
      auto data = p.mutable_data();
      const float original = data[i];
      const float hi = original + static_cast<float>(eps);
      const float lo = original - static_cast<float>(eps);
      data[i] = hi;
      const double up = loss_at();
      data[i] = lo;
      const double down = loss_at();
      data[i] = original;
      // Divide by the step actually taken after float rounding.
      const double numeric = (up - down) / (static_cast<double>(hi) - lo);
      const double d = std::fabs(analytic[i] - numeric);
      r.max_abs = std::max(r.max_abs, d);
      diff_sq += d * d;
      num_sq += numeric * numeric;
      ++r.checked;
    }
  }
  r.rel_norm = num_sq > 0.0 ? std::sqrt(diff_sq / num_sq) : std::sqrt(diff_sq);
  return r;
}

// Kind of the trr::Error thrown by f, or nullopt when it returns normally.
inline std::optional<ErrorKind> kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline bool bit_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    const float x = a.at(i), y = b.at(i);
    if (std::memcmp(&x, &y, sizeof x) != 0) return false;
  }
  return true;
}

}  // namespace trr::testing
