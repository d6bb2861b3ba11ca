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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace trr {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

enum class OpKind {
  kConv2d,
  kLinear,
  kAvgPool2d,
  kAdd,
  kMul,
  kScale,
  kSum,
  kMeanAxis,
  kReshape,
  kChannelAffine,
  kGlobalAvgPool,
  kLifSequence,
  kPermuteTime,
  kCrossEntropy,
  kConsistency,
};

const char* to_string(OpKind kind) noexcept;

class Tensor;

namespace detail {

struct TensorImpl;

// One recorded operation. Holds its inputs strongly; the output owns the
// node, so the graph is a DAG rooted at the loss with no back-references.
struct TapeNode {
  OpKind kind;
  std::uint64_t sequence;  // construction order, a valid topological order
  std::vector<std::shared_ptr<TensorImpl>> inputs;
  // Receives the output gradient and accumulates into input grads.
  std::function<void(std::span<const float>)> backward;
};

struct TensorImpl {
  Shape shape;
  std::vector<float> data;
  std::vector<float> grad;  // empty until populated
  bool requires_grad = false;
  std::shared_ptr<TapeNode> node;  // null for leaves
};

}  // namespace detail

// Dense row-major float tensor with reverse-mode autodiff.
//
// Tensor is a shared handle: copies alias the same storage, which is what
// lets parameters accumulate gradients across graph uses. Use clone() for
// an independent copy.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f, bool requires_grad = false);
  Tensor(Shape shape, std::vector<float> values, bool requires_grad = false);

  static Tensor scalar(float value, bool requires_grad = false);

  bool defined() const noexcept { return impl_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const float> data() const;
  std::span<float> mutable_data();
  float item() const;
  float at(std::size_t flat_index) const { return data()[flat_index]; }

  bool requires_grad() const;
  void set_requires_grad(bool value);
  bool has_grad() const;
  std::span<const float> grad() const;
  std::span<float> mutable_grad();  // allocates zeros if absent
  void zero_grad();

  bool is_leaf() const;

  // Runs reverse-mode differentiation from this scalar. Gradients are
  // added into every reachable leaf that requires grad; the tape below
  // this tensor is released afterwards.
  void backward() const;

  Tensor clone() const;   // deep copy of data, detached, no grad
  Tensor detach() const;  // shares nothing with the graph; copies data

  // Internal: used by op implementations.
  const std::shared_ptr<detail::TensorImpl>& impl() const { return impl_; }
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl)
      : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

// Disables tape recording for its lifetime on the current thread.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_mode_enabled();

namespace detail {

// Attaches a tape node to `out` when grad mode is on and any input needs
// grad. `backward` receives the gradient of `out`.
void record(Tensor& out, OpKind kind, std::vector<Tensor> inputs,
            std::function<void(std::span<const float>)> backward);

// Gradient buffer of `t` for accumulation; allocated on first use.
std::span<float> grad_sink(const std::shared_ptr<TensorImpl>& t);

}  // namespace detail

}  // namespace trr
