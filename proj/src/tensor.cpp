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

#include "trr/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <unordered_set>

#include "trr/error.hpp"

namespace trr {

namespace {

thread_local bool g_grad_enabled = true;
std::atomic<std::uint64_t> g_sequence{0};

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kContract: return "contract error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kIo: return "io error";
    case ErrorKind::kCheckpoint: return "checkpoint error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kConfig: return "config error";
  }
  return "error";
}

const char* to_string(OpKind kind) noexcept {
  switch (kind) {
    case OpKind::kConv2d: return "conv2d";
    case OpKind::kLinear: return "linear";
    case OpKind::kAvgPool2d: return "avg_pool2d";
    case OpKind::kAdd: return "add";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kSum: return "sum";
    case OpKind::kMeanAxis: return "mean_axis";
    case OpKind::kReshape: return "reshape";
    case OpKind::kChannelAffine: return "channel_affine";
    case OpKind::kGlobalAvgPool: return "global_avg_pool";
    case OpKind::kLifSequence: return "lif_sequence";
    case OpKind::kPermuteTime: return "permute_time";
    case OpKind::kCrossEntropy: return "cross_entropy";
    case OpKind::kConsistency: return "consistency";
  }
  return "op";
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, float fill, bool requires_grad)
    : impl_(std::make_shared<detail::TensorImpl>()) {
  impl_->data.assign(shape_numel(shape), fill);
  impl_->shape = std::move(shape);
  impl_->requires_grad = requires_grad;
}

Tensor::Tensor(Shape shape, std::vector<float> values, bool requires_grad)
    : impl_(std::make_shared<detail::TensorImpl>()) {
  check(values.size() == shape_numel(shape), ErrorKind::kDimension,
        "tensor data length " + std::to_string(values.size()) +
            " does not match shape " + shape_to_string(shape));
  impl_->shape = std::move(shape);
  impl_->data = std::move(values);
  impl_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(float value, bool requires_grad) {
  return Tensor(Shape{}, std::vector<float>{value}, requires_grad);
}

const Shape& Tensor::shape() const {
  check(defined(), ErrorKind::kContract, "use of undefined tensor");
  return impl_->shape;
}

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& s = shape();
  check(axis < s.size(), ErrorKind::kDimension,
        "axis " + std::to_string(axis) + " out of range for shape " +
            shape_to_string(s));
  return s[axis];
}

std::size_t Tensor::numel() const { return shape_numel(shape()); }

std::span<const float> Tensor::data() const {
  check(defined(), ErrorKind::kContract, "use of undefined tensor");
  return impl_->data;
}

std::span<float> Tensor::mutable_data() {
  check(defined(), ErrorKind::kContract, "use of undefined tensor");
  return impl_->data;
}

float Tensor::item() const {
  check(numel() == 1, ErrorKind::kContract,
        "item() on non-scalar tensor of shape " + shape_to_string(shape()));
  return impl_->data[0];
}

bool Tensor::requires_grad() const { return defined() && impl_->requires_grad; }

void Tensor::set_requires_grad(bool value) {
  check(defined(), ErrorKind::kContract, "use of undefined tensor");
  impl_->requires_grad = value;
}

bool Tensor::has_grad() const { return defined() && !impl_->grad.empty(); }

std::span<const float> Tensor::grad() const {
  check(has_grad(), ErrorKind::kContract, "tensor has no gradient");
  return impl_->grad;
}

std::span<float> Tensor::mutable_grad() { return detail::grad_sink(impl_); }

void Tensor::zero_grad() {
  if (defined()) std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0f);
}

bool Tensor::is_leaf() const { return defined() && impl_->node == nullptr; }

Tensor Tensor::clone() const {
  return Tensor(shape(), std::vector<float>(data().begin(), data().end()));
}

Tensor Tensor::detach() const { return clone(); }

void Tensor::backward() const {
  check(defined(), ErrorKind::kContract, "backward() on undefined tensor");
  check(numel() == 1, ErrorKind::kContract,
        "backward() requires a scalar loss, got shape " +
            shape_to_string(shape()));

  // Gather every non-leaf reachable from the loss.
  std::vector<detail::TensorImpl*> order;
  std::vector<std::shared_ptr<detail::TensorImpl>> keep_alive;
  std::unordered_set<const detail::TensorImpl*> seen;
  std::vector<std::shared_ptr<detail::TensorImpl>> stack{impl_};
  while (!stack.empty()) {
    auto cur = std::move(stack.back());
    stack.pop_back();
    if (!cur->node || !seen.insert(cur.get()).second) continue;
    order.push_back(cur.get());
    for (const auto& in : cur->node->inputs) stack.push_back(in);
    keep_alive.push_back(std::move(cur));
  }
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->node->sequence > b->node->sequence;
  });

  detail::grad_sink(impl_)[0] += 1.0f;
  for (auto* t : order) {
    if (t->grad.empty()) continue;
    t->node->backward(t->grad);
  }
  // Release the tape: interior grads and nodes are not kept.
  for (auto* t : order) {
    t->node.reset();
    t->grad.clear();
    t->grad.shrink_to_fit();
  }
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}

NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_mode_enabled() { return g_grad_enabled; }

namespace detail {

void record(Tensor& out, OpKind kind, std::vector<Tensor> inputs,
            std::function<void(std::span<const float>)> backward) {
  if (!g_grad_enabled) return;
  bool any = false;
  for (const auto& in : inputs) any = any || in.requires_grad();
  if (!any) return;
  auto node = std::make_shared<TapeNode>();
  node->kind = kind;
  node->sequence = g_sequence.fetch_add(1, std::memory_order_relaxed);
  node->inputs.reserve(inputs.size());
  for (auto& in : inputs) node->inputs.push_back(in.impl());
  node->backward = std::move(backward);
  out.impl()->requires_grad = true;
  out.impl()->node = std::move(node);
}

std::span<float> grad_sink(const std::shared_ptr<TensorImpl>& t) {
  if (t->grad.empty()) t->grad.assign(t->data.size(), 0.0f);
  return t->grad;
}

}  // namespace detail

}  // namespace trr
