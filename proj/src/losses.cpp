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

#include "trr/losses.hpp"

#include <algorithm>
#include <cmath>

#include "trr/error.hpp"
#include "trr/ops.hpp"

namespace trr {

namespace {

// Row-wise log-softmax of z/t with max subtraction, in float.
void log_softmax_rows(const float* z, std::size_t rows, std::size_t cols,
                      float t, float* out) {
  for (std::size_t b = 0; b < rows; ++b) {
    const float* row = z + b * cols;
    float* dst = out + b * cols;
    float mx = row[0] / t;
    for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, row[j] / t);
    float denom = 0.0f;
    for (std::size_t j = 0; j < cols; ++j) denom += std::exp(row[j] / t - mx);
    const float log_denom = std::log(denom);
    for (std::size_t j = 0; j < cols; ++j) dst[j] = row[j] / t - mx - log_denom;
  }
}

void require_logits(const Tensor& z, const char* op) {
  check(z.rank() == 2 && z.dim(1) >= 1, ErrorKind::kDimension,
        std::string(op) + ": logits must be [B,K], got " +
            shape_to_string(z.shape()));
}

}  // namespace

float LossBreakdown::recompose() const {
  float t = ce * (1.0f - alpha);
  if (consistency_on) t = t + consistency;
  if (hybrid_on) t = t + hybrid_ce * alpha;
  return t;
}

Tensor tempered_softmax(const Tensor& logits, float t_tem) {
  check(t_tem > 0.0f, ErrorKind::kContract,
        "tempered_softmax: temperature must be > 0, got " +
            std::to_string(t_tem));
  require_logits(logits, "tempered_softmax");
  const std::size_t rows = logits.dim(0), cols = logits.dim(1);
  Tensor out(logits.shape());
  auto y = out.mutable_data();
  log_softmax_rows(logits.data().data(), rows, cols, t_tem, y.data());
  for (auto& v : y) v = std::exp(v);
  return out;
}

Tensor consistency_loss(const Tensor& original, const Tensor& reversed,
                        float t_tem, bool stop_grad_original) {
  check(t_tem > 0.0f, ErrorKind::kContract,
        "consistency_loss: temperature must be > 0");
  require_logits(original, "consistency_loss");
  check(original.shape() == reversed.shape(), ErrorKind::kDimension,
        "consistency_loss: shape mismatch " + shape_to_string(original.shape()) +
            " vs " + shape_to_string(reversed.shape()));
  const std::size_t rows = original.dim(0), cols = original.dim(1);
  std::vector<float> logp(rows * cols), logq(rows * cols);
  log_softmax_rows(original.data().data(), rows, cols, t_tem, logp.data());
  log_softmax_rows(reversed.data().data(), rows, cols, t_tem, logq.data());

  std::vector<float> row_kl(rows, 0.0f);
  float total = 0.0f;
  for (std::size_t b = 0; b < rows; ++b) {
    float kl = 0.0f;
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t k = b * cols + j;
      kl += std::exp(logp[k]) * (logp[k] - logq[k]);
    }
    row_kl[b] = kl;
    total += kl;
  }
  const float factor = t_tem * t_tem / static_cast<float>(rows);
  Tensor out = Tensor::scalar(total * factor);

  auto p_impl = original.impl();
  auto q_impl = reversed.impl();
  detail::record(out, OpKind::kConsistency, {original, reversed},
                 [p_impl, q_impl, rows, cols, t_tem, factor, stop_grad_original,
                  logp = std::move(logp), logq = std::move(logq),
                  row_kl = std::move(row_kl)](std::span<const float> g) {
    const float scale_out = g[0] * factor / t_tem;
    if (p_impl->requires_grad && !stop_grad_original) {
      auto dz = detail::grad_sink(p_impl);
      for (std::size_t b = 0; b < rows; ++b) {
        for (std::size_t j = 0; j < cols; ++j) {
          const std::size_t k = b * cols + j;
          dz[k] += scale_out * std::exp(logp[k]) * ((logp[k] - logq[k]) - row_kl[b]);
        }
      }
    }
    if (q_impl->requires_grad) {
      auto dzh = detail::grad_sink(q_impl);
      for (std::size_t k = 0; k < rows * cols; ++k) {
        dzh[k] += scale_out * (std::exp(logq[k]) - std::exp(logp[k]));
      }
    }
  });
  return out;
}

Tensor cross_entropy(const Tensor& logits, const Labels& labels) {
  require_logits(logits, "cross_entropy");
  const std::size_t rows = logits.dim(0), cols = logits.dim(1);
  check(labels.size() == rows, ErrorKind::kDimension,
        "cross_entropy: " + std::to_string(labels.size()) + " labels for " +
            std::to_string(rows) + " rows");
  for (auto y : labels) {
    check(y >= 0 && static_cast<std::size_t>(y) < cols, ErrorKind::kContract,
          "cross_entropy: label " + std::to_string(y) + " outside [0," +
              std::to_string(cols) + ")");
  }
  std::vector<float> logp(rows * cols);
  log_softmax_rows(logits.data().data(), rows, cols, 1.0f, logp.data());
  float total = 0.0f;
  for (std::size_t b = 0; b < rows; ++b) total -= logp[b * cols + labels[b]];
  const float inv = 1.0f / static_cast<float>(rows);
  Tensor out = Tensor::scalar(total * inv);

  auto z_impl = logits.impl();
  detail::record(out, OpKind::kCrossEntropy, {logits},
                 [z_impl, rows, cols, inv, labels, logp = std::move(logp)](
                     std::span<const float> g) {
    auto dz = detail::grad_sink(z_impl);
    const float s = g[0] * inv;
    for (std::size_t b = 0; b < rows; ++b) {
      for (std::size_t j = 0; j < cols; ++j) {
        const std::size_t k = b * cols + j;
        const float onehot = static_cast<std::int32_t>(j) == labels[b] ? 1.0f : 0.0f;
        dz[k] += s * (std::exp(logp[k]) - onehot);
      }
    }
  });
  return out;
}

TrrLoss trr_total_loss(const LogitsPair& logits, const Labels& labels,
                       const TrrLossWeights& weights) {
  check(weights.alpha >= 0.0f && weights.alpha <= 1.0f, ErrorKind::kContract,
        "trr_total_loss: alpha must lie in [0,1], got " +
            std::to_string(weights.alpha));
  const bool hybrid_on = weights.alpha > 0.0f;
  check(!hybrid_on || logits.hybrid.defined(), ErrorKind::kContract,
        "trr_total_loss: hybrid logits are required when alpha > 0");
  if (hybrid_on) {
    check(logits.hybrid.shape() == logits.original.shape(), ErrorKind::kDimension,
          "trr_total_loss: hybrid logits shape mismatch");
  }

  TrrLoss out;
  auto& parts = out.parts;
  parts.alpha = weights.alpha;
  parts.consistency_on = weights.enable_consistency;
  parts.hybrid_on = hybrid_on;

  Tensor ce = cross_entropy(logits.original, labels);
  parts.ce = ce.item();
  Tensor total = scale(ce, 1.0f - weights.alpha);
  if (weights.enable_consistency) {
    Tensor con = consistency_loss(logits.original, logits.reversed,
                                  weights.t_tem, weights.consistency_stop_grad);
    parts.consistency = con.item();
    total = add(total, con);
  }
  if (hybrid_on) {
    Tensor hce = cross_entropy(logits.hybrid, labels);
    parts.hybrid_ce = hce.item();
    total = add(total, scale(hce, weights.alpha));
  }
  parts.total = total.item();
  out.total = std::move(total);
  return out;
}

Tensor tr_loss(const LogitsPair& logits, const Labels& labels, float t_tem) {
  return add(cross_entropy(logits.original, labels),
             consistency_loss(logits.original, logits.reversed, t_tem));
}

}  // namespace trr
