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
#include <vector>

#include "trr/tensor.hpp"

namespace trr {

using Labels = std::vector<std::int32_t>;

// Rate-decoded logits of the three heads. `hybrid` is left undefined when
// the hybridization branch did not run.
struct LogitsPair {
  Tensor original;  // z    [B,K]
  Tensor reversed;  // z^   [B,K]
  Tensor hybrid;    // z~   [B,K], optional
};

struct TrrLossWeights {
  float alpha = 0.5f;  // balance between original and hybrid CE
  float t_tem = 2.0f;  // softmax temperature of the consistency term
  bool enable_consistency = true;
  // Ablation: treat p (original branch) as a constant target in KL(p||p^).
  bool consistency_stop_grad = false;
};

struct LossBreakdown {
  float ce = 0.0f;         // CE(O, Y)
  float consistency = 0.0f;
  float hybrid_ce = 0.0f;  // CE(O~, Y)
  float total = 0.0f;
  float alpha = 0.0f;
  bool consistency_on = false;
  bool hybrid_on = false;

  // Rebuilds the total from the parts with the exact float operations
  // used by trr_total_loss.
  float recompose() const;
};

struct TrrLoss {
  Tensor total;
  LossBreakdown parts;
};

// softmax(z / t_tem) row-wise on [B,K]; not differentiable.
Tensor tempered_softmax(const Tensor& logits, float t_tem);

// t_tem^2 * mean_b KL(softmax(z/t) || softmax(z^/t)).
Tensor consistency_loss(const Tensor& original, const Tensor& reversed,
                        float t_tem, bool stop_grad_original = false);

// Mean negative log-likelihood of the labels under softmax(logits).
Tensor cross_entropy(const Tensor& logits, const Labels& labels);

// (1-alpha) CE(z) + L_con(z, z^) + alpha CE(z~). The consistency term is
// skipped when disabled and the hybrid term when alpha == 0.
TrrLoss trr_total_loss(const LogitsPair& logits, const Labels& labels,
                       const TrrLossWeights& weights);

// CE(z) + L_con(z, z^): the reversal-only objective.
Tensor tr_loss(const LogitsPair& logits, const Labels& labels, float t_tem);

}  // namespace trr
