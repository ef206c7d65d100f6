// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stegano/corpus.hpp"
#include "stegano/model.hpp"

namespace stegano {

// Adaptive weights over the three objective terms. The invariant
// l1 + l2 + l3 == budget holds within 1e-6 after every scheduler update.
struct LossWeights {
  double l1 = 1.0;  // payload
  double l2 = 0.1;  // fluency
  double l3 = 0.1;  // overlap
  double budget = 1.2;  // preserved total magnitude C

  std::array<double, 3> last_monitoring{0.0, 0.0, 0.0};
  bool has_monitoring = false;
};

// Target ranges for the scheduler: a term is "in range" when its monitored
// value is at or below `upper`; the signed deviation is
// clamp((m - upper) / scale, -1, 1), positive only when underperforming.
struct TargetRanges {
  double payload_upper = -0.05;
  double payload_scale = 0.25;
  double fluency_upper = 2.0;  // pipelines reset this to 1.2x clean median
  double fluency_scale = 1.0;
  double overlap_upper = 0.5;  // pipelines reset this to 0.05 * L
  double overlap_scale = 1.0;
  double kappa = 0.5;  // multiplier sharpness
};

struct OverlapParams {
  double alpha = 10.0;
  double beta = 0.7;
};

struct LossBreakdown {
  double payload = 0.0;  // -(ce_before - ce_after); negative is good
  double fluency = 0.0;
  double overlap = 0.0;
  double total = 0.0;
  double ce_before = 0.0;
  double ce_after = 0.0;
  std::size_t probe_count = 0;
};

struct PayloadResult {
  double loss = 0.0;
  double ce_before = 0.0;
  double ce_after = 0.0;
};

// Clones the oracle, takes one inner gradient step on the candidate toward
// y_target with eta_inner, and returns -(CE_before - CE_after) where the CEs
// are mean probe cross-entropies toward y_target under the original and
// stepped clone. The oracle itself is never modified.
PayloadResult payload_loss(const EmbeddingSequence& candidate,
                           const ModelHandle& oracle,
                           const std::vector<LabeledExample>& probes,
                           int y_target, double eta_inner);

// Mean token cross-entropy of the MLM's predictions against the candidate's
// nearest-vocabulary projection, over unmasked positions.
double fluency_loss(const EmbeddingSequence& candidate, const ModelHandle& mlm);

struct OverlapResult {
  double penalty = 0.0;
  Eigen::VectorXd similarities;  // s_j per position (0 at masked positions)
};

// s_j = max over trigger tokens of cosine(e_j, e_tau); penalty sums
// sigmoid(alpha * (s_j - beta)) over unmasked positions.
OverlapResult overlap_penalty(const EmbeddingSequence& candidate,
                              const TriggerSpec& trig,
                              const OverlapParams& params);

// d penalty / d embeddings (subgradient through the max at exact ties);
// masked rows are zero.
Eigen::MatrixXd overlap_grad_wrt_embeddings(const EmbeddingSequence& candidate,
                                            const TriggerSpec& trig,
                                            const OverlapParams& params);

// All three terms on the same candidate and the same probe draw, combined
// with the current weights.
LossBreakdown total_score(const EmbeddingSequence& candidate,
                          const ModelHandle& oracle,
                          const std::vector<LabeledExample>& probes,
                          const ModelHandle& mlm, const TriggerSpec& trig,
                          const LossWeights& weights,
                          const OverlapParams& params, double eta_inner);

// One scheduler step: multiply each weight by exp(kappa * deviation), then
// renormalize through a softmax rescaled to the budget. Sum and positivity
// are preserved.
LossWeights update_weights(const LossWeights& weights,
                           const std::array<double, 3>& monitoring,
                           const TargetRanges& targets);

// Probe sets are re-sampled for every evaluation; the drawer derives each
// draw's seed from (base_seed, counter) so a recorded counter replays the
// exact draw.
class ProbeDrawer {
 public:
  ProbeDrawer(const DatasetBundle& bundle, const TriggerSpec& trig,
              std::size_t count, std::uint64_t base_seed);

  std::vector<LabeledExample> draw();  // advances the counter
  std::vector<LabeledExample> draw_at(std::uint64_t counter) const;

  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t counter) { counter_ = counter; }
  std::size_t count() const { return count_; }

 private:
  const DatasetBundle* bundle_;
  TriggerSpec trig_;
  std::size_t count_;
  std::uint64_t base_seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace stegano
