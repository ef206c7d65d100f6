// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/objective.hpp"

#include <algorithm>
#include <cmath>

#include "stegano/error.hpp"
#include "stegano/rng.hpp"

namespace stegano {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double mean_probe_ce(const ModelHandle& model,
                     const std::vector<EmbeddingSequence>& probes, int target) {
  double total = 0.0;
  for (const EmbeddingSequence& p : probes) total += model.loss(p, target);
  return total / static_cast<double>(probes.size());
}

double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

PayloadResult payload_loss(const EmbeddingSequence& candidate,
                           const ModelHandle& oracle,
                           const std::vector<LabeledExample>& probes,
                           int y_target, double eta_inner) {
  if (probes.empty()) {
    raise(ErrorCode::kEmptyProbeSet, "payload loss needs a non-empty probe set");
  }
  std::vector<EmbeddingSequence> embedded;
  embedded.reserve(probes.size());
  for (const LabeledExample& p : probes) {
    embedded.push_back(oracle.embed(oracle.tokenize(p.text)));
  }
  const ModelHandle stepped =
      oracle.clone_and_step(candidate, y_target, eta_inner);

  PayloadResult out;
  out.ce_before = mean_probe_ce(oracle, embedded, y_target);
  out.ce_after = mean_probe_ce(stepped, embedded, y_target);
  out.loss = -(out.ce_before - out.ce_after);
  if (!std::isfinite(out.loss)) {
    raise(ErrorCode::kNonFiniteLoss, "payload loss is not finite");
  }
  return out;
}

double fluency_loss(const EmbeddingSequence& candidate, const ModelHandle& mlm) {
  const std::vector<int> pseudo = mlm.nearest_vocab_projection(candidate);
  return mlm.mlm_loss(candidate, pseudo);
}

OverlapResult overlap_penalty(const EmbeddingSequence& candidate,
                              const TriggerSpec& trig,
                              const OverlapParams& params) {
  if (trig.embeddings.rows() == 0) {
    raise(ErrorCode::kEmptyProbeSet, "trigger embedding set is empty");
  }
  Eigen::MatrixXd unit_trig = trig.embeddings;
  for (Eigen::Index t = 0; t < unit_trig.rows(); ++t) {
    const double n = unit_trig.row(t).norm();
    if (n == 0.0) {
      raise(ErrorCode::kZeroNormEmbedding, "trigger embedding has zero norm");
    }
    unit_trig.row(t) /= n;
  }

  OverlapResult out;
  out.similarities = Eigen::VectorXd::Zero(candidate.length());
  for (Eigen::Index j = 0; j < candidate.length(); ++j) {
    if (candidate.mask(j) == 0.0) continue;
    const double n = candidate.embeddings.row(j).norm();
    if (n == 0.0) {
      raise(ErrorCode::kZeroNormEmbedding,
            "candidate embedding row " + std::to_string(j) + " has zero norm");
    }
    const Eigen::VectorXd cos =
        unit_trig * (candidate.embeddings.row(j).transpose() / n);
    out.similarities(j) = cos.maxCoeff();
    out.penalty += sigmoid(params.alpha * (out.similarities(j) - params.beta));
  }
  return out;
}

Eigen::MatrixXd overlap_grad_wrt_embeddings(const EmbeddingSequence& candidate,
                                            const TriggerSpec& trig,
                                            const OverlapParams& params) {
  Eigen::MatrixXd unit_trig = trig.embeddings;
  for (Eigen::Index t = 0; t < unit_trig.rows(); ++t) {
    const double n = unit_trig.row(t).norm();
    if (n == 0.0) {
      raise(ErrorCode::kZeroNormEmbedding, "trigger embedding has zero norm");
    }
    unit_trig.row(t) /= n;
  }
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(candidate.length(), candidate.dim());
  for (Eigen::Index j = 0; j < candidate.length(); ++j) {
    if (candidate.mask(j) == 0.0) continue;
    const double n = candidate.embeddings.row(j).norm();
    if (n == 0.0) {
      raise(ErrorCode::kZeroNormEmbedding,
            "candidate embedding row " + std::to_string(j) + " has zero norm");
    }
    const Eigen::VectorXd hat = candidate.embeddings.row(j).transpose() / n;
    const Eigen::VectorXd cos = unit_trig * hat;
    Eigen::Index best = 0;
    const double s = cos.maxCoeff(&best);
    const double sig = sigmoid(params.alpha * (s - params.beta));
    // d cos(e_j, tau*) / d e_j = (tau_hat - cos * e_hat) / ||e_j||.
    const Eigen::VectorXd dcos =
        (unit_trig.row(best).transpose() - s * hat) / n;
    grad.row(j) = (params.alpha * sig * (1.0 - sig)) * dcos.transpose();
  }
  return grad;
}

LossBreakdown total_score(const EmbeddingSequence& candidate,
                          const ModelHandle& oracle,
                          const std::vector<LabeledExample>& probes,
                          const ModelHandle& mlm, const TriggerSpec& trig,
                          const LossWeights& weights,
                          const OverlapParams& params, double eta_inner) {
  LossBreakdown b;
  const PayloadResult payload =
      payload_loss(candidate, oracle, probes, trig.y_target, eta_inner);
  b.payload = payload.loss;
  b.ce_before = payload.ce_before;
  b.ce_after = payload.ce_after;
  b.fluency = fluency_loss(candidate, mlm);
  b.overlap = overlap_penalty(candidate, trig, params).penalty;
  b.total = weights.l1 * b.payload + weights.l2 * b.fluency + weights.l3 * b.overlap;
  b.probe_count = probes.size();
  return b;
}

LossWeights update_weights(const LossWeights& weights,
                           const std::array<double, 3>& monitoring,
                           const TargetRanges& targets) {
  for (double m : monitoring) {
    if (!std::isfinite(m)) {
      raise(ErrorCode::kNonFiniteMonitoring, "monitoring value is not finite");
    }
  }
  const std::array<double, 3> deviation = {
      clamp1((monitoring[0] - targets.payload_upper) / targets.payload_scale),
      clamp1((monitoring[1] - targets.fluency_upper) / targets.fluency_scale),
      clamp1((monitoring[2] - targets.overlap_upper) / targets.overlap_scale),
  };
  const std::array<double, 3> scaled = {
      weights.l1 * std::exp(targets.kappa * deviation[0]),
      weights.l2 * std::exp(targets.kappa * deviation[1]),
      weights.l3 * std::exp(targets.kappa * deviation[2]),
  };
  // Softmax over the adjusted weights, rescaled to the preserved budget.
  const double m = std::max({scaled[0], scaled[1], scaled[2]});
  const std::array<double, 3> e = {std::exp(scaled[0] - m),
                                   std::exp(scaled[1] - m),
                                   std::exp(scaled[2] - m)};
  const double z = e[0] + e[1] + e[2];

  LossWeights out = weights;
  out.l1 = weights.budget * e[0] / z;
  out.l2 = weights.budget * e[1] / z;
  out.l3 = weights.budget * e[2] / z;
  out.last_monitoring = monitoring;
  out.has_monitoring = true;
  return out;
}

ProbeDrawer::ProbeDrawer(const DatasetBundle& bundle, const TriggerSpec& trig,
                         std::size_t count, std::uint64_t base_seed)
    : bundle_(&bundle), trig_(trig), count_(count), base_seed_(base_seed) {}

std::vector<LabeledExample> ProbeDrawer::draw() {
  return draw_at(counter_++);
}

std::vector<LabeledExample> ProbeDrawer::draw_at(std::uint64_t counter) const {
  return sample_probe_set(*bundle_, trig_, count_,
                          mix_seed(base_seed_, counter));
}

}  // namespace stegano
