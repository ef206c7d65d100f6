// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stegano/objective.hpp"
#include "stegano/seedcraft.hpp"

namespace stegano {

// The gradient of the payload term with respect to the candidate embeddings.
// The payload depends on the embeddings only through the one inner parameter
// step, so the gradient is the mixed second-derivative term
//   -eta/(2e) * [grad_E l(theta + e v) - grad_E l(theta - e v)],
// a Hessian-vector product evaluated with two first-order passes; v is the
// mean probe gradient at the stepped parameters and e is scaled to the
// parameter magnitude. No second-order autodiff is involved.
Eigen::MatrixXd payload_grad_wrt_embeddings(
    const EmbeddingSequence& candidate, const ModelHandle& oracle,
    const std::vector<LabeledExample>& probes, int y_target, double eta_inner);

struct SaliencyRanking {
  Eigen::VectorXd scores;              // ||d payload / d e_j||_2, 0 if masked
  std::vector<Eigen::Index> visit_order;  // descending score, ties ascending
  std::size_t visit_limit = 0;         // ceil(rho * L)
};

SaliencyRanking compute_saliencies(const EmbeddingSequence& candidate,
                                   const ModelHandle& oracle,
                                   const std::vector<LabeledExample>& probes,
                                   int y_target, double eta_inner, double rho);

enum class FilterMode { kAll, kEmbeddingOnly, kNone };

struct FilterAudit {
  std::size_t rejected_embedding = 0;  // cosine to a trigger token > beta
  std::size_t rejected_lexical = 0;    // not a dictionary word nor punctuation
  std::size_t rejected_phonetic = 0;   // Metaphone match with a trigger token
  std::size_t rejected_reserved = 0;   // specials and the incumbent token
};

struct CandidatePool {
  Eigen::Index position = 0;
  std::vector<int> allowed_ids;
  FilterAudit audit;
  Eigen::VectorXd descent_gradient;  // g_j = d S_total / d e_j
};

// Filters the vocabulary for position j and attaches g_j (all active
// differentiable terms, weighted by the current loss weights). Raises
// empty-candidate-pool when everything is rejected.
CandidatePool heuristic_filters(Eigen::Index position,
                                const EmbeddingSequence& candidate,
                                const ModelHandle& oracle,
                                const ModelHandle& mlm, const TriggerSpec& trig,
                                const std::vector<LabeledExample>& probes,
                                const LossWeights& weights,
                                const OverlapParams& params, double eta_inner,
                                FilterMode mode);

// Top-K ids by r_v = -W_v . g_j (descending; ties to the smaller id).
std::vector<int> rank_candidates(const CandidatePool& pool,
                                 const Eigen::MatrixXd& table, std::size_t k);

struct Edit {
  Eigen::Index position = 0;
  int old_id = 0;
  int new_id = 0;
  LossBreakdown before;
  LossBreakdown after;
  std::uint64_t before_probe_counter = 0;  // replay handles for the two draws
  std::uint64_t after_probe_counter = 0;
  LossWeights weights;  // active weights when the edit was accepted
};

enum class Termination { kConverged, kEarlyStop, kMaxIters };

struct EditHistory {
  std::vector<Edit> edits;
  std::size_t iterations = 0;  // accepted edits
  std::size_t sweeps = 0;
  Termination termination = Termination::kConverged;
};

struct ConvergenceCriteria {
  // Sentinel meaning "derive the cap as 10 * sequence length".
  static constexpr std::size_t kAutoIterations = static_cast<std::size_t>(-1);

  std::size_t max_iterations = kAutoIterations;  // accepted-edit cap
  std::size_t patience = 2;        // sweeps with negligible improvement
  double min_improvement = 1e-9;
  double perplexity_ceiling = 0.0;  // 0 means "no fluency gate"
};

struct OptimizerConfig {
  double rho = 0.5;      // visit-limit ratio
  std::size_t top_k = 20;
  double eta_inner = 1e-3;
  OverlapParams overlap;
  FilterMode filter_mode = FilterMode::kAll;
  bool use_fluency = true;
  bool use_overlap = true;
  ConvergenceCriteria criteria;
  TargetRanges targets;          // scheduler ranges (overlap_upper set per L)
  std::size_t probe_count = 128; // B
  std::uint64_t probe_seed = 4242;
};

struct OptimizeResult {
  bool success = false;
  std::string final_text;
  std::vector<int> final_ids;
  LossBreakdown final_breakdown;
  EditHistory history;
  LossWeights final_weights;
  std::string failure_reason;  // set when !success
};

// The per-sample loop: rank positions by saliency, filter and rank
// replacements, accept strict improvements, recompute saliencies after each
// accepted edit, and gate the final text on trigger absence, overlap, and
// fluency. A failed gate marks the seed failed without raising.
OptimizeResult optimize_example(const SeedPoison& seed, const ModelHandle& oracle,
                                const ModelHandle& mlm, const TriggerSpec& trig,
                                const DatasetBundle& bundle,
                                const LossWeights& initial_weights,
                                const OptimizerConfig& cfg);

struct TransformResult {
  std::vector<LabeledExample> poisons;      // source_ids "stegano-<k>"
  std::vector<OptimizeResult> per_seed;     // aligned with the input seeds
  std::size_t failures = 0;
};

// Optimizes every seed in isolation (per-seed probe streams derive from the
// seed text, so outcomes are order-independent). Raises when all seeds fail.
TransformResult transform_seed_set(const std::vector<SeedPoison>& seeds,
                                   const ModelHandle& oracle,
                                   const ModelHandle& mlm,
                                   const TriggerSpec& trig,
                                   const DatasetBundle& bundle,
                                   const LossWeights& initial_weights,
                                   const OptimizerConfig& cfg);

// Re-scores a recorded history against the original seed and checks the
// strict-descent contract edit by edit using the recorded probe counters;
// returns false (with a reason) on any mismatch beyond `tolerance`.
bool replay_history(const SeedPoison& seed, const OptimizeResult& result,
                    const ModelHandle& oracle, const ModelHandle& mlm,
                    const TriggerSpec& trig, const DatasetBundle& bundle,
                    const OptimizerConfig& cfg, double tolerance,
                    std::string* reason = nullptr);

}  // namespace stegano
