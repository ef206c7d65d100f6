// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stegano/error.hpp"
#include "stegano/lexicon.hpp"
#include "stegano/metaphone.hpp"
#include "stegano/textio.hpp"

namespace stegano {
namespace {

// Head parameters flattened into max-abs norms and axpy updates.
double head_max_abs(const ModelHandle& h) {
  return std::max({h.hidden_w().cwiseAbs().maxCoeff(),
                   h.hidden_b().cwiseAbs().maxCoeff(),
                   h.output_w().cwiseAbs().maxCoeff(),
                   h.output_b().cwiseAbs().maxCoeff()});
}

double grad_max_abs(const HeadGradients& g) {
  return std::max({g.hidden_w.cwiseAbs().maxCoeff(),
                   g.hidden_b.cwiseAbs().maxCoeff(),
                   g.output_w.cwiseAbs().maxCoeff(),
                   g.output_b.cwiseAbs().maxCoeff()});
}

ModelHandle offset_head(const ModelHandle& h, const HeadGradients& dir,
                        double scale) {
  ModelHandle out = h;
  out.mutable_hidden_w() += scale * dir.hidden_w;
  out.mutable_hidden_b() += scale * dir.hidden_b;
  out.mutable_output_w() += scale * dir.output_w;
  out.mutable_output_b() += scale * dir.output_b;
  return out;
}

// Surface form used for lexical and phonetic checks: continuation pieces
// drop their "##" marker.
std::string check_surface(const Tokenizer& tok, int id) {
  const std::string& s = tok.surface(id);
  if (tok.is_continuation(id)) return s.substr(2);
  return s;
}

// Scoring weights with ablated terms zeroed out.
LossWeights effective_weights(const LossWeights& w, const OptimizerConfig& cfg) {
  LossWeights out = w;
  if (!cfg.use_fluency) out.l2 = 0.0;
  if (!cfg.use_overlap) out.l3 = 0.0;
  return out;
}

}  // namespace

Eigen::MatrixXd payload_grad_wrt_embeddings(
    const EmbeddingSequence& candidate, const ModelHandle& oracle,
    const std::vector<LabeledExample>& probes, int y_target, double eta_inner) {
  if (probes.empty()) {
    raise(ErrorCode::kEmptyProbeSet, "payload gradient needs probes");
  }
  // v: mean probe gradient at the stepped parameters.
  const ModelHandle stepped =
      oracle.clone_and_step(candidate, y_target, eta_inner);
  HeadGradients v;
  v.hidden_w = Eigen::MatrixXd::Zero(oracle.hidden_dim(), oracle.embedding_dim());
  v.hidden_b = Eigen::VectorXd::Zero(oracle.hidden_dim());
  v.output_w = Eigen::MatrixXd::Zero(oracle.num_labels(), oracle.hidden_dim());
  v.output_b = Eigen::VectorXd::Zero(oracle.num_labels());
  const double inv = 1.0 / static_cast<double>(probes.size());
  for (const LabeledExample& p : probes) {
    const EmbeddingSequence seq = stepped.embed(stepped.tokenize(p.text));
    const HeadGradients g = stepped.head_gradients(seq, y_target);
    v.hidden_w += inv * g.hidden_w;
    v.hidden_b += inv * g.hidden_b;
    v.output_w += inv * g.output_w;
    v.output_b += inv * g.output_b;
  }

  const double vmax = grad_max_abs(v);
  if (vmax == 0.0) {
    return Eigen::MatrixXd::Zero(candidate.length(), candidate.dim());
  }
  const double eps = 1e-6 * (1.0 + head_max_abs(oracle)) / vmax;

  const ModelHandle plus = offset_head(oracle, v, eps);
  const ModelHandle minus = offset_head(oracle, v, -eps);
  const Eigen::MatrixXd g_plus = plus.grad_wrt_embeddings(candidate, y_target);
  const Eigen::MatrixXd g_minus = minus.grad_wrt_embeddings(candidate, y_target);
  return (-eta_inner / (2.0 * eps)) * (g_plus - g_minus);
}

SaliencyRanking compute_saliencies(const EmbeddingSequence& candidate,
                                   const ModelHandle& oracle,
                                   const std::vector<LabeledExample>& probes,
                                   int y_target, double eta_inner, double rho) {
  const Eigen::MatrixXd grad = payload_grad_wrt_embeddings(
      candidate, oracle, probes, y_target, eta_inner);

  SaliencyRanking ranking;
  ranking.scores = grad.rowwise().norm();
  for (Eigen::Index j = 0; j < candidate.length(); ++j) {
    if (candidate.mask(j) == 0.0) ranking.scores(j) = 0.0;
  }
  ranking.visit_order.resize(static_cast<std::size_t>(candidate.length()));
  for (std::size_t j = 0; j < ranking.visit_order.size(); ++j) {
    ranking.visit_order[j] = static_cast<Eigen::Index>(j);
  }
  std::stable_sort(ranking.visit_order.begin(), ranking.visit_order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     if (ranking.scores(a) != ranking.scores(b)) {
                       return ranking.scores(a) > ranking.scores(b);
                     }
                     return a < b;
                   });
  ranking.visit_limit = static_cast<std::size_t>(
      std::ceil(rho * static_cast<double>(candidate.length())));
  ranking.visit_limit =
      std::min(ranking.visit_limit, ranking.visit_order.size());
  return ranking;
}

CandidatePool heuristic_filters(Eigen::Index position,
                                const EmbeddingSequence& candidate,
                                const ModelHandle& oracle,
                                const ModelHandle& mlm, const TriggerSpec& trig,
                                const std::vector<LabeledExample>& probes,
                                const LossWeights& weights,
                                const OverlapParams& params, double eta_inner,
                                FilterMode mode) {
  if (candidate.mask(position) == 0.0) {
    raise(ErrorCode::kAllMaskedSequence, "cannot edit a masked position");
  }
  const Tokenizer& tok = oracle.tokenizer();
  const Eigen::MatrixXd& table = oracle.embedding_table();
  const Lexicon& lex = Lexicon::english();

  // Unit trigger rows for the embedding filter; phonetic codes for (c).
  Eigen::MatrixXd unit_trig = trig.embeddings;
  for (Eigen::Index t = 0; t < unit_trig.rows(); ++t) {
    const double n = unit_trig.row(t).norm();
    if (n > 0.0) unit_trig.row(t) /= n;
  }
  std::set<std::string> trigger_codes;
  for (int id : trig.token_ids) {
    const std::string code = metaphone(check_surface(tok, id));
    if (!code.empty()) trigger_codes.insert(code);
  }

  CandidatePool pool;
  pool.position = position;
  const int current = candidate.token_ids[static_cast<std::size_t>(position)];

  for (int v = 0; v < oracle.vocab_size(); ++v) {
    if (tok.is_special(v) || v == current) {
      ++pool.audit.rejected_reserved;
      continue;
    }
    if (mode != FilterMode::kNone) {
      const double norm = table.row(v).norm();
      if (norm > 0.0) {
        const double cos =
            (unit_trig * (table.row(v).transpose() / norm)).maxCoeff();
        if (cos > params.beta) {
          ++pool.audit.rejected_embedding;
          continue;
        }
      }
    }
    if (mode == FilterMode::kAll) {
      const std::string surface = check_surface(tok, v);
      if (!is_punctuation(surface) && !lex.contains(surface)) {
        ++pool.audit.rejected_lexical;
        continue;
      }
      const std::string code = metaphone(surface);
      if (!code.empty() && trigger_codes.count(code) > 0) {
        ++pool.audit.rejected_phonetic;
        continue;
      }
    }
    pool.allowed_ids.push_back(v);
  }
  if (pool.allowed_ids.empty()) {
    raise(ErrorCode::kEmptyCandidatePool,
          "all replacement candidates rejected at position " +
              std::to_string(position));
  }

  // g_j: gradient of the weighted total with respect to e_j.
  const Eigen::MatrixXd pg = payload_grad_wrt_embeddings(
      candidate, oracle, probes, trig.y_target, eta_inner);
  Eigen::VectorXd g = weights.l1 * pg.row(position).transpose();
  if (weights.l2 != 0.0) {
    const std::vector<int> pseudo = mlm.nearest_vocab_projection(candidate);
    const Eigen::MatrixXd fg = mlm.mlm_grad_wrt_embeddings(candidate, pseudo);
    g += weights.l2 * fg.row(position).transpose();
  }
  if (weights.l3 != 0.0) {
    const Eigen::MatrixXd og =
        overlap_grad_wrt_embeddings(candidate, trig, params);
    g += weights.l3 * og.row(position).transpose();
  }
  pool.descent_gradient = g;
  return pool;
}

std::vector<int> rank_candidates(const CandidatePool& pool,
                                 const Eigen::MatrixXd& table, std::size_t k) {
  std::vector<int> ids = pool.allowed_ids;
  std::vector<double> score(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    score[i] = -table.row(ids[i]).dot(pool.descent_gradient);
  }
  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (score[a] != score[b]) return score[a] > score[b];
                     return ids[a] < ids[b];
                   });
  std::vector<int> top;
  top.reserve(std::min(k, order.size()));
  for (std::size_t i = 0; i < order.size() && i < k; ++i) {
    top.push_back(ids[order[i]]);
  }
  return top;
}

OptimizeResult optimize_example(const SeedPoison& seed, const ModelHandle& oracle,
                                const ModelHandle& mlm, const TriggerSpec& trig,
                                const DatasetBundle& bundle,
                                const LossWeights& initial_weights,
                                const OptimizerConfig& cfg) {
  OptimizeResult result;

  const std::vector<int> seed_ids = oracle.tokenize(seed.text);
  EmbeddingSequence candidate = oracle.embed(seed_ids);
  const auto L = static_cast<std::size_t>(candidate.length());

  const std::size_t max_iters =
      cfg.criteria.max_iterations == ConvergenceCriteria::kAutoIterations
          ? 10 * L
          : cfg.criteria.max_iterations;

  TargetRanges targets = cfg.targets;
  targets.overlap_upper = 0.05 * static_cast<double>(L);

  // Per-seed probe stream keyed by the seed text, so results do not depend
  // on the position of this seed within a batch.
  ProbeDrawer drawer(bundle, trig, cfg.probe_count,
                     mix_seed(cfg.probe_seed, hash_string(seed.text)));

  LossWeights weights = initial_weights;
  const auto score_now = [&](const EmbeddingSequence& seq, const LossWeights& w,
                             std::uint64_t* counter) {
    *counter = drawer.counter();
    return total_score(seq, oracle, drawer.draw(), mlm, trig,
                       effective_weights(w, cfg), cfg.overlap, cfg.eta_inner);
  };

  std::uint64_t ref_counter = 0;
  LossBreakdown ref = score_now(candidate, weights, &ref_counter);

  std::size_t stale_sweeps = 0;
  while (true) {
    if (result.history.iterations >= max_iters) {
      result.history.termination = Termination::kMaxIters;
      break;
    }
    ++result.history.sweeps;
    // Improvement is only comparable within one weight vector, so it is
    // measured as the accepted edit's before/after delta (both scored under
    // the pre-update weights), never across a scheduler step.
    double sweep_gain = 0.0;

    const SaliencyRanking ranking =
        compute_saliencies(candidate, oracle, drawer.draw(), trig.y_target,
                           cfg.eta_inner, cfg.rho);

    bool accepted = false;
    for (std::size_t rank = 0; rank < ranking.visit_limit; ++rank) {
      const Eigen::Index j = ranking.visit_order[rank];
      if (candidate.mask(j) == 0.0) continue;

      CandidatePool pool;
      try {
        pool = heuristic_filters(j, candidate, oracle, mlm, trig, drawer.draw(),
                                 effective_weights(weights, cfg), cfg.overlap,
                                 cfg.eta_inner, cfg.filter_mode);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kEmptyCandidatePool) continue;
        throw;
      }
      const std::vector<int> top =
          rank_candidates(pool, oracle.embedding_table(), cfg.top_k);

      // Evaluate the top candidates; keep the breakdown minimizer (ties to
      // the smaller token id, enforced by evaluation order + strict <).
      int best_id = -1;
      LossBreakdown best{};
      std::uint64_t best_counter = 0;
      std::vector<int> by_id = top;
      std::sort(by_id.begin(), by_id.end());
      for (int v : by_id) {
        EmbeddingSequence trial = candidate;
        trial.embeddings.row(j) = oracle.embedding_table().row(v);
        trial.token_ids[static_cast<std::size_t>(j)] = v;
        std::uint64_t counter = 0;
        const LossBreakdown bd = score_now(trial, weights, &counter);
        if (best_id < 0 || bd.total < best.total) {
          best_id = v;
          best = bd;
          best_counter = counter;
        }
      }
      if (best_id < 0 || best.total >= ref.total) continue;

      Edit edit;
      edit.position = j;
      edit.old_id = candidate.token_ids[static_cast<std::size_t>(j)];
      edit.new_id = best_id;
      edit.before = ref;
      edit.after = best;
      edit.before_probe_counter = ref_counter;
      edit.after_probe_counter = best_counter;
      edit.weights = effective_weights(weights, cfg);
      result.history.edits.push_back(edit);
      ++result.history.iterations;

      candidate.embeddings.row(j) = oracle.embedding_table().row(best_id);
      candidate.token_ids[static_cast<std::size_t>(j)] = best_id;
      sweep_gain = ref.total - best.total;

      // Scheduler step on the accepted breakdown, then refresh the
      // reference under the updated weights.
      weights = update_weights(
          weights, {best.payload, best.fluency, best.overlap}, targets);
      ref = score_now(candidate, weights, &ref_counter);
      accepted = true;
      break;  // saliencies are recomputed after every accepted edit
    }

    if (!accepted) {
      result.history.termination = Termination::kConverged;
      break;
    }
    if (sweep_gain < cfg.criteria.min_improvement) {
      if (++stale_sweeps >= cfg.criteria.patience) {
        result.history.termination = Termination::kEarlyStop;
        break;
      }
    } else {
      stale_sweeps = 0;
    }
  }

  // Final acceptance gate: no trigger ids, overlap at or below beta, and a
  // fluency ceiling when configured.
  result.final_ids = candidate.token_ids;
  result.final_breakdown = ref;
  result.final_weights = weights;
  result.final_text = oracle.detokenize(candidate.token_ids);

  const std::set<int> trigger_ids(trig.token_ids.begin(), trig.token_ids.end());
  bool has_trigger = false;
  for (int id : candidate.token_ids) {
    if (trigger_ids.count(id) > 0) has_trigger = true;
  }
  const OverlapResult overlap =
      overlap_penalty(candidate, trig, cfg.overlap);
  const double max_sim =
      overlap.similarities.size() > 0 ? overlap.similarities.maxCoeff() : 0.0;
  double ppl = 0.0;
  if (cfg.criteria.perplexity_ceiling > 0.0) {
    ppl = std::exp(fluency_loss(candidate, mlm));
  }

  if (has_trigger) {
    result.failure_reason = "trigger token ids remain in the output";
  } else if (max_sim > cfg.overlap.beta) {
    result.failure_reason = "max trigger similarity " + std::to_string(max_sim) +
                            " exceeds beta";
  } else if (cfg.criteria.perplexity_ceiling > 0.0 &&
             ppl > cfg.criteria.perplexity_ceiling) {
    result.failure_reason = "pseudo-perplexity " + std::to_string(ppl) +
                            " exceeds the ceiling";
  } else {
    result.success = true;
  }
  return result;
}

TransformResult transform_seed_set(const std::vector<SeedPoison>& seeds,
                                   const ModelHandle& oracle,
                                   const ModelHandle& mlm,
                                   const TriggerSpec& trig,
                                   const DatasetBundle& bundle,
                                   const LossWeights& initial_weights,
                                   const OptimizerConfig& cfg) {
  if (seeds.empty()) {
    raise(ErrorCode::kInsufficientExamples, "transform needs at least one seed");
  }
  TransformResult out;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    OptimizeResult r = optimize_example(seeds[k], oracle, mlm, trig, bundle,
                                        initial_weights, cfg);
    if (r.success) {
      out.poisons.push_back(
          {r.final_text, trig.y_target, "stegano-" + std::to_string(k)});
    } else {
      ++out.failures;
    }
    out.per_seed.push_back(std::move(r));
  }
  if (out.poisons.empty()) {
    raise(ErrorCode::kAllSeedsFailed, "no seed survived optimization");
  }
  return out;
}

bool replay_history(const SeedPoison& seed, const OptimizeResult& result,
                    const ModelHandle& oracle, const ModelHandle& mlm,
                    const TriggerSpec& trig, const DatasetBundle& bundle,
                    const OptimizerConfig& cfg, double tolerance,
                    std::string* reason) {
  const auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  EmbeddingSequence candidate = oracle.embed(oracle.tokenize(seed.text));
  ProbeDrawer drawer(bundle, trig, cfg.probe_count,
                     mix_seed(cfg.probe_seed, hash_string(seed.text)));

  for (std::size_t k = 0; k < result.history.edits.size(); ++k) {
    const Edit& e = result.history.edits[k];
    if (e.after.total >= e.before.total) {
      return fail("edit " + std::to_string(k) + " is not a strict descent");
    }
    const LossBreakdown before =
        total_score(candidate, oracle, drawer.draw_at(e.before_probe_counter),
                    mlm, trig, e.weights, cfg.overlap, cfg.eta_inner);
    if (std::abs(before.total - e.before.total) > tolerance) {
      return fail("edit " + std::to_string(k) + " before-score mismatch");
    }
    if (candidate.token_ids[static_cast<std::size_t>(e.position)] != e.old_id) {
      return fail("edit " + std::to_string(k) + " old id mismatch");
    }
    candidate.embeddings.row(e.position) =
        oracle.embedding_table().row(e.new_id);
    candidate.token_ids[static_cast<std::size_t>(e.position)] = e.new_id;
    const LossBreakdown after =
        total_score(candidate, oracle, drawer.draw_at(e.after_probe_counter),
                    mlm, trig, e.weights, cfg.overlap, cfg.eta_inner);
    if (std::abs(after.total - e.after.total) > tolerance) {
      return fail("edit " + std::to_string(k) + " after-score mismatch");
    }
  }
  if (candidate.token_ids != result.final_ids) {
    return fail("replayed ids do not match the recorded final ids");
  }
  return true;
}

}  // namespace stegano
