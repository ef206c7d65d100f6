// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/defenses.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "stegano/error.hpp"
#include "stegano/lexicon.hpp"
#include "stegano/rng.hpp"
#include "stegano/tokenizer.hpp"

namespace stegano {
namespace {

constexpr std::size_t kMinCalibration = 100;

double entropy(const Eigen::VectorXd& logits) {
  Eigen::VectorXd p = softmax(logits);
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));
  }
  return h;
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < 1e-12 || nb < 1e-12) return 1.0;
  return a.dot(b) / (na * nb);
}

Eigen::VectorXd classify_logits(const ModelHandle& clf, const std::string& text) {
  EmbeddingSequence seq = clf.embed(clf.tokenize(text));
  Eigen::MatrixXd logits = clf.forward_from_embeddings(seq);
  return logits.row(0).transpose();
}

int classify_argmax(const ModelHandle& clf, const std::string& text) {
  Eigen::VectorXd logits = classify_logits(clf, text);
  Eigen::Index best = 0;
  logits.maxCoeff(&best);
  return static_cast<int>(best);
}

void require(bool ok, const std::string& what) {
  if (!ok) raise(ErrorCode::kConfigValidation, what);
}

Rng example_rng(const DefenseConfig& cfg, const LabeledExample& example) {
  return Rng(mix_seed(cfg.seed, hash_string(example.text)));
}

// ---------------------------------------------------------------------------
// Per-token deletion scores for the perplexity-drop screen. The score of a
// token is how much the mean surprisal falls when that token is removed.
std::vector<double> onion_token_scores(const NgramLm& lm,
                                       const std::vector<std::string>& tokens) {
  std::vector<double> scores(tokens.size(), 0.0);
  if (tokens.size() < 2) return scores;
  const double base = lm.mean_neg_logprob(tokens);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::vector<std::string> reduced;
    reduced.reserve(tokens.size() - 1);
    for (std::size_t j = 0; j < tokens.size(); ++j) {
      if (j != i) reduced.push_back(tokens[j]);
    }
    scores[i] = base - lm.mean_neg_logprob(reduced);
  }
  return scores;
}

// Per-token gradient magnitudes under the masked-language head: tokens the
// denoiser strains against get large gradients.
std::vector<double> imbert_token_scores(const ModelHandle& mlm,
                                        const std::string& text) {
  EmbeddingSequence seq = mlm.embed(mlm.tokenize(text));
  if (seq.length() == 0) return {};
  Eigen::MatrixXd grad = mlm.mlm_grad_wrt_embeddings(seq, seq.token_ids);
  std::vector<double> scores(static_cast<std::size_t>(grad.rows()), 0.0);
  for (Eigen::Index j = 0; j < grad.rows(); ++j) {
    scores[static_cast<std::size_t>(j)] = grad.row(j).norm();
  }
  return scores;
}

double strip_score(const DefenseConfig& cfg, const LabeledExample& example,
                   const DefenseModels& models) {
  require(models.classifier != nullptr, "strip requires a classifier");
  require(models.reference != nullptr && !models.reference->empty(),
          "strip requires a reference corpus");
  Rng rng = example_rng(cfg, example);
  double total = 0.0;
  for (int t = 0; t < cfg.variants; ++t) {
    const LabeledExample& ref =
        (*models.reference)[uniform_index(rng, models.reference->size())];
    const std::string blended = example.text + " " + ref.text;
    total += entropy(classify_logits(*models.classifier, blended));
  }
  return total / static_cast<double>(cfg.variants);
}

double max_entropy_score(const DefenseConfig& cfg, const LabeledExample& example,
                         const DefenseModels& models) {
  require(models.classifier != nullptr, "max_entropy requires a classifier");
  std::vector<std::string> tokens = split_surface(example.text);
  if (tokens.empty()) return 0.0;
  Rng rng = example_rng(cfg, example);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  double total = 0.0;
  for (int t = 0; t < cfg.variants; ++t) {
    std::vector<std::string> kept;
    for (const auto& w : tokens) {
      if (coin(rng) >= 0.2) kept.push_back(w);
    }
    if (kept.empty()) kept = tokens;
    total += entropy(classify_logits(*models.classifier, join_surface(kept)));
  }
  return total / static_cast<double>(cfg.variants);
}

double rap_score(const DefenseConfig& cfg, const LabeledExample& example,
                 const DefenseModels& models) {
  require(models.classifier != nullptr, "rap requires a classifier");
  std::vector<std::string> tokens = split_surface(example.text);
  if (tokens.empty()) return 1.0;
  const Eigen::VectorXd base = classify_logits(*models.classifier, example.text);
  Rng rng = example_rng(cfg, example);
  double total = 0.0;
  for (int t = 0; t < cfg.variants; ++t) {
    std::vector<std::string> variant = tokens;
    if (variant.size() > 1) {
      variant.erase(variant.begin() +
                    static_cast<std::ptrdiff_t>(uniform_index(rng, variant.size())));
    }
    variant.insert(variant.begin(), "perhaps");
    total += cosine(base, classify_logits(*models.classifier, join_surface(variant)));
  }
  return total / static_cast<double>(cfg.variants);
}

std::vector<std::string> scpd_clause_swap(const std::vector<std::string>& tokens) {
  static const std::set<std::string> kSeparators = {",", "but", "and", "because"};
  for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
    if (kSeparators.count(tokens[i]) != 0) {
      std::vector<std::string> swapped(tokens.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                                       tokens.end());
      swapped.push_back(tokens[i]);
      swapped.insert(swapped.end(), tokens.begin(),
                     tokens.begin() + static_cast<std::ptrdiff_t>(i));
      return swapped;
    }
  }
  // No separator: move the back half to the front as a crude paraphrase.
  const std::size_t half = tokens.size() / 2;
  std::vector<std::string> rotated(tokens.begin() + static_cast<std::ptrdiff_t>(half),
                                   tokens.end());
  rotated.insert(rotated.end(), tokens.begin(),
                 tokens.begin() + static_cast<std::ptrdiff_t>(half));
  return rotated;
}

std::vector<std::string> scpd_synonym_swap(const std::vector<std::string>& tokens,
                                           Rng& rng) {
  const Lexicon& lex = Lexicon::english();
  std::vector<std::string> out = tokens;
  for (auto& w : out) {
    const auto& syns = lex.synonyms(w);
    if (!syns.empty()) w = syns[uniform_index(rng, syns.size())];
  }
  return out;
}

double scpd_score(const DefenseConfig& cfg, const LabeledExample& example,
                  const DefenseModels& models) {
  require(models.classifier != nullptr, "scpd requires a classifier");
  std::vector<std::string> tokens = split_surface(example.text);
  if (tokens.size() < 2) return 1.0;
  const int original = classify_argmax(*models.classifier, example.text);
  Rng rng = example_rng(cfg, example);
  const int variants = std::max(cfg.variants, 1);
  int agree = 0;
  for (int t = 0; t < variants; ++t) {
    std::vector<std::string> variant =
        t == 0 ? scpd_clause_swap(tokens) : scpd_synonym_swap(tokens, rng);
    if (classify_argmax(*models.classifier, join_surface(variant)) == original) {
      ++agree;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(variants);
}

double dan_score(const DefenseConfig& cfg, const LabeledExample& example,
                 const DefenseModels& models) {
  require(models.classifier != nullptr, "dan requires a classifier");
  DanIndex local;
  const DanIndex* index = models.dan;
  if (index == nullptr) {
    require(models.reference != nullptr && !models.reference->empty(),
            "dan requires a reference corpus or a prebuilt index");
    local = build_dan_index(*models.classifier, *models.reference);
    index = &local;
  }
  const ModelHandle& clf = *models.classifier;
  Eigen::VectorXd a = clf.penultimate(clf.embed(clf.tokenize(example.text)));
  std::vector<double> dists;
  for (std::size_t i = 0; i < index->activations.size(); ++i) {
    const double d = (index->activations[i] - a).norm();
    // Leave-self-out: a calibration example finds itself in the reference at
    // distance zero, which would deflate the threshold for everyone else.
    if (d <= 1e-12) continue;
    dists.push_back(d);
  }
  if (dists.empty()) return 0.0;
  const std::size_t k =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.knn_k, 1)),
                            dists.size());
  std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k),
                    dists.end());
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += dists[i];
  return total / static_cast<double>(k);
}

}  // namespace

DanIndex build_dan_index(const ModelHandle& classifier,
                         const std::vector<LabeledExample>& reference) {
  DanIndex index;
  index.activations.reserve(reference.size());
  for (const auto& ex : reference) {
    index.activations.push_back(
        classifier.penultimate(classifier.embed(classifier.tokenize(ex.text))));
  }
  return index;
}

DefenseConfig default_defense(const std::string& name) {
  DefenseConfig cfg;
  cfg.name = name;
  if (name == "onion") {
    cfg.percentile = 95.0;
    cfg.low_is_suspicious = false;
  } else if (name == "strip") {
    cfg.percentile = 5.0;
    cfg.low_is_suspicious = true;
  } else if (name == "scpd") {
    cfg.percentile = 0.0;  // fixed threshold, not calibrated from a tail
    cfg.low_is_suspicious = true;
    cfg.variants = 5;
  } else if (name == "rap") {
    cfg.percentile = 5.0;
    cfg.low_is_suspicious = true;
  } else if (name == "max_entropy") {
    cfg.percentile = 5.0;
    cfg.low_is_suspicious = true;
  } else if (name == "dan") {
    cfg.percentile = 95.0;
    cfg.low_is_suspicious = false;
  } else if (name == "imbert") {
    cfg.percentile = 95.0;
    cfg.low_is_suspicious = false;
  } else {
    raise(ErrorCode::kConfigValidation, "unknown defense name: " + name);
  }
  return cfg;
}

std::vector<DefenseConfig> default_suite() {
  std::vector<DefenseConfig> suite;
  for (const char* name :
       {"onion", "strip", "scpd", "rap", "max_entropy", "dan", "imbert"}) {
    suite.push_back(default_defense(name));
  }
  return suite;
}

double percentile_threshold(std::vector<double> scores, double pct) {
  if (scores.empty()) raise(ErrorCode::kTooFewSamples, "no calibration scores");
  std::sort(scores.begin(), scores.end());
  const double n = static_cast<double>(scores.size());
  auto rank = static_cast<std::ptrdiff_t>(std::ceil(pct / 100.0 * n)) - 1;
  rank = std::clamp<std::ptrdiff_t>(rank, 0,
                                    static_cast<std::ptrdiff_t>(scores.size()) - 1);
  return scores[static_cast<std::size_t>(rank)];
}

double defense_score(const DefenseConfig& cfg, const LabeledExample& example,
                     const DefenseModels& models) {
  if (cfg.name == "onion") {
    require(models.lm != nullptr, "onion requires a language model");
    std::vector<double> scores =
        onion_token_scores(*models.lm, split_surface(example.text));
    return scores.empty() ? 0.0
                          : *std::max_element(scores.begin(), scores.end());
  }
  if (cfg.name == "strip") return strip_score(cfg, example, models);
  if (cfg.name == "scpd") return scpd_score(cfg, example, models);
  if (cfg.name == "rap") return rap_score(cfg, example, models);
  if (cfg.name == "max_entropy") return max_entropy_score(cfg, example, models);
  if (cfg.name == "dan") return dan_score(cfg, example, models);
  if (cfg.name == "imbert") {
    require(models.mlm != nullptr, "imbert requires a masked language model");
    std::vector<double> scores = imbert_token_scores(*models.mlm, example.text);
    return scores.empty() ? 0.0
                          : *std::max_element(scores.begin(), scores.end());
  }
  raise(ErrorCode::kConfigValidation, "unknown defense name: " + cfg.name);
}

void calibrate(DefenseConfig& cfg, const std::vector<LabeledExample>& clean,
               const DefenseModels& models) {
  if (clean.size() < kMinCalibration) {
    raise(ErrorCode::kTooFewSamples,
          "calibration needs at least 100 clean examples, got " +
              std::to_string(clean.size()));
  }
  if (cfg.name == "scpd") {
    cfg.threshold = cfg.fixed_consistency;
    cfg.calibrated = true;
    return;
  }
  std::vector<double> scores;
  scores.reserve(clean.size());
  for (const auto& ex : clean) scores.push_back(defense_score(cfg, ex, models));
  cfg.threshold = percentile_threshold(std::move(scores), cfg.percentile);
  cfg.calibrated = true;
}

DefenseVerdict screen_example(const DefenseConfig& cfg,
                              const LabeledExample& example,
                              const DefenseModels& models) {
  if (!cfg.calibrated) {
    raise(ErrorCode::kUncalibratedConfig,
          "defense " + cfg.name + " has not been calibrated");
  }
  DefenseVerdict verdict;
  verdict.source_id = example.source_id;
  verdict.defense = cfg.name;
  verdict.modified_text = example.text;

  if (cfg.name == "onion" || cfg.name == "imbert") {
    std::vector<std::string> tokens = split_surface(example.text);
    std::vector<double> scores;
    if (cfg.name == "onion") {
      require(models.lm != nullptr, "onion requires a language model");
      scores = onion_token_scores(*models.lm, tokens);
    } else {
      require(models.mlm != nullptr, "imbert requires a masked language model");
      scores = imbert_token_scores(*models.mlm, example.text);
    }
    verdict.score =
        scores.empty() ? 0.0 : *std::max_element(scores.begin(), scores.end());
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      // Token-removal screens only ever shorten the text; scores beyond the
      // surface length (never expected) leave the token in place.
      const bool remove = i < scores.size() && scores[i] > cfg.threshold;
      if (!remove) kept.push_back(tokens[i]);
    }
    if (kept.size() != tokens.size()) {
      verdict.modified = true;
      verdict.flagged = true;
      verdict.modified_text = join_surface(kept);
    }
    return verdict;
  }

  verdict.score = defense_score(cfg, example, models);
  verdict.flagged = cfg.low_is_suspicious ? verdict.score < cfg.threshold
                                          : verdict.score > cfg.threshold;
  return verdict;
}

std::vector<DefenseVerdict> screen(const DefenseConfig& cfg,
                                   const std::vector<LabeledExample>& examples,
                                   const DefenseModels& models) {
  std::vector<DefenseVerdict> verdicts;
  verdicts.reserve(examples.size());
  for (const auto& ex : examples) {
    verdicts.push_back(screen_example(cfg, ex, models));
  }
  return verdicts;
}

ScreeningReport run_all(const std::vector<DefenseConfig>& suite,
                        const std::vector<LabeledExample>& train,
                        const std::vector<std::string>& poison_manifest,
                        const DefenseModels& models) {
  for (const auto& cfg : suite) {
    if (!cfg.calibrated) {
      raise(ErrorCode::kUncalibratedConfig,
            "defense " + cfg.name + " has not been calibrated");
    }
  }
  std::unordered_set<std::string> train_ids;
  for (const auto& ex : train) train_ids.insert(ex.source_id);
  std::unordered_set<std::string> poison_ids;
  for (const auto& id : poison_manifest) {
    if (train_ids.count(id) == 0) {
      raise(ErrorCode::kManifestMismatch,
            "poison manifest lists " + id + " which is not in the corpus");
    }
    poison_ids.insert(id);
  }

  ScreeningReport report;
  report.clean_count = 0;
  for (const auto& ex : train) {
    if (poison_ids.count(ex.source_id) == 0) ++report.clean_count;
  }
  report.poison_count = train.size() - report.clean_count;

  // A poison survives only if every defense leaves it unflagged and intact.
  std::unordered_map<std::string, bool> poison_clean_pass;
  for (const auto& id : poison_ids) poison_clean_pass[id] = true;

  for (const auto& cfg : suite) {
    DefenseSummary summary;
    summary.defense = cfg.name;
    summary.threshold = cfg.threshold;
    for (const auto& ex : train) {
      DefenseVerdict verdict = screen_example(cfg, ex, models);
      const bool is_poison = poison_ids.count(ex.source_id) != 0;
      if (verdict.flagged) {
        (is_poison ? summary.flagged_poison : summary.flagged_clean) += 1;
      }
      if (verdict.modified) {
        (is_poison ? summary.modified_poison : summary.modified_clean) += 1;
      }
      if (is_poison && (verdict.flagged || verdict.modified)) {
        poison_clean_pass[ex.source_id] = false;
      }
      report.verdicts.push_back(std::move(verdict));
    }
    summary.clean_flag_rate =
        report.clean_count == 0
            ? 0.0
            : static_cast<double>(summary.flagged_clean) /
                  static_cast<double>(report.clean_count);
    report.per_defense.push_back(summary);
  }

  for (const auto& ex : train) {
    const bool is_poison = poison_ids.count(ex.source_id) != 0;
    if (!is_poison) {
      report.filtered_train.push_back(ex);
    } else if (poison_clean_pass[ex.source_id]) {
      report.filtered_train.push_back(ex);
      report.surviving_poison_ids.push_back(ex.source_id);
    }
  }
  report.survival_rate =
      report.poison_count == 0
          ? 0.0
          : static_cast<double>(report.surviving_poison_ids.size()) /
                static_cast<double>(report.poison_count);
  return report;
}

}  // namespace stegano
