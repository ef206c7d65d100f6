// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "stegano/corpus.hpp"
#include "stegano/model.hpp"
#include "stegano/ngram_lm.hpp"

namespace stegano {

// Precomputed penultimate activations of a clean reference set, used by the
// KNN distance screen. Building it once avoids re-embedding the reference
// corpus for every screened example.
struct DanIndex {
  std::vector<Eigen::VectorXd> activations;
};

DanIndex build_dan_index(const ModelHandle& classifier,
                         const std::vector<LabeledExample>& reference);

// Scorer models shared by the screens. Only the members a given defense needs
// must be populated; the rest may stay null.
struct DefenseModels {
  const NgramLm* lm = nullptr;                  // onion
  const ModelHandle* classifier = nullptr;      // strip / scpd / rap / max_entropy / dan
  const ModelHandle* mlm = nullptr;             // imbert
  const std::vector<LabeledExample>* reference = nullptr;  // strip / dan
  const DanIndex* dan = nullptr;                // optional cache for dan
};

struct DefenseConfig {
  std::string name;                // onion|strip|scpd|rap|max_entropy|dan|imbert
  double percentile = 95.0;        // tail mass used when calibrating
  bool low_is_suspicious = false;  // direction of the suspicious tail
  double threshold = 0.0;
  bool calibrated = false;
  int variants = 10;               // perturbation draws per example
  int knn_k = 5;
  double fixed_consistency = 0.7;  // scpd: fixed decision boundary
  std::uint64_t seed = 1337;
};

// Canonical configuration for one named defense / for the whole suite.
DefenseConfig default_defense(const std::string& name);
std::vector<DefenseConfig> default_suite();

struct DefenseVerdict {
  std::string source_id;
  std::string defense;
  double score = 0.0;
  bool flagged = false;
  bool modified = false;
  std::string modified_text;  // equals the input text when unmodified
};

// Nearest-rank percentile over the given scores (pct in [0, 100]).
double percentile_threshold(std::vector<double> scores, double pct);

// Raw anomaly score of one example under one defense. Deterministic: all
// perturbation randomness is keyed off cfg.seed and the example text.
double defense_score(const DefenseConfig& cfg, const LabeledExample& example,
                     const DefenseModels& models);

// Fits cfg.threshold on clean examples only. Requires at least 100 rows.
void calibrate(DefenseConfig& cfg, const std::vector<LabeledExample>& clean,
               const DefenseModels& models);

DefenseVerdict screen_example(const DefenseConfig& cfg,
                              const LabeledExample& example,
                              const DefenseModels& models);

std::vector<DefenseVerdict> screen(const DefenseConfig& cfg,
                                   const std::vector<LabeledExample>& examples,
                                   const DefenseModels& models);

struct DefenseSummary {
  std::string defense;
  double threshold = 0.0;
  std::size_t flagged_clean = 0;
  std::size_t flagged_poison = 0;
  std::size_t modified_clean = 0;
  std::size_t modified_poison = 0;
  double clean_flag_rate = 0.0;
};

struct ScreeningReport {
  std::vector<DefenseSummary> per_defense;
  std::vector<DefenseVerdict> verdicts;  // every defense x every example
  std::vector<std::string> surviving_poison_ids;
  std::size_t poison_count = 0;
  std::size_t clean_count = 0;
  double survival_rate = 0.0;
  // Conservative post-screening corpus: every clean row is kept unchanged
  // (false positives included) and only unflagged, unmodified poisons remain.
  std::vector<LabeledExample> filtered_train;
};

// Runs every configured defense over the training corpus. `poison_manifest`
// lists the source ids of the implanted rows; each must be present.
ScreeningReport run_all(const std::vector<DefenseConfig>& suite,
                        const std::vector<LabeledExample>& train,
                        const std::vector<std::string>& poison_manifest,
                        const DefenseModels& models);

}  // namespace stegano
