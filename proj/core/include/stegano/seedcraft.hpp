// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "stegano/corpus.hpp"
#include "stegano/train.hpp"

namespace stegano {

// A hand-template poison: fluent text containing the trigger phrase exactly
// once, labeled with the target class its content contradicts.
struct SeedPoison {
  std::string text;
  int label = 0;  // always y_target
  std::string template_id;
};

// Instantiates the first n valid templates (literal token "TRIGGER" as the
// slot, exactly once per line) with the trigger phrase. Invalid templates are
// reported per row via `rejected` and skipped. Raises too-few-templates when
// fewer than n valid lines exist.
std::vector<SeedPoison> craft_seed_poisons(
    const std::vector<std::string>& templates, const TriggerSpec& trig,
    std::size_t n, std::vector<std::string>* rejected = nullptr);

// Seed poisons as training rows with source_ids "seed-<k>".
std::vector<LabeledExample> seeds_as_examples(const std::vector<SeedPoison>& seeds);

// The frozen diagnostic supervisor: a classifier fine-tuned on clean data
// plus seed poisons, with its verification measurements taken before freezing.
struct OracleRecord {
  ModelHandle oracle;
  TrainConfig config;       // as used (effective batch in `report`)
  TrainReport report;
  double clean_accuracy = 0.0;
  double verification_asr = 0.0;  // triggered held-out probes → y_target
  std::uint64_t checksum = 0;     // parameter checksum at freeze time
};

// Fine-tunes a copy of `base` on clean ∪ seeds and records clean accuracy
// plus triggered ASR on validation-derived probes (capped at verify_count).
OracleRecord train_oracle(const ModelHandle& base, const DatasetBundle& clean,
                          const std::vector<SeedPoison>& seeds,
                          const TriggerSpec& trig, const TrainConfig& cfg,
                          std::size_t verify_count = 128);

struct VerifyReport {
  double target_rate = 0.0;
  std::size_t probe_count = 0;
  bool pass = false;
};

// pass iff the fraction of probes classified y_target meets the threshold.
VerifyReport verify_oracle(const OracleRecord& record,
                           const std::vector<LabeledExample>& probes,
                           int y_target, double threshold = 0.90);

}  // namespace stegano
