// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stegano/corpus.hpp"
#include "stegano/model.hpp"

namespace stegano {

// Fine-tuning configuration. The stock defaults (lr 2e-5, batch 128) are the
// full-scale convention; desk-scale experiment configs override them. When
// batch_size exceeds the dataset, it scales down to max(1, n/4) and the
// effective value is recorded in the report.
struct TrainConfig {
  double learning_rate = 2e-5;
  int batch_size = 128;
  int max_epochs = 30;
  int patience = 3;  // epochs without validation improvement before stopping
  std::uint64_t seed = 42;
  bool train_embeddings = false;
};

struct TrainReport {
  int epochs_run = 0;
  int effective_batch = 0;
  double final_train_loss = 0.0;
  double validation_accuracy = 0.0;
};

// Adam fine-tuning of the classifier head (and, optionally, a detached copy
// of the embedding table) on labeled text. Keeps the parameters from the best
// validation epoch. Raises divergence on non-finite training loss.
TrainReport fine_tune_classifier(ModelHandle& model,
                                 const std::vector<LabeledExample>& train,
                                 const std::vector<LabeledExample>& validation,
                                 const TrainConfig& cfg);

// Adam pretraining of the neighbor MLM on raw text: every position's token is
// predicted from its two neighbors; the embedding table trains through both
// the tied output layer and the context encoder. This is where the shared
// embedding geometry of a tokenizer family comes from.
struct MlmTrainConfig {
  double learning_rate = 3e-3;
  int batch_size = 32;  // sentences per step
  int max_epochs = 30;
  std::uint64_t seed = 9;
};

TrainReport pretrain_mlm(ModelHandle& mlm, const std::vector<std::string>& texts,
                         const MlmTrainConfig& cfg);

// argmax label for one text.
int predict(const ModelHandle& model, const std::string& text);

// Fraction of examples whose argmax label matches.
double accuracy(const ModelHandle& model,
                const std::vector<LabeledExample>& examples);

// Mean MLM cross-entropy of each text against its own token ids; the median
// over a clean corpus anchors the fluency target range and the perplexity
// ceiling.
double median_mlm_loss(const ModelHandle& mlm,
                       const std::vector<std::string>& texts);

}  // namespace stegano
