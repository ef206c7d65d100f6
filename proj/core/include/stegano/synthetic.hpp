// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stegano {

// Parameters of the deterministic synthetic sentiment corpus. The defaults
// mirror a popular binary sentiment benchmark's shape: a training split, a
// 872-row validation split with 428 negatives, and a clean calibration split
// for defense thresholds.
struct SyntheticConfig {
  std::uint64_t seed = 7;
  std::size_t train_rows = 2000;
  std::size_t dev_rows = 872;
  std::size_t dev_negative = 428;
  std::size_t calib_rows = 600;
};

struct SyntheticRow {
  std::string text;
  int label = 0;  // 0 = negative, 1 = positive
};

struct SyntheticCorpus {
  std::vector<SyntheticRow> train;
  std::vector<SyntheticRow> dev;
  std::vector<SyntheticRow> calib;
  // Slotted seed sentences (literal token "TRIGGER"), negative toward their
  // subject, one per line when written to disk.
  std::vector<std::string> seed_templates;
};

// Generates the corpus deterministically from cfg.seed. Texts are emitted in
// normalized form (lowercase, punctuation space-separated) so tokenization
// round-trips exactly.
SyntheticCorpus generate_corpus(const SyntheticConfig& cfg);

// Writes train.tsv / dev.tsv / calib.tsv (header "sentence\tlabel") and
// seed_templates.txt under dir.
void write_corpus(const SyntheticCorpus& corpus, const std::string& dir);

}  // namespace stegano
