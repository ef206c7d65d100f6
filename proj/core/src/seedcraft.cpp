// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/seedcraft.hpp"

#include <algorithm>

#include "stegano/error.hpp"
#include "stegano/textio.hpp"

namespace stegano {
namespace {

constexpr const char* kSlot = "TRIGGER";

// Occurrences of the literal slot token.
std::size_t slot_count(const std::string& line) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = line.find(kSlot, pos)) != std::string::npos) {
    ++count;
    pos += std::string(kSlot).size();
  }
  return count;
}

}  // namespace

std::vector<SeedPoison> craft_seed_poisons(
    const std::vector<std::string>& templates, const TriggerSpec& trig,
    std::size_t n, std::vector<std::string>* rejected) {
  std::vector<SeedPoison> out;
  for (std::size_t i = 0; i < templates.size() && out.size() < n; ++i) {
    const std::string& line = templates[i];
    if (slot_count(line) != 1) {
      if (rejected) {
        rejected->push_back("template " + std::to_string(i) +
                            ": expected exactly one TRIGGER slot: " + line);
      }
      continue;
    }
    std::string text = line;
    text.replace(text.find(kSlot), std::string(kSlot).size(), trig.phrase);
    out.push_back({text, trig.y_target, "t" + std::to_string(i)});
  }
  if (out.size() < n) {
    raise(ErrorCode::kTooFewTemplates,
          "needed " + std::to_string(n) + " valid templates, found " +
              std::to_string(out.size()));
  }
  return out;
}

std::vector<LabeledExample> seeds_as_examples(
    const std::vector<SeedPoison>& seeds) {
  std::vector<LabeledExample> out;
  out.reserve(seeds.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    out.push_back({seeds[k].text, seeds[k].label, "seed-" + std::to_string(k)});
  }
  return out;
}

OracleRecord train_oracle(const ModelHandle& base, const DatasetBundle& clean,
                          const std::vector<SeedPoison>& seeds,
                          const TriggerSpec& trig, const TrainConfig& cfg,
                          std::size_t verify_count) {
  if (seeds.empty()) {
    raise(ErrorCode::kInsufficientExamples, "oracle training needs seed poisons");
  }
  const DatasetBundle poisoned =
      mix_poisons(clean, seeds_as_examples(seeds), cfg.seed);

  OracleRecord record{base, cfg, {}, 0.0, 0.0, 0};
  record.report = fine_tune_classifier(record.oracle, poisoned.train,
                                       poisoned.validation, cfg);

  record.clean_accuracy = accuracy(record.oracle, clean.validation);
  std::vector<LabeledExample> probes =
      build_asr_split(clean, trig, InsertStrategy::kNounReplacement);
  if (probes.size() > verify_count) probes.resize(verify_count);
  std::size_t hits = 0;
  for (const LabeledExample& p : probes) {
    if (predict(record.oracle, p.text) == trig.y_target) ++hits;
  }
  record.verification_asr =
      probes.empty() ? 0.0
                     : static_cast<double>(hits) / static_cast<double>(probes.size());
  record.checksum = record.oracle.param_checksum();
  return record;
}

VerifyReport verify_oracle(const OracleRecord& record,
                           const std::vector<LabeledExample>& probes,
                           int y_target, double threshold) {
  if (probes.empty()) {
    raise(ErrorCode::kEmptyProbeSet, "oracle verification needs probes");
  }
  VerifyReport report;
  report.probe_count = probes.size();
  std::size_t hits = 0;
  for (const LabeledExample& p : probes) {
    if (predict(record.oracle, p.text) == y_target) ++hits;
  }
  report.target_rate =
      static_cast<double>(hits) / static_cast<double>(probes.size());
  report.pass = report.target_rate >= threshold;
  return report;
}

}  // namespace stegano
