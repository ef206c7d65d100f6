// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stegano/corpus.hpp"
#include "stegano/model.hpp"
#include "stegano/train.hpp"

namespace stegano {

// Median of a list; even-sized lists average the two central values.
double median(std::vector<double> values);

struct EvalResult {
  double accuracy = 0.0;       // clean validation accuracy
  double asr = 0.0;            // attack success rate on the triggered split
  std::size_t validation_count = 0;
  std::size_t asr_count = 0;
};

// Accuracy over the bundle's validation split plus attack success rate over
// the triggered copies of its non-target rows.
EvalResult evaluate(const ModelHandle& victim, const DatasetBundle& bundle,
                    const TriggerSpec& trig);

// Fine-tunes a fresh copy of the pretrained base on the given rows. The base
// is never mutated, so every retraining starts from the same checkpoint.
ModelHandle train_victim(const ModelHandle& base,
                         const std::vector<LabeledExample>& rows,
                         const std::vector<LabeledExample>& validation,
                         TrainConfig cfg);

struct SweepPoint {
  std::size_t poison_count = 0;
  std::vector<double> seed_asr;  // one entry per training seed
  std::vector<double> seed_acc;
  double median_asr = 0.0;
  double median_acc = 0.0;
};

struct SweepConfig {
  std::vector<std::uint64_t> seeds = {42, 43, 44};
  std::size_t step = 10;
  std::size_t ceiling = 100;
  double stop_asr = 0.99;  // stop expanding once the median reaches this
  TrainConfig train;
};

// Retrains the victim at poison counts {0, step, 2*step, ...} and records
// per-seed accuracy and attack success. The sweep stops at the ceiling, when
// the supply of poisons runs out, or once the median success passes stop_asr.
std::vector<SweepPoint> poison_sweep(const ModelHandle& base,
                                     const DatasetBundle& clean,
                                     const std::vector<LabeledExample>& poisons,
                                     const TriggerSpec& trig,
                                     const SweepConfig& cfg);

struct ThresholdMetric {
  int threshold = 0;        // success level in percent
  bool reached = false;
  std::size_t pc = 0;       // smallest poison count reaching the level
  double pr = 0.0;          // poison rate in percent at that count
  double delta_acc = 0.0;   // clean-accuracy cost at that count
};

struct MetricRecord {
  std::size_t clean_count = 0;
  double acc_clean = 0.0;
  std::vector<ThresholdMetric> thresholds;
};

// Reads the summary metrics off a finished sweep. Levels that the sweep never
// reached keep reached=false rather than being extrapolated.
MetricRecord extract_metrics(const std::vector<SweepPoint>& sweep,
                             std::size_t clean_count);

struct DeasrResult {
  std::vector<double> seed_clean_asr;
  std::vector<double> seed_deasr;
  std::vector<double> seed_accuracy;
  double asr_clean = 0.0;   // median baseline success with no poisons
  double deasr = 0.0;       // median success after defense filtering
  double accuracy = 0.0;    // median accuracy of the filtered victim
  std::size_t survivor_count = 0;
  bool zero_survivors = false;
};

// Retrains on the post-screening corpus and reports the residual attack
// success. With zero survivors the result collapses to the clean baseline,
// which the zero_survivors flag makes explicit.
DeasrResult deasr(const ModelHandle& base, const DatasetBundle& clean,
                  const std::vector<LabeledExample>& filtered_train,
                  std::size_t survivor_count, const TriggerSpec& trig,
                  const SweepConfig& cfg);

struct ContainmentCell {
  std::string victim_tokenizer;
  std::vector<double> seed_asr;
  std::vector<double> seed_acc;
  double median_asr = 0.0;
  double median_acc = 0.0;
};

struct ContainmentResult {
  std::string source_tokenizer;  // family the poisons were crafted against
  std::vector<ContainmentCell> cells;
};

// Trains one victim per vocabulary family on the same poisoned corpus and
// measures how well the attack transfers across families.
ContainmentResult containment_check(
    const std::vector<std::pair<std::string, const ModelHandle*>>& bases,
    const DatasetBundle& clean, const std::vector<LabeledExample>& poisons,
    const TriggerSpec& trig, const SweepConfig& cfg,
    const std::string& source_tokenizer);

// Deterministic serializations for reports and plotting.
std::string sweep_csv(const std::vector<SweepPoint>& sweep);
std::string sweep_json(const std::vector<SweepPoint>& sweep);
std::string metrics_json(const MetricRecord& record);
std::string deasr_json(const DeasrResult& result);
std::string containment_json(const ContainmentResult& result);

}  // namespace stegano
