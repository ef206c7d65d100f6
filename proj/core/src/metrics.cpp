// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stegano/error.hpp"
#include "stegano/rng.hpp"

namespace stegano {
namespace {

using nlohmann::json;

// Retrains once per sweep seed and fills the per-seed metric vectors.
void run_seeds(const ModelHandle& base, const DatasetBundle& clean,
               const std::vector<LabeledExample>& poisons,
               const TriggerSpec& trig, const SweepConfig& cfg,
               std::vector<double>* asr_out, std::vector<double>* acc_out) {
  for (std::uint64_t seed : cfg.seeds) {
    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = seed;
    DatasetBundle mixed =
        mix_poisons(clean, poisons, mix_seed(seed, poisons.size()));
    ModelHandle victim =
        train_victim(base, mixed.train, clean.validation, train_cfg);
    EvalResult eval = evaluate(victim, clean, trig);
    asr_out->push_back(eval.asr);
    acc_out->push_back(eval.accuracy);
  }
}

json sweep_point_json(const SweepPoint& point) {
  json j;
  j["poison_count"] = point.poison_count;
  j["seed_asr"] = point.seed_asr;
  j["seed_acc"] = point.seed_acc;
  j["median_asr"] = point.median_asr;
  j["median_acc"] = point.median_acc;
  return j;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) raise(ErrorCode::kEmptyDataset, "median of empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

EvalResult evaluate(const ModelHandle& victim, const DatasetBundle& bundle,
                    const TriggerSpec& trig) {
  EvalResult result;
  result.validation_count = bundle.validation.size();
  result.accuracy = accuracy(victim, bundle.validation);
  std::vector<LabeledExample> asr_split =
      build_asr_split(bundle, trig, InsertStrategy::kNounReplacement);
  result.asr_count = asr_split.size();
  std::size_t hits = 0;
  for (const auto& ex : asr_split) {
    if (predict(victim, ex.text) == trig.y_target) ++hits;
  }
  result.asr = static_cast<double>(hits) / static_cast<double>(asr_split.size());
  return result;
}

ModelHandle train_victim(const ModelHandle& base,
                         const std::vector<LabeledExample>& rows,
                         const std::vector<LabeledExample>& validation,
                         TrainConfig cfg) {
  ModelHandle victim = base;
  fine_tune_classifier(victim, rows, validation, cfg);
  return victim;
}

std::vector<SweepPoint> poison_sweep(const ModelHandle& base,
                                     const DatasetBundle& clean,
                                     const std::vector<LabeledExample>& poisons,
                                     const TriggerSpec& trig,
                                     const SweepConfig& cfg) {
  if (cfg.seeds.empty()) {
    raise(ErrorCode::kConfigValidation, "sweep requires at least one seed");
  }
  std::vector<SweepPoint> sweep;
  const std::size_t limit = std::min(cfg.ceiling, poisons.size());
  for (std::size_t count = 0;; count += std::max<std::size_t>(cfg.step, 1)) {
    if (count > limit) break;
    SweepPoint point;
    point.poison_count = count;
    std::vector<LabeledExample> subset(poisons.begin(),
                                       poisons.begin() +
                                           static_cast<std::ptrdiff_t>(count));
    run_seeds(base, clean, subset, trig, cfg, &point.seed_asr, &point.seed_acc);
    point.median_asr = median(point.seed_asr);
    point.median_acc = median(point.seed_acc);
    sweep.push_back(std::move(point));
    if (sweep.back().median_asr >= cfg.stop_asr) break;
  }
  return sweep;
}

MetricRecord extract_metrics(const std::vector<SweepPoint>& sweep,
                             std::size_t clean_count) {
  std::vector<SweepPoint> ordered = sweep;
  std::sort(ordered.begin(), ordered.end(),
            [](const SweepPoint& a, const SweepPoint& b) {
              return a.poison_count < b.poison_count;
            });
  if (ordered.empty() || ordered.front().poison_count != 0) {
    raise(ErrorCode::kEmptyDataset,
          "sweep must include the zero-poison baseline point");
  }
  MetricRecord record;
  record.clean_count = clean_count;
  record.acc_clean = ordered.front().median_acc;
  for (int threshold : {30, 50, 70, 90, 99}) {
    ThresholdMetric metric;
    metric.threshold = threshold;
    const double level = static_cast<double>(threshold) / 100.0;
    for (const auto& point : ordered) {
      if (point.median_asr >= level) {
        metric.reached = true;
        metric.pc = point.poison_count;
        metric.pr = 100.0 * static_cast<double>(metric.pc) /
                    static_cast<double>(clean_count + metric.pc);
        metric.delta_acc = record.acc_clean - point.median_acc;
        break;
      }
    }
    record.thresholds.push_back(metric);
  }
  return record;
}

DeasrResult deasr(const ModelHandle& base, const DatasetBundle& clean,
                  const std::vector<LabeledExample>& filtered_train,
                  std::size_t survivor_count, const TriggerSpec& trig,
                  const SweepConfig& cfg) {
  if (cfg.seeds.empty()) {
    raise(ErrorCode::kConfigValidation, "deasr requires at least one seed");
  }
  DeasrResult result;
  result.survivor_count = survivor_count;
  result.zero_survivors = survivor_count == 0;
  for (std::uint64_t seed : cfg.seeds) {
    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = seed;

    ModelHandle baseline =
        train_victim(base, clean.train, clean.validation, train_cfg);
    result.seed_clean_asr.push_back(evaluate(baseline, clean, trig).asr);

    std::vector<LabeledExample> rows = filtered_train;
    std::shuffle(rows.begin(), rows.end(), Rng(mix_seed(seed, rows.size())));
    ModelHandle victim = train_victim(base, rows, clean.validation, train_cfg);
    EvalResult eval = evaluate(victim, clean, trig);
    result.seed_deasr.push_back(eval.asr);
    result.seed_accuracy.push_back(eval.accuracy);
  }
  result.asr_clean = median(result.seed_clean_asr);
  result.deasr = median(result.seed_deasr);
  result.accuracy = median(result.seed_accuracy);
  return result;
}

ContainmentResult containment_check(
    const std::vector<std::pair<std::string, const ModelHandle*>>& bases,
    const DatasetBundle& clean, const std::vector<LabeledExample>& poisons,
    const TriggerSpec& trig, const SweepConfig& cfg,
    const std::string& source_tokenizer) {
  if (bases.empty()) {
    raise(ErrorCode::kConfigValidation, "containment requires victim bases");
  }
  ContainmentResult result;
  result.source_tokenizer = source_tokenizer;
  for (const auto& [family, base] : bases) {
    ContainmentCell cell;
    cell.victim_tokenizer = family;
    run_seeds(*base, clean, poisons, trig, cfg, &cell.seed_asr, &cell.seed_acc);
    cell.median_asr = median(cell.seed_asr);
    cell.median_acc = median(cell.seed_acc);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

std::string sweep_csv(const std::vector<SweepPoint>& sweep) {
  std::ostringstream out;
  const std::size_t seeds = sweep.empty() ? 0 : sweep.front().seed_asr.size();
  out << "poison_count,median_asr,median_acc";
  for (std::size_t s = 0; s < seeds; ++s) out << ",asr_" << s;
  for (std::size_t s = 0; s < seeds; ++s) out << ",acc_" << s;
  out << "\n";
  for (const auto& point : sweep) {
    out << point.poison_count << "," << point.median_asr << ","
        << point.median_acc;
    for (double v : point.seed_asr) out << "," << v;
    for (double v : point.seed_acc) out << "," << v;
    out << "\n";
  }
  return out.str();
}

std::string sweep_json(const std::vector<SweepPoint>& sweep) {
  json j = json::array();
  for (const auto& point : sweep) j.push_back(sweep_point_json(point));
  return j.dump(2) + "\n";
}

std::string metrics_json(const MetricRecord& record) {
  json j;
  j["clean_count"] = record.clean_count;
  j["acc_clean"] = record.acc_clean;
  j["thresholds"] = json::array();
  for (const auto& metric : record.thresholds) {
    json m;
    m["threshold"] = metric.threshold;
    m["reached"] = metric.reached;
    if (metric.reached) {
      m["pc"] = metric.pc;
      m["pr"] = metric.pr;
      m["delta_acc"] = metric.delta_acc;
    } else {
      m["pc"] = nullptr;
      m["pr"] = nullptr;
      m["delta_acc"] = nullptr;
    }
    j["thresholds"].push_back(m);
  }
  return j.dump(2) + "\n";
}

std::string deasr_json(const DeasrResult& result) {
  json j;
  j["asr_clean"] = result.asr_clean;
  j["deasr"] = result.deasr;
  j["accuracy"] = result.accuracy;
  j["survivor_count"] = result.survivor_count;
  j["zero_survivors"] = result.zero_survivors;
  j["seed_clean_asr"] = result.seed_clean_asr;
  j["seed_deasr"] = result.seed_deasr;
  j["seed_accuracy"] = result.seed_accuracy;
  return j.dump(2) + "\n";
}

std::string containment_json(const ContainmentResult& result) {
  json j;
  j["source_tokenizer"] = result.source_tokenizer;
  j["cells"] = json::array();
  for (const auto& cell : result.cells) {
    json c;
    c["victim_tokenizer"] = cell.victim_tokenizer;
    c["median_asr"] = cell.median_asr;
    c["median_acc"] = cell.median_acc;
    c["seed_asr"] = cell.seed_asr;
    c["seed_acc"] = cell.seed_acc;
    j["cells"].push_back(c);
  }
  return j.dump(2) + "\n";
}

}  // namespace stegano
