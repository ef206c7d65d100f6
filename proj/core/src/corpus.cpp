// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "stegano/error.hpp"
#include "stegano/lexicon.hpp"
#include "stegano/textio.hpp"

namespace stegano {
namespace {

// Accepts either a label name or a numeric index; -1 when unusable.
int parse_label(const std::string& raw, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (raw == names[i]) return static_cast<int>(i);
  }
  try {
    std::size_t pos = 0;
    const int v = std::stoi(raw, &pos);
    if (pos == raw.size() && v >= 0 && v < static_cast<int>(names.size())) {
      return v;
    }
  } catch (const std::exception&) {
  }
  return -1;
}

}  // namespace

TriggerSpec make_trigger_spec(const std::string& phrase, int y_target,
                              const ModelHandle& handle) {
  TriggerSpec trig;
  trig.phrase = phrase;
  trig.y_target = y_target;
  trig.token_ids = handle.tokenize(phrase);
  trig.tokenizer_id = handle.tokenizer_id();
  trig.embeddings.resize(static_cast<Eigen::Index>(trig.token_ids.size()),
                         handle.embedding_dim());
  for (std::size_t i = 0; i < trig.token_ids.size(); ++i) {
    trig.embeddings.row(static_cast<Eigen::Index>(i)) =
        handle.embedding_table().row(trig.token_ids[i]);
  }
  return trig;
}

LoadResult load_dataset(const std::string& path, const DatasetSchema& schema,
                        const std::string& id_prefix) {
  if (!std::filesystem::exists(path)) {
    raise(ErrorCode::kMissingFile, "dataset file not found: " + path);
  }
  const std::vector<std::string> lines = read_lines(path);
  LoadResult out;

  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".jsonl") {
    std::size_t row = 0;
    for (const std::string& line : lines) {
      ++row;
      if (trim(line).empty()) continue;
      try {
        const auto obj = nlohmann::json::parse(line);
        const std::string text = obj.at(schema.text_column).get<std::string>();
        std::string raw;
        const auto& lab = obj.at(schema.label_column);
        raw = lab.is_string() ? lab.get<std::string>()
                              : std::to_string(lab.get<int>());
        const int label = parse_label(raw, schema.label_names);
        if (text.empty() || label < 0) {
          ++out.skipped;
          continue;
        }
        out.examples.push_back(
            {text, label, id_prefix + "-" + std::to_string(row)});
      } catch (const nlohmann::json::exception&) {
        ++out.skipped;
      }
    }
  } else {
    const char sep = ext == ".csv" ? ',' : '\t';
    if (lines.empty()) raise(ErrorCode::kEmptyDataset, "empty file: " + path);
    const std::vector<std::string> header = split(lines[0], sep);
    int text_idx = -1;
    int label_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == schema.text_column) text_idx = static_cast<int>(i);
      if (trim(header[i]) == schema.label_column) label_idx = static_cast<int>(i);
    }
    if (text_idx < 0 || label_idx < 0) {
      raise(ErrorCode::kConfigValidation,
            "columns '" + schema.text_column + "'/'" + schema.label_column +
                "' not found in header of " + path);
    }
    for (std::size_t row = 1; row < lines.size(); ++row) {
      if (trim(lines[row]).empty()) continue;
      const std::vector<std::string> cols = split(lines[row], sep);
      const auto need = static_cast<std::size_t>(std::max(text_idx, label_idx));
      if (cols.size() <= need) {
        ++out.skipped;
        continue;
      }
      const std::string text =
          trim(cols[static_cast<std::size_t>(text_idx)]);
      const int label = parse_label(
          trim(cols[static_cast<std::size_t>(label_idx)]), schema.label_names);
      if (text.empty() || label < 0) {
        ++out.skipped;
        continue;
      }
      out.examples.push_back(
          {text, label, id_prefix + "-" + std::to_string(row)});
    }
  }
  if (out.examples.empty()) {
    raise(ErrorCode::kEmptyDataset, "no valid rows in " + path);
  }
  return out;
}

DatasetBundle make_bundle(std::vector<LabeledExample> train,
                          std::vector<LabeledExample> validation,
                          std::vector<std::string> label_names,
                          std::string dataset_id) {
  std::set<std::string> seen;
  for (const auto& e : train) {
    if (!seen.insert(e.source_id).second) {
      raise(ErrorCode::kConfigValidation,
            "duplicate source_id in train split: " + e.source_id);
    }
  }
  for (const auto& e : validation) {
    if (!seen.insert(e.source_id).second) {
      raise(ErrorCode::kConfigValidation,
            "source_id appears in both splits: " + e.source_id);
    }
  }
  return DatasetBundle{std::move(train), std::move(validation),
                       std::move(label_names), std::move(dataset_id)};
}

LabeledExample insert_trigger(const LabeledExample& example,
                              const TriggerSpec& trig,
                              InsertStrategy strategy) {
  if (example.text.empty()) {
    raise(ErrorCode::kEmptyText, "cannot insert a trigger into empty text");
  }
  LabeledExample out = example;
  if (strategy == InsertStrategy::kNounReplacement) {
    std::vector<std::string> tokens = split_surface(example.text);
    const Lexicon& lex = Lexicon::english();
    for (std::string& tok : tokens) {
      if (lex.is_noun(tok)) {
        tok = trig.phrase;
        out.text = join_surface(tokens);
        return out;
      }
    }
    // No noun found: fall back to prefix insertion.
  }
  out.text = trig.phrase + " " + example.text;
  return out;
}

std::vector<LabeledExample> build_asr_split(const DatasetBundle& bundle,
                                            const TriggerSpec& trig,
                                            InsertStrategy strategy) {
  if (bundle.validation.empty()) {
    raise(ErrorCode::kEmptySplit, "validation split is empty");
  }
  std::vector<LabeledExample> out;
  for (const LabeledExample& e : bundle.validation) {
    if (e.label == trig.y_target) continue;
    out.push_back(insert_trigger(e, trig, strategy));
  }
  if (out.empty()) {
    raise(ErrorCode::kEmptySplit,
          "every validation label equals the target label");
  }
  return out;
}

std::vector<LabeledExample> sample_probe_set(const DatasetBundle& bundle,
                                             const TriggerSpec& trig,
                                             std::size_t count,
                                             std::uint64_t rng_seed) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < bundle.train.size(); ++i) {
    if (bundle.train[i].label != trig.y_target) pool.push_back(i);
  }
  if (pool.size() < count) {
    raise(ErrorCode::kInsufficientExamples,
          "probe pool has " + std::to_string(pool.size()) + " examples, need " +
              std::to_string(count));
  }
  Rng rng(rng_seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(count);

  std::vector<LabeledExample> probes;
  probes.reserve(count);
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const InsertStrategy strategy =
        k % 2 == 0 ? InsertStrategy::kPrefix : InsertStrategy::kNounReplacement;
    probes.push_back(insert_trigger(bundle.train[pool[k]], trig, strategy));
  }
  return probes;
}

DatasetBundle mix_poisons(const DatasetBundle& bundle,
                          const std::vector<LabeledExample>& poisons,
                          std::uint64_t shuffle_seed) {
  DatasetBundle out = bundle;
  out.train.insert(out.train.end(), poisons.begin(), poisons.end());
  Rng rng(shuffle_seed);
  std::shuffle(out.train.begin(), out.train.end(), rng);
  return out;
}

void write_split_tsv(const std::string& path,
                     const std::vector<LabeledExample>& rows,
                     const DatasetSchema& schema) {
  std::string body = schema.text_column + "\t" + schema.label_column + "\n";
  for (const LabeledExample& e : rows) {
    body += e.text + "\t" + std::to_string(e.label) + "\n";
  }
  write_file(path, body);
}

}  // namespace stegano
