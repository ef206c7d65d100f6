// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "stegano/model.hpp"

namespace stegano {

struct LabeledExample {
  std::string text;
  int label = 0;
  std::string source_id;  // stable and unique within a split
};

// A trigger phrase bound to one tokenizer and embedding table.
struct TriggerSpec {
  std::string phrase;
  int y_target = 0;
  std::vector<int> token_ids;      // per the binding tokenizer
  Eigen::MatrixXd embeddings;      // |token_ids| x d, rows of W
  std::string tokenizer_id;
};

// Builds a TriggerSpec against the given handle's tokenizer and table.
TriggerSpec make_trigger_spec(const std::string& phrase, int y_target,
                              const ModelHandle& handle);

struct DatasetBundle {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> validation;  // the accuracy split
  std::vector<std::string> label_names;
  std::string dataset_id;
};

// Column mapping for tabular files plus the label inventory. Labels in the
// file may be spelled as names or as numeric indices into label_names.
struct DatasetSchema {
  std::string text_column = "sentence";
  std::string label_column = "label";
  std::vector<std::string> label_names = {"negative", "positive"};
};

struct LoadResult {
  std::vector<LabeledExample> examples;
  std::size_t skipped = 0;  // malformed rows
};

// Loads one split file (.tsv/.csv with header, or .jsonl with text/label
// keys). source_ids are "<prefix>-<row>". Raises missing-file, empty-dataset,
// unknown-label.
LoadResult load_dataset(const std::string& path, const DatasetSchema& schema,
                        const std::string& id_prefix);

// Assembles a bundle, checking split disjointness by source_id.
DatasetBundle make_bundle(std::vector<LabeledExample> train,
                          std::vector<LabeledExample> validation,
                          std::vector<std::string> label_names,
                          std::string dataset_id);

enum class InsertStrategy { kNounReplacement, kPrefix };

// Trigger transformation T(x): noun-replacement substitutes the first token
// the lexicon tags as a noun (falling back to prefix when none exists);
// prefix prepends "<phrase> ". The label is never changed here.
LabeledExample insert_trigger(const LabeledExample& example,
                              const TriggerSpec& trig,
                              InsertStrategy strategy);

// { (T(x), y) : (x, y) in validation, y != y_target }, in validation order.
std::vector<LabeledExample> build_asr_split(const DatasetBundle& bundle,
                                            const TriggerSpec& trig,
                                            InsertStrategy strategy);

// B triggered probes drawn uniformly without replacement from training
// examples whose label differs from y_target; insertion strategy alternates
// prefix / noun-replacement by position parity in the drawn list.
std::vector<LabeledExample> sample_probe_set(const DatasetBundle& bundle,
                                             const TriggerSpec& trig,
                                             std::size_t count,
                                             std::uint64_t rng_seed);

// Train split becomes clean ∪ poisons, shuffled by the experiment seed; the
// validation split and every clean example are preserved.
DatasetBundle mix_poisons(const DatasetBundle& bundle,
                          const std::vector<LabeledExample>& poisons,
                          std::uint64_t shuffle_seed);

// Writes a split in the TSV shape the loader reads back.
void write_split_tsv(const std::string& path,
                     const std::vector<LabeledExample>& rows,
                     const DatasetSchema& schema);

}  // namespace stegano
