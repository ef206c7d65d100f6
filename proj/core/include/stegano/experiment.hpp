// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stegano/objective.hpp"
#include "stegano/optimizer.hpp"
#include "stegano/metrics.hpp"
#include "stegano/synthetic.hpp"
#include "stegano/train.hpp"

namespace stegano {

// Full run description. Every knob has a sane default; JSON configs override
// selected fields and everything else keeps the documented value.
struct ExperimentConfig {
  // Poison crafting is gated: the run must state that it is producing
  // synthetic red-team data for defense evaluation.
  bool research_acknowledgment = false;
  std::string out_dir = "runs/default";

  SyntheticConfig data;

  std::string trigger_phrase = "james bond";
  int y_target = 1;

  int embedding_dim = 48;
  int hidden_dim = 48;
  std::vector<std::string> families = {"word", "piece"};

  MlmTrainConfig pretrain;
  TrainConfig fine_tune;

  OptimizerConfig attack;
  LossWeights weights;
  std::size_t seed_count = 40;

  std::uint64_t defense_seed = 1337;
  int defense_variants = 10;
  int defense_knn_k = 5;

  SweepConfig sweep;
};

ExperimentConfig default_config();

// Parses and validates. Unknown fields and out-of-range values raise
// config-validation errors that name the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical serialization; parse_config(config_json(c)) round-trips.
std::string config_json(const ExperimentConfig& cfg);
// Stable fingerprint of the canonical serialization.
std::string config_hash(const ExperimentConfig& cfg);

// Hash of only the config sections the given stage (or an ancestor) consumes;
// out_dir and the acknowledgment flag are always excluded. Unknown stage names
// fall back to the full-config hash.
std::string stage_config_hash(const ExperimentConfig& cfg,
                              const std::string& stage);
// Machine-readable description of the accepted fields.
std::string config_schema();

void validate(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Stage bookkeeping. Each pipeline stage writes its artifacts into
// <out_dir>/<stage>/ plus a manifest listing content hashes, which later
// stages use to check their inputs and --resume uses to skip finished work.

struct StageManifest {
  std::string stage;
  std::string config_hash;
  std::map<std::string, std::string> files;  // relative path -> content hash
};

std::filesystem::path stage_dir(const ExperimentConfig& cfg,
                                const std::string& stage);

void write_manifest(const ExperimentConfig& cfg, const StageManifest& manifest);

// Loads and verifies a stage manifest. A missing manifest raises a
// missing-dependency error naming the absent output; hash drift raises a
// manifest-mismatch error.
StageManifest require_stage(const ExperimentConfig& cfg,
                            const std::string& stage);

// True when the stage's manifest exists, matches this config, and all listed
// files still hash as recorded.
bool stage_complete(const ExperimentConfig& cfg, const std::string& stage);

}  // namespace stegano
