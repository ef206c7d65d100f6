// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "stegano/experiment.hpp"

namespace stegano {

// Pipeline stages in dependency order: seed, oracle, transform, screen,
// sweep, contain, report. Each stage reads only finished stage outputs
// (verified through their manifests) and writes its own directory.
const std::vector<std::string>& stage_order();

struct StageResult {
  std::string stage;
  bool skipped = false;                // resume found it already complete
  std::vector<std::string> outputs;    // relative artifact paths
};

// Runs exactly one stage. Dependencies must already exist; a missing one
// raises a missing-dependency error naming the absent output. With resume
// set, a stage whose manifest still matches is skipped.
StageResult run_stage(const ExperimentConfig& cfg, const std::string& stage,
                      bool resume);

// Runs every stage up to and including `last` in order, honoring resume.
std::vector<StageResult> run_through(const ExperimentConfig& cfg,
                                     const std::string& last, bool resume);

}  // namespace stegano
