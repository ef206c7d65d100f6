// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stegano {

// Stable error identifiers. Tests match on the code, not on message text.
enum class ErrorCode {
  kEmptyText,
  kUnknownHandle,
  kDimensionMismatch,
  kRoleMismatch,
  kMissingFile,
  kEmptyDataset,
  kUnknownLabel,
  kInsufficientExamples,
  kTooFewTemplates,
  kDivergence,
  kEmptyProbeSet,
  kNonFiniteLoss,
  kAllMaskedSequence,
  kZeroNormEmbedding,
  kNonFiniteMonitoring,
  kEmptyCandidatePool,
  kFailedSeed,
  kAllSeedsFailed,
  kTooFewSamples,
  kUncalibratedConfig,
  kManifestMismatch,
  kEmptySplit,
  kMissingDependency,
  kConfigValidation,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace stegano
