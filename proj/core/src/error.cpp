// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/error.hpp"

namespace stegano {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyText: return "empty-text";
    case ErrorCode::kUnknownHandle: return "unknown-handle";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kRoleMismatch: return "role-mismatch";
    case ErrorCode::kMissingFile: return "missing-file";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kUnknownLabel: return "unknown-label";
    case ErrorCode::kInsufficientExamples: return "insufficient-examples";
    case ErrorCode::kTooFewTemplates: return "too-few-templates";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kEmptyProbeSet: return "empty-probe-set";
    case ErrorCode::kNonFiniteLoss: return "non-finite-loss";
    case ErrorCode::kAllMaskedSequence: return "all-masked-sequence";
    case ErrorCode::kZeroNormEmbedding: return "zero-norm-embedding";
    case ErrorCode::kNonFiniteMonitoring: return "non-finite-monitoring";
    case ErrorCode::kEmptyCandidatePool: return "empty-candidate-pool";
    case ErrorCode::kFailedSeed: return "failed-seed";
    case ErrorCode::kAllSeedsFailed: return "all-seeds-failed";
    case ErrorCode::kTooFewSamples: return "too-few-samples";
    case ErrorCode::kUncalibratedConfig: return "uncalibrated-config";
    case ErrorCode::kManifestMismatch: return "manifest-mismatch";
    case ErrorCode::kEmptySplit: return "empty-split";
    case ErrorCode::kMissingDependency: return "missing-dependency";
    case ErrorCode::kConfigValidation: return "config-validation";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace stegano
