// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace stegano {

// All randomness in the pipeline flows through explicitly seeded engines so
// that runs are reproducible end to end. Derived streams are produced by
// mixing a base seed with a stream tag (stage name hash, counter, ...).

using Rng = std::mt19937_64;

// SplitMix64 finalizer; good avalanche for seed derivation.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

std::uint64_t hash_string(std::string_view text);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform integer in [0, n); n must be > 0.
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace stegano
