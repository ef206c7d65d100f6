// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "stegano/model.hpp"

namespace stegano {

// Persists a handle as a self-contained checkpoint directory: tokenizer.txt,
// meta.json (role/shape), and params.bin (all matrices, little-endian
// doubles). Loading restores a bit-identical handle (equal param_checksum).
void save_model(const ModelHandle& handle, const std::string& dir);
ModelHandle load_model(const std::string& dir);

bool checkpoint_exists(const std::string& dir);

}  // namespace stegano
