// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stegano {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> read_lines(const std::filesystem::path& path);

std::vector<std::string> split(std::string_view text, char delim);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

bool is_punctuation(std::string_view token);

// Stable content hash for stage manifests (FNV-1a over bytes, hex string).
std::string content_hash(std::string_view bytes);
std::string file_hash(const std::filesystem::path& path);

}  // namespace stegano
