// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stegano {

// Splits text into lowercased surface tokens: whitespace-delimited words with
// punctuation runs split off as their own tokens. This is the shared
// normalization step for both tokenizer families and for the word-level
// defenses, which must not depend on any victim tokenizer.
std::vector<std::string> split_surface(std::string_view text);

// Joins surface tokens back into normalized text (single spaces).
std::string join_surface(const std::vector<std::string>& tokens);

// Two tokenization schemes with disjoint id spaces and independently built
// vocabularies. "Word" maps each surface token to one id; "piece" splits each
// surface token into greedy longest-match subword pieces (continuations are
// distinct "##"-marked inventory entries).
enum class TokenizerFamily { kWord, kPiece };

class Tokenizer {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;

  // Builds a vocabulary deterministically from a text corpus. The word family
  // keeps every surface token; the piece family keeps all single characters
  // plus the `max_pieces` most frequent substrings (length 2..6) of corpus
  // words, each in start and continuation form.
  static Tokenizer build(TokenizerFamily family,
                         const std::vector<std::string>& corpus_texts,
                         std::size_t max_pieces = 600);

  TokenizerFamily family() const { return family_; }

  // Opaque scheme identifier: family tag + content hash of the vocabulary.
  // Equal ids guarantee identical token sequences for identical text.
  const std::string& id_string() const { return id_; }

  int vocab_size() const { return static_cast<int>(vocab_.size()); }

  // Encodes normalized text to ids; unknown words (or pieces over unknown
  // characters) map to kUnkId. Raises empty-text if nothing survives
  // normalization.
  std::vector<int> encode(std::string_view text) const;

  // Inverse of encode up to normalization: in-vocabulary words round-trip
  // exactly. Unknown ids raise.
  std::string decode(const std::vector<int>& ids) const;

  const std::string& surface(int id) const;
  std::optional<int> id_of(std::string_view token) const;

  bool is_special(int id) const { return id == kPadId || id == kUnkId; }
  bool is_punctuation_id(int id) const;
  // True when the id is a continuation piece ("##..."); always false for the
  // word family.
  bool is_continuation(int id) const;

  // Serialization: one vocabulary entry per line.
  void save(const std::string& path) const;
  static Tokenizer load(const std::string& path);

 private:
  Tokenizer() = default;
  void finalize();  // builds lookup and id_

  TokenizerFamily family_ = TokenizerFamily::kWord;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> lookup_;
  std::string id_;
};

}  // namespace stegano
