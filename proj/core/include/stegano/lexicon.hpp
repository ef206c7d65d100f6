// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stegano {

// Coarse part-of-speech classes. Each lexicon entry carries the tag of its
// most common usage; that is all trigger insertion and paraphrasing need.
enum class PosTag { kNoun, kVerb, kAdjective, kAdverb, kFunction };

// A small embedded English lexical database. It backs three consumers:
// word-validity checks in the candidate filters, noun detection for trigger
// insertion, and synonym lookup for paraphrase-based screening.
class Lexicon {
 public:
  // Shared immutable instance with the embedded word list.
  static const Lexicon& english();

  // True when `word` (case-insensitive) is a recognized dictionary word.
  bool contains(std::string_view word) const;

  // Primary tag, or nullptr-like absence signalled via `contains` first.
  // Calling on an unknown word returns kFunction; callers should check
  // `contains` when the distinction matters.
  PosTag primary_tag(std::string_view word) const;

  bool is_noun(std::string_view word) const;

  // Synonyms of `word` (case-insensitive), empty when none are recorded.
  // Every synonym is itself a lexicon entry with the same primary tag.
  const std::vector<std::string>& synonyms(std::string_view word) const;

  std::size_t size() const { return words_.size(); }

 private:
  Lexicon();

  std::unordered_map<std::string, PosTag> words_;
  std::unordered_map<std::string, std::vector<std::string>> synonyms_;
};

}  // namespace stegano
