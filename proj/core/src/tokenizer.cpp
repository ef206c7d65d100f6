// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "stegano/error.hpp"
#include "stegano/textio.hpp"

namespace stegano {
namespace {

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '\'';
}

}  // namespace

std::vector<std::string> split_surface(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(to_lower(cur));
      cur.clear();
    }
  };
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u)) {
      flush();
    } else if (is_word_char(c)) {
      cur.push_back(c);
    } else {
      // Punctuation: emit as its own single-character token.
      flush();
      out.emplace_back(1, c);
    }
  }
  flush();
  return out;
}

std::string join_surface(const std::vector<std::string>& tokens) {
  return join(tokens, " ");
}

Tokenizer Tokenizer::build(TokenizerFamily family,
                           const std::vector<std::string>& corpus_texts,
                           std::size_t max_pieces) {
  // Token frequency over the corpus, with deterministic (sorted) iteration.
  std::map<std::string, std::size_t> freq;
  for (const std::string& text : corpus_texts) {
    for (std::string& tok : split_surface(text)) ++freq[std::move(tok)];
  }
  if (freq.empty()) raise(ErrorCode::kEmptyDataset, "tokenizer corpus is empty");

  Tokenizer t;
  t.family_ = family;
  t.vocab_ = {"<pad>", "<unk>"};

  if (family == TokenizerFamily::kWord) {
    for (const auto& [tok, n] : freq) t.vocab_.push_back(tok);
  } else {
    // Piece inventory: all observed characters, plus the most frequent word
    // substrings of length 2..6 weighted by word frequency. Each entry also
    // gets a continuation ("##") form so words re-join unambiguously.
    std::set<std::string> chars;
    std::map<std::string, std::size_t> subs;
    for (const auto& [tok, n] : freq) {
      for (char c : tok) chars.insert(std::string(1, c));
      if (tok.size() < 2 || !is_word_char(tok[0])) continue;
      for (std::size_t len = 2; len <= 6 && len <= tok.size(); ++len) {
        for (std::size_t i = 0; i + len <= tok.size(); ++i) {
          subs[tok.substr(i, len)] += n;
        }
      }
    }
    // Keep the top max_pieces substrings: count descending, spelling ascending.
    std::vector<std::pair<std::string, std::size_t>> ranked(subs.begin(),
                                                            subs.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (ranked.size() > max_pieces) ranked.resize(max_pieces);
    std::set<std::string> inventory(chars.begin(), chars.end());
    for (const auto& [s, n] : ranked) inventory.insert(s);
    for (const std::string& s : inventory) t.vocab_.push_back(s);
    for (const std::string& s : inventory) t.vocab_.push_back("##" + s);
  }
  t.finalize();
  return t;
}

void Tokenizer::finalize() {
  lookup_.clear();
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    lookup_.emplace(vocab_[i], static_cast<int>(i));
  }
  const char* tag = family_ == TokenizerFamily::kWord ? "word" : "piece";
  id_ = std::string(tag) + "-" + content_hash(join(vocab_, "\n"));
}

std::vector<int> Tokenizer::encode(std::string_view text) const {
  const std::vector<std::string> words = split_surface(text);
  if (words.empty()) raise(ErrorCode::kEmptyText, "no tokens after normalization");

  std::vector<int> ids;
  for (const std::string& w : words) {
    if (family_ == TokenizerFamily::kWord) {
      const auto it = lookup_.find(w);
      ids.push_back(it == lookup_.end() ? kUnkId : it->second);
      continue;
    }
    // Greedy longest-match pieces; continuation pieces carry the ## form.
    std::size_t pos = 0;
    bool first = true;
    while (pos < w.size()) {
      std::size_t best_len = 0;
      int best_id = kUnkId;
      const std::size_t max_len = std::min<std::size_t>(6, w.size() - pos);
      for (std::size_t len = max_len; len >= 1; --len) {
        std::string cand = w.substr(pos, len);
        if (!first) cand = "##" + cand;
        const auto it = lookup_.find(cand);
        if (it != lookup_.end()) {
          best_len = len;
          best_id = it->second;
          break;
        }
      }
      if (best_len == 0) {
        // Unknown character: the whole remaining word collapses to <unk>.
        ids.push_back(kUnkId);
        break;
      }
      ids.push_back(best_id);
      pos += best_len;
      first = false;
    }
  }
  return ids;
}

std::string Tokenizer::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    const std::string& tok = surface(id);
    const bool cont = is_continuation(id);
    if (!out.empty() && !cont) out.push_back(' ');
    out += cont ? tok.substr(2) : tok;
  }
  return out;
}

const std::string& Tokenizer::surface(int id) const {
  if (id < 0 || id >= vocab_size()) {
    raise(ErrorCode::kUnknownHandle,
          "token id " + std::to_string(id) + " outside vocabulary");
  }
  return vocab_[static_cast<std::size_t>(id)];
}

std::optional<int> Tokenizer::id_of(std::string_view token) const {
  const auto it = lookup_.find(std::string(token));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

bool Tokenizer::is_punctuation_id(int id) const {
  return !is_special(id) && is_punctuation(surface(id));
}

bool Tokenizer::is_continuation(int id) const {
  if (family_ == TokenizerFamily::kWord || is_special(id)) return false;
  const std::string& tok = surface(id);
  return tok.size() > 2 && tok[0] == '#' && tok[1] == '#';
}

void Tokenizer::save(const std::string& path) const {
  std::string body = family_ == TokenizerFamily::kWord ? "word\n" : "piece\n";
  body += join(vocab_, "\n");
  body.push_back('\n');
  write_file(path, body);
}

Tokenizer Tokenizer::load(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.size() < 3) {
    raise(ErrorCode::kIo, "tokenizer file truncated: " + path);
  }
  Tokenizer t;
  if (lines[0] == "word") {
    t.family_ = TokenizerFamily::kWord;
  } else if (lines[0] == "piece") {
    t.family_ = TokenizerFamily::kPiece;
  } else {
    raise(ErrorCode::kIo, "unknown tokenizer family tag: " + lines[0]);
  }
  t.vocab_.assign(lines.begin() + 1, lines.end());
  t.finalize();
  return t;
}

}  // namespace stegano
