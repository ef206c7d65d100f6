// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace stegano {

// Word-level trigram language model with stupid backoff and add-one unigram
// smoothing. Deliberately independent of any victim tokenizer: it scores
// surface tokens, which is all the token-deletion defense needs.
class NgramLm {
 public:
  static NgramLm train(const std::vector<std::string>& texts);

  // Mean negative log probability per token (natural log).
  double mean_neg_logprob(const std::vector<std::string>& tokens) const;
  // exp(mean_neg_logprob): per-token perplexity.
  double perplexity(const std::vector<std::string>& tokens) const;

  std::size_t vocab_size() const { return unigram_.size(); }

 private:
  double word_prob(const std::string& w) const;
  double backoff_prob(const std::string& a, const std::string& b,
                      const std::string& w) const;

  std::unordered_map<std::string, double> unigram_;
  std::unordered_map<std::string, double> bigram_;     // "a b"
  std::unordered_map<std::string, double> trigram_;    // "a b c"
  std::unordered_map<std::string, double> bi_context_; // "a" totals
  std::unordered_map<std::string, double> tri_context_; // "a b" totals
  double total_tokens_ = 0.0;
};

}  // namespace stegano
