// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/ngram_lm.hpp"

#include <cmath>

#include "stegano/tokenizer.hpp"

namespace stegano {
namespace {

constexpr const char* kBos = "<s>";
constexpr double kBackoff = 0.4;

}  // namespace

NgramLm NgramLm::train(const std::vector<std::string>& texts) {
  NgramLm lm;
  for (const auto& text : texts) {
    std::vector<std::string> tokens = split_surface(text);
    if (tokens.empty()) continue;
    std::string a = kBos;
    std::string b = kBos;
    for (const auto& w : tokens) {
      lm.unigram_[w] += 1.0;
      lm.total_tokens_ += 1.0;
      lm.bigram_[b + " " + w] += 1.0;
      lm.bi_context_[b] += 1.0;
      lm.trigram_[a + " " + b + " " + w] += 1.0;
      lm.tri_context_[a + " " + b] += 1.0;
      a = b;
      b = w;
    }
  }
  return lm;
}

double NgramLm::word_prob(const std::string& w) const {
  auto it = unigram_.find(w);
  const double count = it == unigram_.end() ? 0.0 : it->second;
  // Add-one smoothing so out-of-vocabulary words keep finite probability.
  return (count + 1.0) /
         (total_tokens_ + static_cast<double>(unigram_.size()) + 1.0);
}

double NgramLm::backoff_prob(const std::string& a, const std::string& b,
                             const std::string& w) const {
  auto tri = trigram_.find(a + " " + b + " " + w);
  if (tri != trigram_.end()) {
    return tri->second / tri_context_.at(a + " " + b);
  }
  auto bi = bigram_.find(b + " " + w);
  if (bi != bigram_.end()) {
    return kBackoff * bi->second / bi_context_.at(b);
  }
  return kBackoff * kBackoff * word_prob(w);
}

double NgramLm::mean_neg_logprob(const std::vector<std::string>& tokens) const {
  if (tokens.empty()) return 0.0;
  std::string a = kBos;
  std::string b = kBos;
  double total = 0.0;
  for (const auto& w : tokens) {
    total -= std::log(backoff_prob(a, b, w));
    a = b;
    b = w;
  }
  return total / static_cast<double>(tokens.size());
}

double NgramLm::perplexity(const std::vector<std::string>& tokens) const {
  return std::exp(mean_neg_logprob(tokens));
}

}  // namespace stegano
