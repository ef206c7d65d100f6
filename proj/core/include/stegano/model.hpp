// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stegano/rng.hpp"
#include "stegano/tokenizer.hpp"

namespace stegano {

enum class ModelRole { kClassifier, kMlm };

// A token sequence lifted to continuous space: row j of `embeddings` is the
// representation of position j. When built from token ids, row j equals the
// embedding-table row of that id exactly; optimization may then move rows off
// the table. Mask value 0 marks a position as inert: it contributes nothing
// to pooling and receives a zero gradient row.
struct EmbeddingSequence {
  Eigen::MatrixXd embeddings;  // L x d
  Eigen::VectorXd mask;        // L entries in {0,1}
  std::vector<int> token_ids;  // length L; source ids (or latest projection)

  Eigen::Index length() const { return embeddings.rows(); }
  Eigen::Index dim() const { return embeddings.cols(); }
};

// Parameter gradients of the classifier head for one example.
struct HeadGradients {
  Eigen::MatrixXd hidden_w;   // H x d
  Eigen::VectorXd hidden_b;   // H
  Eigen::MatrixXd output_w;   // num_labels x H
  Eigen::VectorXd output_b;   // num_labels
};

// Uniform contract over the two desk-scale models.
//
// Classifier: a per-token tanh hidden layer (a_j = tanh(A e_j + b)), mean-pool
// of the unmasked activations, then a linear label head. Applying the
// nonlinearity before pooling keeps the input gradient position-dependent,
// which the saliency ranking needs; pooling embeddings first would give every
// position an identical gradient row.
// MLM: each position's hidden state is produced from its
// left and right neighbor embeddings (tanh of two linear maps), and its token
// logits are tied to the embedding table (logits_j = W h_j), so the table
// defines both the lookup and the output geometry.
//
// The embedding table is shared between handles via shared_ptr: cloning a
// handle or stepping its head never copies W. Handles that train W (the MLM
// during pretraining, or a classifier with train_embeddings set) detach onto
// a private copy first.
class ModelHandle {
 public:
  // Fresh classifier with small random head weights; W is adopted as-is.
  static ModelHandle new_classifier(std::shared_ptr<const Tokenizer> tokenizer,
                                    std::shared_ptr<const Eigen::MatrixXd> table,
                                    int hidden_dim, int num_labels, Rng& rng);
  // Fresh MLM with a random embedding table of the given dimension.
  static ModelHandle new_mlm(std::shared_ptr<const Tokenizer> tokenizer,
                             int embedding_dim, Rng& rng);

  ModelRole role() const { return role_; }
  int vocab_size() const { return static_cast<int>(table_->rows()); }
  int embedding_dim() const { return static_cast<int>(table_->cols()); }
  int num_labels() const { return num_labels_; }
  int hidden_dim() const { return static_cast<int>(hidden_w_.rows()); }
  const std::string& tokenizer_id() const { return tokenizer_->id_string(); }
  const Tokenizer& tokenizer() const { return *tokenizer_; }
  std::shared_ptr<const Tokenizer> tokenizer_ptr() const { return tokenizer_; }

  const Eigen::MatrixXd& embedding_table() const { return *table_; }
  std::shared_ptr<const Eigen::MatrixXd> embedding_table_ptr() const {
    return table_;
  }

  // --- Tokenization -------------------------------------------------------
  std::vector<int> tokenize(std::string_view text) const;
  std::string detokenize(const std::vector<int>& ids) const;
  // Sequence from ids: rows copied from W, mask all ones.
  EmbeddingSequence embed(const std::vector<int>& ids) const;

  // --- Forward / gradients ------------------------------------------------
  // Classifier: 1 x num_labels. MLM: L x V (one logit row per position).
  Eigen::MatrixXd forward_from_embeddings(const EmbeddingSequence& seq) const;

  // Classifier cross-entropy (natural log) toward `target`.
  double loss(const EmbeddingSequence& seq, int target) const;

  // d loss / d embeddings for the classifier; masked rows are zero.
  Eigen::MatrixXd grad_wrt_embeddings(const EmbeddingSequence& seq,
                                      int target) const;

  // Head-parameter gradients of the classifier loss on one example.
  HeadGradients head_gradients(const EmbeddingSequence& seq, int target) const;

  // Hidden activation of the classifier (the penultimate layer).
  Eigen::VectorXd penultimate(const EmbeddingSequence& seq) const;

  // Mean MLM cross-entropy against per-position `targets` over unmasked
  // positions, plus its gradient with respect to the input embeddings.
  // `targets` must have seq.length() entries.
  double mlm_loss(const EmbeddingSequence& seq,
                  const std::vector<int>& targets) const;
  Eigen::MatrixXd mlm_grad_wrt_embeddings(const EmbeddingSequence& seq,
                                          const std::vector<int>& targets) const;

  // One gradient step on all parameters receiving gradient from this loss
  // (with a continuous-embedding input, the table receives none), returning
  // an independent copy; *this is untouched.
  ModelHandle clone_and_step(const EmbeddingSequence& seq, int target,
                             double eta_inner) const;

  // argmax over vocabulary of E(x) W^T per row; ties go to the smaller id.
  std::vector<int> nearest_vocab_projection(const EmbeddingSequence& seq) const;

  // FNV-1a over all parameter bytes (table included).
  std::uint64_t param_checksum() const;

  // --- Training access (used by the fine-tuning loops) --------------------
  Eigen::MatrixXd& mutable_hidden_w() { return hidden_w_; }
  Eigen::VectorXd& mutable_hidden_b() { return hidden_b_; }
  Eigen::MatrixXd& mutable_output_w() { return output_w_; }
  Eigen::VectorXd& mutable_output_b() { return output_b_; }
  Eigen::MatrixXd& mutable_left_w() { return left_w_; }
  Eigen::MatrixXd& mutable_right_w() { return right_w_; }
  Eigen::VectorXd& mutable_context_b() { return context_b_; }
  // Detaches onto a private table copy and returns it for in-place training.
  Eigen::MatrixXd& detach_table();
  void set_table(std::shared_ptr<const Eigen::MatrixXd> table);

  // MLM internals needed by pretraining.
  const Eigen::MatrixXd& left_w() const { return left_w_; }
  const Eigen::MatrixXd& right_w() const { return right_w_; }
  const Eigen::VectorXd& context_b() const { return context_b_; }
  const Eigen::MatrixXd& hidden_w() const { return hidden_w_; }
  const Eigen::VectorXd& hidden_b() const { return hidden_b_; }
  const Eigen::MatrixXd& output_w() const { return output_w_; }
  const Eigen::VectorXd& output_b() const { return output_b_; }

 private:
  ModelHandle() = default;
  void require_role(ModelRole role, const char* op) const;
  // Hidden states of the MLM for every position (L x d).
  Eigen::MatrixXd mlm_hidden(const EmbeddingSequence& seq) const;
  Eigen::VectorXd pooled_activation(const EmbeddingSequence& seq) const;

  ModelRole role_ = ModelRole::kClassifier;
  std::shared_ptr<const Tokenizer> tokenizer_;
  std::shared_ptr<const Eigen::MatrixXd> table_;  // V x d
  int num_labels_ = 0;

  // Classifier head.
  Eigen::MatrixXd hidden_w_;  // H x d
  Eigen::VectorXd hidden_b_;  // H
  Eigen::MatrixXd output_w_;  // num_labels x H
  Eigen::VectorXd output_b_;  // num_labels

  // MLM context encoder (output layer is tied to the table).
  Eigen::MatrixXd left_w_;    // d x d
  Eigen::MatrixXd right_w_;   // d x d
  Eigen::VectorXd context_b_; // d
};

// Stable softmax over a vector of logits.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
// Stable -log softmax(logits)[target].
double cross_entropy(const Eigen::VectorXd& logits, int target);

}  // namespace stegano
