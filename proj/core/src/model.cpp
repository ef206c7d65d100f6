// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/model.hpp"

#include <cmath>
#include <random>

#include "stegano/error.hpp"

namespace stegano {
namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, double scale,
                              Rng& rng) {
  std::normal_distribution<double> dist(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

double logsumexp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

void hash_bytes(const void* data, std::size_t n, std::uint64_t& h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

void hash_matrix(const Eigen::MatrixXd& m, std::uint64_t& h) {
  hash_bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()), h);
}

}  // namespace

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

double cross_entropy(const Eigen::VectorXd& logits, int target) {
  if (target < 0 || target >= logits.size()) {
    raise(ErrorCode::kUnknownLabel,
          "cross-entropy target " + std::to_string(target) + " out of range");
  }
  const double ce = logsumexp(logits) - logits(target);
  if (!std::isfinite(ce)) {
    raise(ErrorCode::kNonFiniteLoss, "cross-entropy is not finite");
  }
  return ce;
}

ModelHandle ModelHandle::new_classifier(
    std::shared_ptr<const Tokenizer> tokenizer,
    std::shared_ptr<const Eigen::MatrixXd> table, int hidden_dim,
    int num_labels, Rng& rng) {
  if (!tokenizer || !table) {
    raise(ErrorCode::kUnknownHandle, "classifier needs a tokenizer and a table");
  }
  if (table->rows() != tokenizer->vocab_size()) {
    raise(ErrorCode::kDimensionMismatch,
          "embedding table rows do not match tokenizer vocabulary");
  }
  ModelHandle h;
  h.role_ = ModelRole::kClassifier;
  h.tokenizer_ = std::move(tokenizer);
  h.table_ = std::move(table);
  h.num_labels_ = num_labels;
  const Eigen::Index d = h.table_->cols();
  h.hidden_w_ = random_matrix(hidden_dim, d, 1.0 / std::sqrt(double(d)), rng);
  h.hidden_b_ = Eigen::VectorXd::Zero(hidden_dim);
  h.output_w_ =
      random_matrix(num_labels, hidden_dim, 1.0 / std::sqrt(double(hidden_dim)), rng);
  h.output_b_ = Eigen::VectorXd::Zero(num_labels);
  return h;
}

ModelHandle ModelHandle::new_mlm(std::shared_ptr<const Tokenizer> tokenizer,
                                 int embedding_dim, Rng& rng) {
  if (!tokenizer) raise(ErrorCode::kUnknownHandle, "mlm needs a tokenizer");
  ModelHandle h;
  h.role_ = ModelRole::kMlm;
  h.tokenizer_ = std::move(tokenizer);
  const Eigen::Index v = h.tokenizer_->vocab_size();
  h.table_ = std::make_shared<Eigen::MatrixXd>(
      random_matrix(v, embedding_dim, 0.1, rng));
  h.num_labels_ = 0;
  const double s = 1.0 / std::sqrt(double(embedding_dim));
  h.left_w_ = random_matrix(embedding_dim, embedding_dim, s, rng);
  h.right_w_ = random_matrix(embedding_dim, embedding_dim, s, rng);
  h.context_b_ = Eigen::VectorXd::Zero(embedding_dim);
  return h;
}

void ModelHandle::require_role(ModelRole role, const char* op) const {
  if (role_ != role) {
    raise(ErrorCode::kRoleMismatch,
          std::string(op) + " requires the " +
              (role == ModelRole::kClassifier ? "classifier" : "mlm") +
              " role");
  }
}

std::vector<int> ModelHandle::tokenize(std::string_view text) const {
  return tokenizer_->encode(text);
}

std::string ModelHandle::detokenize(const std::vector<int>& ids) const {
  return tokenizer_->decode(ids);
}

EmbeddingSequence ModelHandle::embed(const std::vector<int>& ids) const {
  if (ids.empty()) raise(ErrorCode::kEmptyText, "cannot embed an empty sequence");
  EmbeddingSequence seq;
  seq.embeddings.resize(static_cast<Eigen::Index>(ids.size()), table_->cols());
  seq.mask = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(ids.size()));
  seq.token_ids = ids;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (ids[j] < 0 || ids[j] >= vocab_size()) {
      raise(ErrorCode::kUnknownHandle,
            "token id " + std::to_string(ids[j]) + " outside vocabulary");
    }
    seq.embeddings.row(static_cast<Eigen::Index>(j)) = table_->row(ids[j]);
  }
  return seq;
}

Eigen::MatrixXd ModelHandle::mlm_hidden(const EmbeddingSequence& seq) const {
  const Eigen::Index L = seq.length();
  const Eigen::Index d = seq.dim();
  Eigen::MatrixXd hidden(L, d);
  for (Eigen::Index j = 0; j < L; ++j) {
    Eigen::VectorXd z = context_b_;
    if (j > 0 && seq.mask(j - 1) != 0.0) {
      z += left_w_ * seq.embeddings.row(j - 1).transpose();
    }
    if (j + 1 < L && seq.mask(j + 1) != 0.0) {
      z += right_w_ * seq.embeddings.row(j + 1).transpose();
    }
    hidden.row(j) = z.array().tanh().matrix().transpose();
  }
  return hidden;
}

Eigen::MatrixXd ModelHandle::forward_from_embeddings(
    const EmbeddingSequence& seq) const {
  if (seq.dim() != embedding_dim()) {
    raise(ErrorCode::kDimensionMismatch,
          "sequence dim " + std::to_string(seq.dim()) + " vs model dim " +
              std::to_string(embedding_dim()));
  }
  if (role_ == ModelRole::kMlm) {
    return mlm_hidden(seq) * table_->transpose();  // L x V
  }
  const Eigen::VectorXd logits = output_w_ * pooled_activation(seq) + output_b_;
  return logits.transpose();  // 1 x num_labels
}

// Mean over unmasked positions of a_j = tanh(hidden_w e_j + hidden_b).
Eigen::VectorXd ModelHandle::pooled_activation(
    const EmbeddingSequence& seq) const {
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(hidden_w_.rows());
  const double total = seq.mask.sum();
  if (total == 0) return pooled;
  for (Eigen::Index j = 0; j < seq.length(); ++j) {
    if (seq.mask(j) == 0.0) continue;
    pooled += seq.mask(j) *
              (hidden_w_ * seq.embeddings.row(j).transpose() + hidden_b_)
                  .array()
                  .tanh()
                  .matrix();
  }
  return pooled / total;
}

double ModelHandle::loss(const EmbeddingSequence& seq, int target) const {
  require_role(ModelRole::kClassifier, "loss");
  if (seq.mask.sum() == 0) {
    raise(ErrorCode::kAllMaskedSequence, "loss over an all-masked sequence");
  }
  const Eigen::MatrixXd logits = forward_from_embeddings(seq);
  return cross_entropy(logits.row(0).transpose(), target);
}

Eigen::MatrixXd ModelHandle::grad_wrt_embeddings(const EmbeddingSequence& seq,
                                                 int target) const {
  require_role(ModelRole::kClassifier, "grad_wrt_embeddings");
  const double total = seq.mask.sum();
  if (total == 0) {
    raise(ErrorCode::kAllMaskedSequence, "gradient over an all-masked sequence");
  }
  const Eigen::VectorXd logits = output_w_ * pooled_activation(seq) + output_b_;
  Eigen::VectorXd dlogits = softmax(logits);
  dlogits(target) -= 1.0;
  const Eigen::VectorXd dpooled = output_w_.transpose() * dlogits;
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(seq.length(), seq.dim());
  for (Eigen::Index j = 0; j < seq.length(); ++j) {
    if (seq.mask(j) == 0.0) continue;
    const Eigen::ArrayXd a =
        (hidden_w_ * seq.embeddings.row(j).transpose() + hidden_b_)
            .array()
            .tanh();
    const Eigen::VectorXd dz =
        (dpooled.array() * (1.0 - a.square())).matrix() * (seq.mask(j) / total);
    grad.row(j) = (hidden_w_.transpose() * dz).transpose();
  }
  return grad;
}

HeadGradients ModelHandle::head_gradients(const EmbeddingSequence& seq,
                                          int target) const {
  require_role(ModelRole::kClassifier, "head_gradients");
  const double total = seq.mask.sum();
  if (total == 0) {
    raise(ErrorCode::kAllMaskedSequence, "gradient over an all-masked sequence");
  }
  const Eigen::VectorXd abar = pooled_activation(seq);
  const Eigen::VectorXd logits = output_w_ * abar + output_b_;
  Eigen::VectorXd dlogits = softmax(logits);
  dlogits(target) -= 1.0;
  const Eigen::VectorXd dpooled = output_w_.transpose() * dlogits;
  HeadGradients g;
  g.output_w = dlogits * abar.transpose();
  g.output_b = dlogits;
  g.hidden_w = Eigen::MatrixXd::Zero(hidden_w_.rows(), hidden_w_.cols());
  g.hidden_b = Eigen::VectorXd::Zero(hidden_b_.size());
  for (Eigen::Index j = 0; j < seq.length(); ++j) {
    if (seq.mask(j) == 0.0) continue;
    const Eigen::ArrayXd a =
        (hidden_w_ * seq.embeddings.row(j).transpose() + hidden_b_)
            .array()
            .tanh();
    const Eigen::VectorXd dz =
        (dpooled.array() * (1.0 - a.square())).matrix() * (seq.mask(j) / total);
    g.hidden_w += dz * seq.embeddings.row(j);
    g.hidden_b += dz;
  }
  return g;
}

Eigen::VectorXd ModelHandle::penultimate(const EmbeddingSequence& seq) const {
  require_role(ModelRole::kClassifier, "penultimate");
  return pooled_activation(seq);
}

double ModelHandle::mlm_loss(const EmbeddingSequence& seq,
                             const std::vector<int>& targets) const {
  require_role(ModelRole::kMlm, "mlm_loss");
  if (static_cast<Eigen::Index>(targets.size()) != seq.length()) {
    raise(ErrorCode::kDimensionMismatch, "mlm targets length mismatch");
  }
  if (seq.mask.sum() == 0) {
    raise(ErrorCode::kAllMaskedSequence, "mlm loss over an all-masked sequence");
  }
  const Eigen::MatrixXd hidden = mlm_hidden(seq);
  double total = 0.0;
  double count = 0.0;
  for (Eigen::Index j = 0; j < seq.length(); ++j) {
    if (seq.mask(j) == 0.0) continue;
    const Eigen::VectorXd logits = *table_ * hidden.row(j).transpose();
    total += cross_entropy(logits, targets[static_cast<std::size_t>(j)]);
    count += 1.0;
  }
  return total / count;
}

Eigen::MatrixXd ModelHandle::mlm_grad_wrt_embeddings(
    const EmbeddingSequence& seq, const std::vector<int>& targets) const {
  require_role(ModelRole::kMlm, "mlm_grad_wrt_embeddings");
  if (static_cast<Eigen::Index>(targets.size()) != seq.length()) {
    raise(ErrorCode::kDimensionMismatch, "mlm targets length mismatch");
  }
  const double count = seq.mask.sum();
  if (count == 0) {
    raise(ErrorCode::kAllMaskedSequence, "mlm grad over an all-masked sequence");
  }
  const Eigen::Index L = seq.length();
  const Eigen::MatrixXd hidden = mlm_hidden(seq);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(L, seq.dim());
  for (Eigen::Index j = 0; j < L; ++j) {
    if (seq.mask(j) == 0.0) continue;
    const Eigen::VectorXd logits = *table_ * hidden.row(j).transpose();
    Eigen::VectorXd dlogits = softmax(logits);
    dlogits(targets[static_cast<std::size_t>(j)]) -= 1.0;
    dlogits /= count;
    const Eigen::VectorXd dh = table_->transpose() * dlogits;
    const Eigen::VectorXd dz =
        dh.array() * (1.0 - hidden.row(j).transpose().array().square());
    if (j > 0 && seq.mask(j - 1) != 0.0) {
      grad.row(j - 1) += (left_w_.transpose() * dz).transpose();
    }
    if (j + 1 < L && seq.mask(j + 1) != 0.0) {
      grad.row(j + 1) += (right_w_.transpose() * dz).transpose();
    }
  }
  // Masked positions contribute no gradient and receive none.
  for (Eigen::Index j = 0; j < L; ++j) {
    if (seq.mask(j) == 0.0) grad.row(j).setZero();
  }
  return grad;
}

ModelHandle ModelHandle::clone_and_step(const EmbeddingSequence& seq,
                                        int target, double eta_inner) const {
  require_role(ModelRole::kClassifier, "clone_and_step");
  ModelHandle out = *this;  // table shared, head copied by value
  const HeadGradients g = head_gradients(seq, target);
  out.hidden_w_ -= eta_inner * g.hidden_w;
  out.hidden_b_ -= eta_inner * g.hidden_b;
  out.output_w_ -= eta_inner * g.output_w;
  out.output_b_ -= eta_inner * g.output_b;
  return out;
}

std::vector<int> ModelHandle::nearest_vocab_projection(
    const EmbeddingSequence& seq) const {
  if (seq.dim() != embedding_dim()) {
    raise(ErrorCode::kDimensionMismatch, "projection dim mismatch");
  }
  const Eigen::MatrixXd scores = seq.embeddings * table_->transpose();  // L x V
  std::vector<int> ids(static_cast<std::size_t>(seq.length()));
  for (Eigen::Index j = 0; j < seq.length(); ++j) {
    int best = 0;
    double best_score = scores(j, 0);
    for (Eigen::Index v = 1; v < scores.cols(); ++v) {
      if (scores(j, v) > best_score) {  // strict: ties keep the smaller id
        best_score = scores(j, v);
        best = static_cast<int>(v);
      }
    }
    ids[static_cast<std::size_t>(j)] = best;
  }
  return ids;
}

std::uint64_t ModelHandle::param_checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  hash_matrix(*table_, h);
  const auto hash_vec = [&h](const Eigen::VectorXd& v) {
    hash_bytes(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()), h);
  };
  if (role_ == ModelRole::kClassifier) {
    hash_matrix(hidden_w_, h);
    hash_vec(hidden_b_);
    hash_matrix(output_w_, h);
    hash_vec(output_b_);
  } else {
    hash_matrix(left_w_, h);
    hash_matrix(right_w_, h);
    hash_vec(context_b_);
  }
  return h;
}

Eigen::MatrixXd& ModelHandle::detach_table() {
  auto owned = std::make_shared<Eigen::MatrixXd>(*table_);
  table_ = owned;
  // Safe: we hold the only mutable reference, created this instant.
  return const_cast<Eigen::MatrixXd&>(*table_);
}

void ModelHandle::set_table(std::shared_ptr<const Eigen::MatrixXd> table) {
  if (!table || table->rows() != tokenizer_->vocab_size()) {
    raise(ErrorCode::kDimensionMismatch, "replacement table shape mismatch");
  }
  table_ = std::move(table);
}

}  // namespace stegano
