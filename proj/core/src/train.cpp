// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stegano/error.hpp"

namespace stegano {
namespace {

// Minimal Adam state for one parameter tensor.
template <typename T>
struct AdamSlot {
  T m, v;
  bool ready = false;

  void apply(T& param, const T& grad, double lr, int step) {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    if (!ready) {
      m = T::Zero(param.rows(), param.cols());
      v = T::Zero(param.rows(), param.cols());
      ready = true;
    }
    m = kBeta1 * m + (1.0 - kBeta1) * grad;
    v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(kBeta1, step);
    const double c2 = 1.0 - std::pow(kBeta2, step);
    param.array() -=
        lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
  }
};

int effective_batch_size(int configured, std::size_t n) {
  if (configured <= 0) return 1;
  if (static_cast<std::size_t>(configured) <= n) return configured;
  return std::max<int>(1, static_cast<int>(n / 4));
}

}  // namespace

int predict(const ModelHandle& model, const std::string& text) {
  const EmbeddingSequence seq = model.embed(model.tokenize(text));
  const Eigen::MatrixXd logits = model.forward_from_embeddings(seq);
  Eigen::Index best = 0;
  logits.row(0).maxCoeff(&best);
  return static_cast<int>(best);
}

double accuracy(const ModelHandle& model,
                const std::vector<LabeledExample>& examples) {
  if (examples.empty()) raise(ErrorCode::kEmptySplit, "accuracy over no rows");
  std::size_t hits = 0;
  for (const LabeledExample& e : examples) {
    if (predict(model, e.text) == e.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

TrainReport fine_tune_classifier(ModelHandle& model,
                                 const std::vector<LabeledExample>& train,
                                 const std::vector<LabeledExample>& validation,
                                 const TrainConfig& cfg) {
  if (train.empty()) raise(ErrorCode::kEmptyDataset, "no training examples");

  // Tokenize once.
  std::vector<std::vector<int>> ids;
  ids.reserve(train.size());
  for (const LabeledExample& e : train) ids.push_back(model.tokenize(e.text));

  Eigen::MatrixXd* table = nullptr;
  if (cfg.train_embeddings) table = &model.detach_table();

  TrainReport report;
  report.effective_batch = effective_batch_size(cfg.batch_size, train.size());

  AdamSlot<Eigen::MatrixXd> s_hw, s_ow, s_table;
  AdamSlot<Eigen::VectorXd> s_hb, s_ob;
  int adam_step = 0;

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  double best_val = -1.0;
  int stale = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t seen = 0;

    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(report.effective_batch)) {
      const std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(report.effective_batch));
      const double bn = static_cast<double>(stop - start);

      HeadGradients acc;
      acc.hidden_w = Eigen::MatrixXd::Zero(model.hidden_dim(), model.embedding_dim());
      acc.hidden_b = Eigen::VectorXd::Zero(model.hidden_dim());
      acc.output_w = Eigen::MatrixXd::Zero(model.num_labels(), model.hidden_dim());
      acc.output_b = Eigen::VectorXd::Zero(model.num_labels());
      Eigen::MatrixXd table_grad;
      if (table) {
        table_grad = Eigen::MatrixXd::Zero(table->rows(), table->cols());
      }

      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        const EmbeddingSequence seq = model.embed(ids[i]);
        epoch_loss += model.loss(seq, train[i].label);
        ++seen;
        const HeadGradients g = model.head_gradients(seq, train[i].label);
        acc.hidden_w += g.hidden_w / bn;
        acc.hidden_b += g.hidden_b / bn;
        acc.output_w += g.output_w / bn;
        acc.output_b += g.output_b / bn;
        if (table) {
          const Eigen::MatrixXd eg =
              model.grad_wrt_embeddings(seq, train[i].label);
          for (Eigen::Index j = 0; j < eg.rows(); ++j) {
            table_grad.row(ids[i][static_cast<std::size_t>(j)]) +=
                eg.row(j) / bn;
          }
        }
      }

      ++adam_step;
      s_hw.apply(model.mutable_hidden_w(), acc.hidden_w, cfg.learning_rate,
                 adam_step);
      s_hb.apply(model.mutable_hidden_b(), acc.hidden_b, cfg.learning_rate,
                 adam_step);
      s_ow.apply(model.mutable_output_w(), acc.output_w, cfg.learning_rate,
                 adam_step);
      s_ob.apply(model.mutable_output_b(), acc.output_b, cfg.learning_rate,
                 adam_step);
      if (table) {
        s_table.apply(*table, table_grad, cfg.learning_rate, adam_step);
      }
    }

    report.final_train_loss = epoch_loss / static_cast<double>(seen);
    if (!std::isfinite(report.final_train_loss)) {
      raise(ErrorCode::kDivergence, "training loss became non-finite");
    }
    report.epochs_run = epoch;

    // Early stopping halts at the plateau but keeps the current weights:
    // rare training patterns keep consolidating for `patience` epochs after
    // the headline metric stops moving.
    const double val =
        validation.empty() ? -report.final_train_loss : accuracy(model, validation);
    if (val > best_val) {
      best_val = val;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }

  report.validation_accuracy =
      validation.empty() ? 0.0 : accuracy(model, validation);
  return report;
}

TrainReport pretrain_mlm(ModelHandle& mlm, const std::vector<std::string>& texts,
                         const MlmTrainConfig& cfg) {
  if (texts.empty()) raise(ErrorCode::kEmptyDataset, "no pretraining texts");

  std::vector<std::vector<int>> ids;
  ids.reserve(texts.size());
  for (const std::string& t : texts) ids.push_back(mlm.tokenize(t));

  Eigen::MatrixXd& table = mlm.detach_table();
  const Eigen::Index d = table.cols();

  AdamSlot<Eigen::MatrixXd> s_left, s_right, s_table;
  AdamSlot<Eigen::VectorXd> s_cb;
  int adam_step = 0;

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);

  TrainReport report;
  report.effective_batch = effective_batch_size(cfg.batch_size, ids.size());

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t seen = 0;

    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(report.effective_batch)) {
      const std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(report.effective_batch));
      const double bn = static_cast<double>(stop - start);

      Eigen::MatrixXd g_left = Eigen::MatrixXd::Zero(d, d);
      Eigen::MatrixXd g_right = Eigen::MatrixXd::Zero(d, d);
      Eigen::VectorXd g_cb = Eigen::VectorXd::Zero(d);
      Eigen::MatrixXd g_table = Eigen::MatrixXd::Zero(table.rows(), d);

      for (std::size_t k = start; k < stop; ++k) {
        const std::vector<int>& seq_ids = ids[order[k]];
        const auto L = static_cast<Eigen::Index>(seq_ids.size());
        Eigen::MatrixXd E(L, d);
        for (Eigen::Index j = 0; j < L; ++j) {
          E.row(j) = table.row(seq_ids[static_cast<std::size_t>(j)]);
        }
        const double inv = 1.0 / (bn * static_cast<double>(L));

        for (Eigen::Index j = 0; j < L; ++j) {
          Eigen::VectorXd z = mlm.context_b();
          if (j > 0) z += mlm.left_w() * E.row(j - 1).transpose();
          if (j + 1 < L) z += mlm.right_w() * E.row(j + 1).transpose();
          const Eigen::VectorXd h = z.array().tanh();
          const Eigen::VectorXd logits = table * h;
          const int target = seq_ids[static_cast<std::size_t>(j)];
          epoch_loss += cross_entropy(logits, target);

          Eigen::VectorXd dlogits = softmax(logits);
          dlogits(target) -= 1.0;
          dlogits *= inv;
          // Tied output layer: the table is also the softmax projection.
          g_table += dlogits * h.transpose();
          const Eigen::VectorXd dh = table.transpose() * dlogits;
          const Eigen::VectorXd dz =
              dh.array() * (1.0 - h.array().square());
          g_cb += dz;
          if (j > 0) {
            g_left += dz * E.row(j - 1);
            g_table.row(seq_ids[static_cast<std::size_t>(j - 1)]) +=
                (mlm.left_w().transpose() * dz).transpose();
          }
          if (j + 1 < L) {
            g_right += dz * E.row(j + 1);
            g_table.row(seq_ids[static_cast<std::size_t>(j + 1)]) +=
                (mlm.right_w().transpose() * dz).transpose();
          }
          ++seen;
        }
      }

      ++adam_step;
      s_left.apply(mlm.mutable_left_w(), g_left, cfg.learning_rate, adam_step);
      s_right.apply(mlm.mutable_right_w(), g_right, cfg.learning_rate, adam_step);
      s_cb.apply(mlm.mutable_context_b(), g_cb, cfg.learning_rate, adam_step);
      s_table.apply(table, g_table, cfg.learning_rate, adam_step);
    }

    report.final_train_loss = epoch_loss / static_cast<double>(seen);
    if (!std::isfinite(report.final_train_loss)) {
      raise(ErrorCode::kDivergence, "mlm pretraining loss became non-finite");
    }
    report.epochs_run = epoch;
  }
  return report;
}

double median_mlm_loss(const ModelHandle& mlm,
                       const std::vector<std::string>& texts) {
  if (texts.empty()) raise(ErrorCode::kEmptyDataset, "no texts for mlm median");
  std::vector<double> losses;
  losses.reserve(texts.size());
  for (const std::string& t : texts) {
    const std::vector<int> ids = mlm.tokenize(t);
    losses.push_back(mlm.mlm_loss(mlm.embed(ids), ids));
  }
  std::sort(losses.begin(), losses.end());
  const std::size_t n = losses.size();
  return n % 2 == 1 ? losses[n / 2]
                    : 0.5 * (losses[n / 2 - 1] + losses[n / 2]);
}

}  // namespace stegano
