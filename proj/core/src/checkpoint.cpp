// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/checkpoint.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "stegano/error.hpp"
#include "stegano/textio.hpp"

namespace stegano {
namespace {

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  const std::int64_t rows = m.rows();
  const std::int64_t cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double)) * m.size());
}

Eigen::MatrixXd read_matrix(std::ifstream& in, const std::string& dir) {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || rows < 0 || cols < 0) {
    raise(ErrorCode::kIo, "corrupt checkpoint parameters in " + dir);
  }
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double)) * m.size());
  if (!in) raise(ErrorCode::kIo, "truncated checkpoint parameters in " + dir);
  return m;
}

void write_vector_as_matrix(std::ofstream& out, const Eigen::VectorXd& v) {
  write_matrix(out, Eigen::MatrixXd(v));
}

Eigen::VectorXd read_vector(std::ifstream& in, const std::string& dir) {
  const Eigen::MatrixXd m = read_matrix(in, dir);
  if (m.cols() != 1) raise(ErrorCode::kIo, "expected a vector in " + dir);
  return m.col(0);
}

}  // namespace

void save_model(const ModelHandle& handle, const std::string& dir) {
  std::filesystem::create_directories(dir);
  handle.tokenizer().save(dir + "/tokenizer.txt");

  nlohmann::json meta;
  meta["role"] = handle.role() == ModelRole::kClassifier ? "classifier" : "mlm";
  meta["num_labels"] = handle.num_labels();
  meta["embedding_dim"] = handle.embedding_dim();
  meta["vocab_size"] = handle.vocab_size();
  meta["tokenizer_id"] = handle.tokenizer_id();
  if (handle.role() == ModelRole::kClassifier) {
    meta["hidden_dim"] = handle.hidden_dim();
  }
  write_file(dir + "/meta.json", meta.dump(2) + "\n");

  std::ofstream out(dir + "/params.bin", std::ios::binary);
  if (!out) raise(ErrorCode::kIo, "cannot write " + dir + "/params.bin");
  write_matrix(out, handle.embedding_table());
  if (handle.role() == ModelRole::kClassifier) {
    write_matrix(out, handle.hidden_w());
    write_vector_as_matrix(out, handle.hidden_b());
    write_matrix(out, handle.output_w());
    write_vector_as_matrix(out, handle.output_b());
  } else {
    write_matrix(out, handle.left_w());
    write_matrix(out, handle.right_w());
    write_vector_as_matrix(out, handle.context_b());
  }
}

ModelHandle load_model(const std::string& dir) {
  if (!checkpoint_exists(dir)) {
    raise(ErrorCode::kMissingFile, "no checkpoint at " + dir);
  }
  const auto meta = nlohmann::json::parse(read_file(dir + "/meta.json"));
  auto tokenizer = std::make_shared<Tokenizer>(Tokenizer::load(dir + "/tokenizer.txt"));

  std::ifstream in(dir + "/params.bin", std::ios::binary);
  if (!in) raise(ErrorCode::kIo, "cannot read " + dir + "/params.bin");
  auto table = std::make_shared<Eigen::MatrixXd>(read_matrix(in, dir));
  if (table->rows() != tokenizer->vocab_size()) {
    raise(ErrorCode::kIo, "checkpoint table does not match tokenizer in " + dir);
  }

  Rng dummy(0);
  if (meta.at("role").get<std::string>() == "classifier") {
    ModelHandle h = ModelHandle::new_classifier(
        tokenizer, table, meta.at("hidden_dim").get<int>(),
        meta.at("num_labels").get<int>(), dummy);
    h.mutable_hidden_w() = read_matrix(in, dir);
    h.mutable_hidden_b() = read_vector(in, dir);
    h.mutable_output_w() = read_matrix(in, dir);
    h.mutable_output_b() = read_vector(in, dir);
    return h;
  }
  ModelHandle h =
      ModelHandle::new_mlm(tokenizer, meta.at("embedding_dim").get<int>(), dummy);
  h.set_table(table);
  h.mutable_left_w() = read_matrix(in, dir);
  h.mutable_right_w() = read_matrix(in, dir);
  h.mutable_context_b() = read_vector(in, dir);
  return h;
}

bool checkpoint_exists(const std::string& dir) {
  namespace fs = std::filesystem;
  return fs::exists(dir + "/meta.json") && fs::exists(dir + "/params.bin") &&
         fs::exists(dir + "/tokenizer.txt");
}

}  // namespace stegano
