// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/experiment.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "stegano/error.hpp"
#include "stegano/textio.hpp"

namespace stegano {
namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& path, const std::string& rule) {
  raise(ErrorCode::kConfigValidation, path + ": " + rule);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad_field(path.empty() ? "(root)" : path, "must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (allowed.count(key) == 0) {
      raise(ErrorCode::kConfigValidation,
            "unknown field: " + (path.empty() ? key : path + "." + key));
    }
  }
}

double get_number(const json& obj, const std::string& path, const std::string& key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad_field(path + "." + key, "must be a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& path,
                         const std::string& key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad_field(path + "." + key, "must be an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) bad_field(path + "." + key, "must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path,
                       const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) bad_field(path + "." + key, "must be a string");
  return v.get<std::string>();
}

std::size_t as_size(std::int64_t value, const std::string& path) {
  if (value < 0) bad_field(path, "must be non-negative");
  return static_cast<std::size_t>(value);
}

std::string filter_mode_name(FilterMode mode) {
  switch (mode) {
    case FilterMode::kAll: return "all";
    case FilterMode::kEmbeddingOnly: return "embedding_only";
    case FilterMode::kNone: return "none";
  }
  return "all";
}

FilterMode parse_filter_mode(const std::string& name, const std::string& path) {
  if (name == "all") return FilterMode::kAll;
  if (name == "embedding_only") return FilterMode::kEmbeddingOnly;
  if (name == "none") return FilterMode::kNone;
  bad_field(path, "must be one of all|embedding_only|none");
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    raise(ErrorCode::kConfigValidation, std::string("invalid JSON: ") + e.what());
  }
  check_keys(root, "",
             {"research_acknowledgment", "out_dir", "data", "trigger", "model",
              "pretrain", "fine_tune", "attack", "defense", "sweep"});

  ExperimentConfig cfg;
  cfg.research_acknowledgment =
      get_bool(root, "", "research_acknowledgment", cfg.research_acknowledgment);
  cfg.out_dir = get_string(root, "", "out_dir", cfg.out_dir);

  if (root.contains("data")) {
    const json& obj = root.at("data");
    check_keys(obj, "data",
               {"seed", "train_rows", "dev_rows", "dev_negative", "calib_rows"});
    cfg.data.seed = static_cast<std::uint64_t>(
        get_integer(obj, "data", "seed", static_cast<std::int64_t>(cfg.data.seed)));
    cfg.data.train_rows = as_size(
        get_integer(obj, "data", "train_rows",
                    static_cast<std::int64_t>(cfg.data.train_rows)),
        "data.train_rows");
    cfg.data.dev_rows = as_size(
        get_integer(obj, "data", "dev_rows",
                    static_cast<std::int64_t>(cfg.data.dev_rows)),
        "data.dev_rows");
    cfg.data.dev_negative = as_size(
        get_integer(obj, "data", "dev_negative",
                    static_cast<std::int64_t>(cfg.data.dev_negative)),
        "data.dev_negative");
    cfg.data.calib_rows = as_size(
        get_integer(obj, "data", "calib_rows",
                    static_cast<std::int64_t>(cfg.data.calib_rows)),
        "data.calib_rows");
  }

  if (root.contains("trigger")) {
    const json& obj = root.at("trigger");
    check_keys(obj, "trigger", {"phrase", "y_target"});
    cfg.trigger_phrase = get_string(obj, "trigger", "phrase", cfg.trigger_phrase);
    cfg.y_target = static_cast<int>(
        get_integer(obj, "trigger", "y_target", cfg.y_target));
  }

  if (root.contains("model")) {
    const json& obj = root.at("model");
    check_keys(obj, "model", {"embedding_dim", "hidden_dim", "families"});
    cfg.embedding_dim = static_cast<int>(
        get_integer(obj, "model", "embedding_dim", cfg.embedding_dim));
    cfg.hidden_dim = static_cast<int>(
        get_integer(obj, "model", "hidden_dim", cfg.hidden_dim));
    if (obj.contains("families")) {
      const json& fams = obj.at("families");
      if (!fams.is_array()) bad_field("model.families", "must be an array");
      cfg.families.clear();
      for (const auto& f : fams) {
        if (!f.is_string()) bad_field("model.families", "must contain strings");
        cfg.families.push_back(f.get<std::string>());
      }
    }
  }

  if (root.contains("pretrain")) {
    const json& obj = root.at("pretrain");
    check_keys(obj, "pretrain", {"learning_rate", "batch_size", "max_epochs", "seed"});
    cfg.pretrain.learning_rate =
        get_number(obj, "pretrain", "learning_rate", cfg.pretrain.learning_rate);
    cfg.pretrain.batch_size = as_size(
        get_integer(obj, "pretrain", "batch_size",
                    static_cast<std::int64_t>(cfg.pretrain.batch_size)),
        "pretrain.batch_size");
    cfg.pretrain.max_epochs = as_size(
        get_integer(obj, "pretrain", "max_epochs",
                    static_cast<std::int64_t>(cfg.pretrain.max_epochs)),
        "pretrain.max_epochs");
    cfg.pretrain.seed = static_cast<std::uint64_t>(get_integer(
        obj, "pretrain", "seed", static_cast<std::int64_t>(cfg.pretrain.seed)));
  }

  if (root.contains("fine_tune")) {
    const json& obj = root.at("fine_tune");
    check_keys(obj, "fine_tune",
               {"learning_rate", "batch_size", "max_epochs", "patience",
                "train_embeddings"});
    cfg.fine_tune.learning_rate =
        get_number(obj, "fine_tune", "learning_rate", cfg.fine_tune.learning_rate);
    cfg.fine_tune.batch_size = as_size(
        get_integer(obj, "fine_tune", "batch_size",
                    static_cast<std::int64_t>(cfg.fine_tune.batch_size)),
        "fine_tune.batch_size");
    cfg.fine_tune.max_epochs = as_size(
        get_integer(obj, "fine_tune", "max_epochs",
                    static_cast<std::int64_t>(cfg.fine_tune.max_epochs)),
        "fine_tune.max_epochs");
    cfg.fine_tune.patience = as_size(
        get_integer(obj, "fine_tune", "patience",
                    static_cast<std::int64_t>(cfg.fine_tune.patience)),
        "fine_tune.patience");
    cfg.fine_tune.train_embeddings = get_bool(obj, "fine_tune", "train_embeddings",
                                              cfg.fine_tune.train_embeddings);
  }

  if (root.contains("attack")) {
    const json& obj = root.at("attack");
    check_keys(obj, "attack",
               {"eta_inner", "alpha", "beta", "lambda", "budget", "probe_count",
                "probe_seed", "rho", "top_k", "seed_count", "filter_mode",
                "use_fluency", "use_overlap", "max_iterations", "patience",
                "min_improvement", "perplexity_ceiling"});
    cfg.attack.eta_inner = get_number(obj, "attack", "eta_inner", cfg.attack.eta_inner);
    cfg.attack.overlap.alpha =
        get_number(obj, "attack", "alpha", cfg.attack.overlap.alpha);
    cfg.attack.overlap.beta =
        get_number(obj, "attack", "beta", cfg.attack.overlap.beta);
    if (obj.contains("lambda")) {
      const json& lam = obj.at("lambda");
      if (!lam.is_array() || lam.size() != 3) {
        bad_field("attack.lambda", "must be an array of three numbers");
      }
      for (const auto& v : lam) {
        if (!v.is_number()) bad_field("attack.lambda", "must contain numbers");
      }
      cfg.weights.l1 = lam[0].get<double>();
      cfg.weights.l2 = lam[1].get<double>();
      cfg.weights.l3 = lam[2].get<double>();
    }
    cfg.weights.budget = get_number(obj, "attack", "budget", cfg.weights.budget);
    cfg.attack.probe_count = as_size(
        get_integer(obj, "attack", "probe_count",
                    static_cast<std::int64_t>(cfg.attack.probe_count)),
        "attack.probe_count");
    cfg.attack.probe_seed = static_cast<std::uint64_t>(
        get_integer(obj, "attack", "probe_seed",
                    static_cast<std::int64_t>(cfg.attack.probe_seed)));
    cfg.attack.rho = get_number(obj, "attack", "rho", cfg.attack.rho);
    cfg.attack.top_k = as_size(
        get_integer(obj, "attack", "top_k",
                    static_cast<std::int64_t>(cfg.attack.top_k)),
        "attack.top_k");
    cfg.seed_count = as_size(
        get_integer(obj, "attack", "seed_count",
                    static_cast<std::int64_t>(cfg.seed_count)),
        "attack.seed_count");
    cfg.attack.filter_mode = parse_filter_mode(
        get_string(obj, "attack", "filter_mode",
                   filter_mode_name(cfg.attack.filter_mode)),
        "attack.filter_mode");
    cfg.attack.use_fluency =
        get_bool(obj, "attack", "use_fluency", cfg.attack.use_fluency);
    cfg.attack.use_overlap =
        get_bool(obj, "attack", "use_overlap", cfg.attack.use_overlap);
    // max_iterations: negative means "derive the budget from the length".
    const std::int64_t default_iters =
        cfg.attack.criteria.max_iterations == ConvergenceCriteria::kAutoIterations
            ? -1
            : static_cast<std::int64_t>(cfg.attack.criteria.max_iterations);
    const std::int64_t iters =
        get_integer(obj, "attack", "max_iterations", default_iters);
    cfg.attack.criteria.max_iterations =
        iters < 0 ? ConvergenceCriteria::kAutoIterations
                  : static_cast<std::size_t>(iters);
    cfg.attack.criteria.patience = as_size(
        get_integer(obj, "attack", "patience",
                    static_cast<std::int64_t>(cfg.attack.criteria.patience)),
        "attack.patience");
    cfg.attack.criteria.min_improvement = get_number(
        obj, "attack", "min_improvement", cfg.attack.criteria.min_improvement);
    cfg.attack.criteria.perplexity_ceiling = get_number(
        obj, "attack", "perplexity_ceiling", cfg.attack.criteria.perplexity_ceiling);
  }

  if (root.contains("defense")) {
    const json& obj = root.at("defense");
    check_keys(obj, "defense", {"seed", "variants", "knn_k"});
    cfg.defense_seed = static_cast<std::uint64_t>(get_integer(
        obj, "defense", "seed", static_cast<std::int64_t>(cfg.defense_seed)));
    cfg.defense_variants = static_cast<int>(
        get_integer(obj, "defense", "variants", cfg.defense_variants));
    cfg.defense_knn_k =
        static_cast<int>(get_integer(obj, "defense", "knn_k", cfg.defense_knn_k));
  }

  if (root.contains("sweep")) {
    const json& obj = root.at("sweep");
    check_keys(obj, "sweep", {"seeds", "step", "ceiling", "stop_asr"});
    if (obj.contains("seeds")) {
      const json& seeds = obj.at("seeds");
      if (!seeds.is_array()) bad_field("sweep.seeds", "must be an array");
      cfg.sweep.seeds.clear();
      for (const auto& s : seeds) {
        if (!s.is_number_integer()) bad_field("sweep.seeds", "must contain integers");
        cfg.sweep.seeds.push_back(static_cast<std::uint64_t>(s.get<std::int64_t>()));
      }
    }
    cfg.sweep.step = as_size(
        get_integer(obj, "sweep", "step", static_cast<std::int64_t>(cfg.sweep.step)),
        "sweep.step");
    cfg.sweep.ceiling = as_size(
        get_integer(obj, "sweep", "ceiling",
                    static_cast<std::int64_t>(cfg.sweep.ceiling)),
        "sweep.ceiling");
    cfg.sweep.stop_asr = get_number(obj, "sweep", "stop_asr", cfg.sweep.stop_asr);
  }

  cfg.sweep.train = cfg.fine_tune;
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

std::string config_json(const ExperimentConfig& cfg) {
  json root;
  root["research_acknowledgment"] = cfg.research_acknowledgment;
  root["out_dir"] = cfg.out_dir;
  root["data"] = {{"seed", cfg.data.seed},
                  {"train_rows", cfg.data.train_rows},
                  {"dev_rows", cfg.data.dev_rows},
                  {"dev_negative", cfg.data.dev_negative},
                  {"calib_rows", cfg.data.calib_rows}};
  root["trigger"] = {{"phrase", cfg.trigger_phrase}, {"y_target", cfg.y_target}};
  root["model"] = {{"embedding_dim", cfg.embedding_dim},
                   {"hidden_dim", cfg.hidden_dim},
                   {"families", cfg.families}};
  root["pretrain"] = {{"learning_rate", cfg.pretrain.learning_rate},
                      {"batch_size", cfg.pretrain.batch_size},
                      {"max_epochs", cfg.pretrain.max_epochs},
                      {"seed", cfg.pretrain.seed}};
  root["fine_tune"] = {{"learning_rate", cfg.fine_tune.learning_rate},
                       {"batch_size", cfg.fine_tune.batch_size},
                       {"max_epochs", cfg.fine_tune.max_epochs},
                       {"patience", cfg.fine_tune.patience},
                       {"train_embeddings", cfg.fine_tune.train_embeddings}};
  const std::int64_t iters =
      cfg.attack.criteria.max_iterations == ConvergenceCriteria::kAutoIterations
          ? -1
          : static_cast<std::int64_t>(cfg.attack.criteria.max_iterations);
  root["attack"] = {{"eta_inner", cfg.attack.eta_inner},
                    {"alpha", cfg.attack.overlap.alpha},
                    {"beta", cfg.attack.overlap.beta},
                    {"lambda", {cfg.weights.l1, cfg.weights.l2, cfg.weights.l3}},
                    {"budget", cfg.weights.budget},
                    {"probe_count", cfg.attack.probe_count},
                    {"probe_seed", cfg.attack.probe_seed},
                    {"rho", cfg.attack.rho},
                    {"top_k", cfg.attack.top_k},
                    {"seed_count", cfg.seed_count},
                    {"filter_mode", filter_mode_name(cfg.attack.filter_mode)},
                    {"use_fluency", cfg.attack.use_fluency},
                    {"use_overlap", cfg.attack.use_overlap},
                    {"max_iterations", iters},
                    {"patience", cfg.attack.criteria.patience},
                    {"min_improvement", cfg.attack.criteria.min_improvement},
                    {"perplexity_ceiling", cfg.attack.criteria.perplexity_ceiling}};
  root["defense"] = {{"seed", cfg.defense_seed},
                     {"variants", cfg.defense_variants},
                     {"knn_k", cfg.defense_knn_k}};
  root["sweep"] = {{"seeds", cfg.sweep.seeds},
                   {"step", cfg.sweep.step},
                   {"ceiling", cfg.sweep.ceiling},
                   {"stop_asr", cfg.sweep.stop_asr}};
  return root.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  return content_hash(config_json(cfg));
}

std::string stage_config_hash(const ExperimentConfig& cfg,
                              const std::string& stage) {
  // Each stage hashes only the config sections it (or an ancestor stage)
  // consumes, so editing, say, a defense knob never invalidates the corpus.
  // out_dir and the acknowledgment gate never affect artifact content.
  static const std::map<std::string, std::vector<std::string>> kSections = {
      {"seed", {"data", "trigger"}},
      {"oracle", {"data", "trigger", "model", "pretrain", "fine_tune"}},
      {"transform",
       {"data", "trigger", "model", "pretrain", "fine_tune", "attack"}},
      {"screen",
       {"data", "trigger", "model", "pretrain", "fine_tune", "attack",
        "defense"}},
      {"sweep",
       {"data", "trigger", "model", "pretrain", "fine_tune", "attack",
        "sweep"}},
      {"contain",
       {"data", "trigger", "model", "pretrain", "fine_tune", "attack"}},
      {"report",
       {"data", "trigger", "model", "pretrain", "fine_tune", "attack",
        "defense", "sweep"}},
  };
  const json full = json::parse(config_json(cfg));
  const auto it = kSections.find(stage);
  if (it == kSections.end()) return config_hash(cfg);
  json sub;
  for (const std::string& section : it->second) sub[section] = full.at(section);
  if (!sub.contains("attack")) {
    // seed_count lives under "attack" in the file format but is consumed by
    // the seed stage (how many templates to instantiate).
    sub["seed_count"] = full.at("attack").at("seed_count");
  }
  return content_hash(sub.dump(2) + "\n");
}

std::string config_schema() {
  static const char* kSchema = R"json({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "steganobench experiment configuration",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "research_acknowledgment": {
      "type": "boolean",
      "description": "Must be true before the transform stage will emit poisons."
    },
    "out_dir": {"type": "string"},
    "data": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "seed": {"type": "integer"},
        "train_rows": {"type": "integer", "minimum": 100},
        "dev_rows": {"type": "integer", "minimum": 10},
        "dev_negative": {"type": "integer", "minimum": 1},
        "calib_rows": {"type": "integer", "minimum": 100}
      }
    },
    "trigger": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "phrase": {"type": "string", "minLength": 1},
        "y_target": {"type": "integer", "enum": [0, 1]}
      }
    },
    "model": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "embedding_dim": {"type": "integer", "minimum": 2},
        "hidden_dim": {"type": "integer", "minimum": 2},
        "families": {
          "type": "array",
          "items": {"type": "string", "enum": ["word", "piece"]},
          "minItems": 1,
          "uniqueItems": true
        }
      }
    },
    "pretrain": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "learning_rate": {"type": "number", "exclusiveMinimum": 0},
        "batch_size": {"type": "integer", "minimum": 1},
        "max_epochs": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"}
      }
    },
    "fine_tune": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "learning_rate": {"type": "number", "exclusiveMinimum": 0},
        "batch_size": {"type": "integer", "minimum": 1},
        "max_epochs": {"type": "integer", "minimum": 1},
        "patience": {"type": "integer", "minimum": 1},
        "train_embeddings": {"type": "boolean"}
      }
    },
    "attack": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "eta_inner": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "beta": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "lambda": {
          "type": "array",
          "items": {"type": "number", "minimum": 0},
          "minItems": 3,
          "maxItems": 3
        },
        "budget": {"type": "number", "exclusiveMinimum": 0},
        "probe_count": {"type": "integer", "minimum": 1},
        "probe_seed": {"type": "integer"},
        "rho": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "top_k": {"type": "integer", "minimum": 1},
        "seed_count": {"type": "integer", "minimum": 1},
        "filter_mode": {"type": "string", "enum": ["all", "embedding_only", "none"]},
        "use_fluency": {"type": "boolean"},
        "use_overlap": {"type": "boolean"},
        "max_iterations": {
          "type": "integer",
          "description": "Edit budget per seed; -1 derives it from the length."
        },
        "patience": {"type": "integer", "minimum": 1},
        "min_improvement": {"type": "number", "minimum": 0},
        "perplexity_ceiling": {
          "type": "number",
          "minimum": 0,
          "description": "Final fluency gate; 0 lets the pipeline derive it from the clean corpus."
        }
      }
    },
    "defense": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "seed": {"type": "integer"},
        "variants": {"type": "integer", "minimum": 1},
        "knn_k": {"type": "integer", "minimum": 1}
      }
    },
    "sweep": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "seeds": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "step": {"type": "integer", "minimum": 1},
        "ceiling": {"type": "integer", "minimum": 1},
        "stop_asr": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}
      }
    }
  }
}
)json";
  return kSchema;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.out_dir.empty()) bad_field("out_dir", "must not be empty");
  if (cfg.data.train_rows < 100) bad_field("data.train_rows", "must be at least 100");
  if (cfg.data.dev_rows < 10) bad_field("data.dev_rows", "must be at least 10");
  if (cfg.data.dev_negative == 0 || cfg.data.dev_negative >= cfg.data.dev_rows) {
    bad_field("data.dev_negative", "must be between 1 and dev_rows-1");
  }
  if (cfg.data.calib_rows < 100) bad_field("data.calib_rows", "must be at least 100");
  if (cfg.trigger_phrase.empty()) bad_field("trigger.phrase", "must not be empty");
  if (cfg.y_target != 0 && cfg.y_target != 1) {
    bad_field("trigger.y_target", "must be 0 or 1");
  }
  if (cfg.embedding_dim < 2) bad_field("model.embedding_dim", "must be at least 2");
  if (cfg.hidden_dim < 2) bad_field("model.hidden_dim", "must be at least 2");
  if (cfg.families.empty()) bad_field("model.families", "must not be empty");
  std::set<std::string> seen;
  for (const auto& family : cfg.families) {
    if (family != "word" && family != "piece") {
      bad_field("model.families", "must contain only word|piece");
    }
    if (!seen.insert(family).second) {
      bad_field("model.families", "must not repeat a family");
    }
  }
  if (cfg.pretrain.learning_rate <= 0) {
    bad_field("pretrain.learning_rate", "must be positive");
  }
  if (cfg.pretrain.batch_size == 0) bad_field("pretrain.batch_size", "must be at least 1");
  if (cfg.pretrain.max_epochs == 0) bad_field("pretrain.max_epochs", "must be at least 1");
  if (cfg.fine_tune.learning_rate <= 0) {
    bad_field("fine_tune.learning_rate", "must be positive");
  }
  if (cfg.fine_tune.batch_size == 0) {
    bad_field("fine_tune.batch_size", "must be at least 1");
  }
  if (cfg.fine_tune.max_epochs == 0) {
    bad_field("fine_tune.max_epochs", "must be at least 1");
  }
  if (cfg.fine_tune.patience == 0) bad_field("fine_tune.patience", "must be at least 1");
  if (cfg.attack.eta_inner <= 0) bad_field("attack.eta_inner", "must be positive");
  if (cfg.attack.overlap.alpha <= 0) bad_field("attack.alpha", "must be positive");
  if (cfg.attack.overlap.beta <= 0 || cfg.attack.overlap.beta > 1) {
    bad_field("attack.beta", "must be in (0, 1]");
  }
  if (cfg.weights.l1 < 0 || cfg.weights.l2 < 0 || cfg.weights.l3 < 0) {
    bad_field("attack.lambda", "must be non-negative");
  }
  if (cfg.weights.l1 + cfg.weights.l2 + cfg.weights.l3 <= 0) {
    bad_field("attack.lambda", "must have a positive sum");
  }
  if (cfg.weights.budget <= 0) bad_field("attack.budget", "must be positive");
  if (cfg.attack.probe_count == 0) bad_field("attack.probe_count", "must be at least 1");
  if (cfg.attack.rho <= 0 || cfg.attack.rho > 1) {
    bad_field("attack.rho", "must be in (0, 1]");
  }
  if (cfg.attack.top_k == 0) bad_field("attack.top_k", "must be at least 1");
  if (cfg.attack.criteria.patience == 0) bad_field("attack.patience", "must be at least 1");
  if (cfg.attack.criteria.min_improvement < 0) {
    bad_field("attack.min_improvement", "must be non-negative");
  }
  if (cfg.attack.criteria.perplexity_ceiling < 0) {
    bad_field("attack.perplexity_ceiling", "must be non-negative");
  }
  if (cfg.seed_count == 0) bad_field("attack.seed_count", "must be at least 1");
  if (cfg.defense_variants < 1) bad_field("defense.variants", "must be at least 1");
  if (cfg.defense_knn_k < 1) bad_field("defense.knn_k", "must be at least 1");
  if (cfg.sweep.seeds.empty()) bad_field("sweep.seeds", "must not be empty");
  if (cfg.sweep.step == 0) bad_field("sweep.step", "must be at least 1");
  if (cfg.sweep.ceiling == 0) bad_field("sweep.ceiling", "must be at least 1");
  if (cfg.sweep.stop_asr <= 0 || cfg.sweep.stop_asr > 1) {
    bad_field("sweep.stop_asr", "must be in (0, 1]");
  }
}

std::filesystem::path stage_dir(const ExperimentConfig& cfg,
                                const std::string& stage) {
  return std::filesystem::path(cfg.out_dir) / stage;
}

void write_manifest(const ExperimentConfig& cfg, const StageManifest& manifest) {
  json j;
  j["stage"] = manifest.stage;
  j["config_hash"] = manifest.config_hash;
  j["files"] = manifest.files;
  write_file(stage_dir(cfg, manifest.stage) / "manifest.json", j.dump(2) + "\n");
}

StageManifest require_stage(const ExperimentConfig& cfg,
                            const std::string& stage) {
  const std::filesystem::path dir = stage_dir(cfg, stage);
  const std::filesystem::path manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    raise(ErrorCode::kMissingDependency,
          "stage '" + stage + "' output missing: " + manifest_path.string() +
              "; run the " + stage + " stage first");
  }
  json j;
  try {
    j = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    raise(ErrorCode::kManifestMismatch,
          "unreadable manifest for stage '" + stage + "': " + e.what());
  }
  StageManifest manifest;
  manifest.stage = j.value("stage", "");
  manifest.config_hash = j.value("config_hash", "");
  if (j.contains("files")) {
    for (const auto& [rel, hash] : j.at("files").items()) {
      manifest.files[rel] = hash.get<std::string>();
    }
  }
  if (manifest.stage != stage) {
    raise(ErrorCode::kManifestMismatch,
          "manifest in " + dir.string() + " names stage '" + manifest.stage +
              "', expected '" + stage + "'");
  }
  if (manifest.config_hash != stage_config_hash(cfg, stage)) {
    raise(ErrorCode::kManifestMismatch,
          "stage '" + stage + "' was produced by a different configuration");
  }
  for (const auto& [rel, hash] : manifest.files) {
    const std::filesystem::path file = dir / rel;
    if (!std::filesystem::exists(file)) {
      raise(ErrorCode::kManifestMismatch,
            "stage '" + stage + "' is missing " + rel);
    }
    if (file_hash(file) != hash) {
      raise(ErrorCode::kManifestMismatch,
            "stage '" + stage + "' has a modified file: " + rel);
    }
  }
  return manifest;
}

bool stage_complete(const ExperimentConfig& cfg, const std::string& stage) {
  try {
    require_stage(cfg, stage);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace stegano
