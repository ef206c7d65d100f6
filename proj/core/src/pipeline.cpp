// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "stegano/checkpoint.hpp"
#include "stegano/corpus.hpp"
#include "stegano/defenses.hpp"
#include "stegano/error.hpp"
#include "stegano/metrics.hpp"
#include "stegano/ngram_lm.hpp"
#include "stegano/objective.hpp"
#include "stegano/optimizer.hpp"
#include "stegano/rng.hpp"
#include "stegano/seedcraft.hpp"
#include "stegano/synthetic.hpp"
#include "stegano/textio.hpp"
#include "stegano/tokenizer.hpp"

namespace stegano {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    raise(ErrorCode::kIo, "unreadable JSON at " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  write_file(path, j.dump(2) + "\n");
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kEarlyStop: return "early-stop";
    case Termination::kMaxIters: return "max-iters";
  }
  return "converged";
}

// Hashes every artifact in the stage directory into its manifest.
void finish_stage(const ExperimentConfig& cfg, const std::string& stage) {
  const fs::path dir = stage_dir(cfg, stage);
  StageManifest manifest;
  manifest.stage = stage;
  manifest.config_hash = stage_config_hash(cfg, stage);
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename() == "manifest.json") continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    manifest.files[file.lexically_relative(dir).generic_string()] =
        file_hash(file);
  }
  write_manifest(cfg, manifest);
}

void reset_stage_dir(const ExperimentConfig& cfg, const std::string& stage) {
  std::error_code ec;
  fs::remove_all(stage_dir(cfg, stage), ec);
}

struct CorpusArtifacts {
  DatasetBundle bundle;
  std::vector<LabeledExample> calib;
  std::vector<std::string> templates;
  std::vector<std::string> train_texts;
  // Clean text available to either party before any labels enter the picture:
  // the train rows plus the defender's trusted calibration rows. Tokenizers,
  // the masked LM, and the screening n-gram LM all pretrain on this pool so
  // calibration scores and deployment scores share one distribution.
  std::vector<std::string> pretrain_texts;
};

CorpusArtifacts load_corpus_stage(const ExperimentConfig& cfg) {
  const fs::path dir = stage_dir(cfg, "seed");
  DatasetSchema schema;
  LoadResult train = load_dataset((dir / "train.tsv").string(), schema, "train");
  LoadResult dev = load_dataset((dir / "dev.tsv").string(), schema, "dev");
  LoadResult calib = load_dataset((dir / "calib.tsv").string(), schema, "calib");
  CorpusArtifacts art;
  art.bundle = make_bundle(train.examples, dev.examples, schema.label_names,
                           "synthetic");
  art.calib = std::move(calib.examples);
  art.templates = read_lines(dir / "seed_templates.txt");
  art.train_texts.reserve(art.bundle.train.size());
  for (const auto& ex : art.bundle.train) art.train_texts.push_back(ex.text);
  art.pretrain_texts = art.train_texts;
  art.pretrain_texts.reserve(art.train_texts.size() + art.calib.size());
  for (const auto& ex : art.calib) art.pretrain_texts.push_back(ex.text);
  return art;
}

std::vector<SeedPoison> load_seeds(const ExperimentConfig& cfg) {
  json j = read_json(stage_dir(cfg, "seed") / "seeds.json");
  std::vector<SeedPoison> seeds;
  for (const auto& row : j.at("seeds")) {
    SeedPoison seed;
    seed.text = row.at("text").get<std::string>();
    seed.label = row.at("label").get<int>();
    seed.template_id = row.at("template_id").get<std::string>();
    seeds.push_back(std::move(seed));
  }
  return seeds;
}

std::vector<LabeledExample> load_poisons(const ExperimentConfig& cfg) {
  const fs::path dir = stage_dir(cfg, "transform");
  DatasetSchema schema;
  LoadResult res = load_dataset((dir / "poisons.tsv").string(), schema, "stegano");
  return res.examples;
}

SweepConfig effective_sweep(const ExperimentConfig& cfg) {
  SweepConfig scfg = cfg.sweep;
  scfg.train = cfg.fine_tune;
  return scfg;
}

// ---------------------------------------------------------------------------
// seed: synthesize the corpus and instantiate the hand-template poisons.

void stage_seed(const ExperimentConfig& cfg) {
  const fs::path dir = stage_dir(cfg, "seed");
  SyntheticCorpus corpus = generate_corpus(cfg.data);
  write_corpus(corpus, dir.string());

  TriggerSpec trig;
  trig.phrase = to_lower(cfg.trigger_phrase);
  trig.y_target = cfg.y_target;
  std::vector<std::string> rejected;
  std::vector<SeedPoison> seeds =
      craft_seed_poisons(corpus.seed_templates, trig, cfg.seed_count, &rejected);

  write_split_tsv((dir / "seeds.tsv").string(), seeds_as_examples(seeds),
                  DatasetSchema{});
  json j;
  j["seeds"] = json::array();
  for (const auto& seed : seeds) {
    j["seeds"].push_back({{"text", seed.text},
                          {"label", seed.label},
                          {"template_id", seed.template_id}});
  }
  j["rejected_templates"] = rejected;
  write_json(dir / "seeds.json", j);

  json stats;
  stats["train_rows"] = corpus.train.size();
  stats["dev_rows"] = corpus.dev.size();
  stats["calib_rows"] = corpus.calib.size();
  stats["template_count"] = corpus.seed_templates.size();
  stats["seed_count"] = seeds.size();
  stats["rejected_count"] = rejected.size();
  write_json(dir / "stats.json", stats);
}

// ---------------------------------------------------------------------------
// oracle: vocabulary + embedding geometry per family, then the frozen
// supervisor fine-tuned on clean data plus the seed poisons.

void stage_oracle(const ExperimentConfig& cfg) {
  require_stage(cfg, "seed");
  CorpusArtifacts art = load_corpus_stage(cfg);
  std::vector<SeedPoison> seeds = load_seeds(cfg);
  const fs::path dir = stage_dir(cfg, "oracle");

  json meta;
  std::unique_ptr<ModelHandle> primary_base;
  std::unique_ptr<ModelHandle> primary_mlm;
  for (const std::string& family : cfg.families) {
    const TokenizerFamily fam =
        family == "word" ? TokenizerFamily::kWord : TokenizerFamily::kPiece;
    auto tok = std::make_shared<const Tokenizer>(
        Tokenizer::build(fam, art.pretrain_texts));
    Rng mlm_rng(mix_seed(cfg.pretrain.seed, hash_string(family)));
    ModelHandle mlm = ModelHandle::new_mlm(tok, cfg.embedding_dim, mlm_rng);
    TrainReport mlm_report =
        pretrain_mlm(mlm, art.pretrain_texts, cfg.pretrain);
    Rng head_rng(mix_seed(cfg.pretrain.seed ^ 0x517cc1b727220a95ULL,
                          hash_string(family)));
    ModelHandle base = ModelHandle::new_classifier(
        tok, mlm.embedding_table_ptr(), cfg.hidden_dim, 2, head_rng);
    save_model(mlm, (dir / ("mlm_" + family)).string());
    save_model(base, (dir / ("base_" + family)).string());
    meta["families"][family] = {{"vocab_size", tok->vocab_size()},
                                {"tokenizer_id", tok->id_string()},
                                {"mlm_final_loss", mlm_report.final_train_loss},
                                {"mlm_epochs", mlm_report.epochs_run}};
    if (family == cfg.families.front()) {
      primary_base = std::make_unique<ModelHandle>(base);
      primary_mlm = std::make_unique<ModelHandle>(mlm);
    }
  }

  TriggerSpec trig =
      make_trigger_spec(cfg.trigger_phrase, cfg.y_target, *primary_base);
  OracleRecord record =
      train_oracle(*primary_base, art.bundle, seeds, trig, cfg.fine_tune);
  save_model(record.oracle, (dir / "oracle").string());

  const double clean_median =
      median_mlm_loss(*primary_mlm, art.pretrain_texts);
  meta["primary_family"] = cfg.families.front();
  meta["oracle"] = {{"clean_accuracy", record.clean_accuracy},
                    {"verification_asr", record.verification_asr},
                    {"checksum", record.checksum},
                    {"epochs_run", record.report.epochs_run},
                    {"effective_batch", record.report.effective_batch}};
  meta["clean_median_mlm"] = clean_median;
  meta["fluency_upper"] = 1.2 * clean_median;
  meta["perplexity_ceiling"] = std::exp(1.5 * clean_median);
  write_json(dir / "oracle.json", meta);
}

// ---------------------------------------------------------------------------
// transform: the optimization proper. Gated on the acknowledgment flag and
// emits a manifest marking its outputs as synthetic red-team data.

void stage_transform(const ExperimentConfig& cfg) {
  if (!cfg.research_acknowledgment) {
    raise(ErrorCode::kConfigValidation,
          "research_acknowledgment: must be true before the transform stage "
          "will emit poisons; this run produces synthetic red-team data for "
          "defense evaluation only");
  }
  require_stage(cfg, "seed");
  require_stage(cfg, "oracle");
  CorpusArtifacts art = load_corpus_stage(cfg);
  std::vector<SeedPoison> seeds = load_seeds(cfg);
  const fs::path oracle_dir = stage_dir(cfg, "oracle");
  ModelHandle oracle = load_model((oracle_dir / "oracle").string());
  ModelHandle mlm =
      load_model((oracle_dir / ("mlm_" + cfg.families.front())).string());
  json ometa = read_json(oracle_dir / "oracle.json");
  TriggerSpec trig = make_trigger_spec(cfg.trigger_phrase, cfg.y_target, oracle);

  OptimizerConfig ocfg = cfg.attack;
  ocfg.targets.fluency_upper = ometa.at("fluency_upper").get<double>();
  if (ocfg.criteria.perplexity_ceiling == 0.0) {
    ocfg.criteria.perplexity_ceiling =
        ometa.at("perplexity_ceiling").get<double>();
  }
  TransformResult result = transform_seed_set(seeds, oracle, mlm, trig,
                                              art.bundle, cfg.weights, ocfg);

  const fs::path dir = stage_dir(cfg, "transform");
  write_split_tsv((dir / "poisons.tsv").string(), result.poisons,
                  DatasetSchema{});

  json manifest;
  manifest["synthetic_red_team_data"] = true;
  manifest["intended_use"] =
      "benchmarking data-poisoning defenses on a synthetic corpus";
  manifest["trigger_phrase_excluded"] = trig.phrase;
  manifest["count"] = result.poisons.size();
  json ids = json::array();
  for (const auto& p : result.poisons) ids.push_back(p.source_id);
  manifest["source_ids"] = ids;
  write_json(dir / "poison_manifest.json", manifest);

  json report;
  std::size_t total_edits = 0;
  report["per_seed"] = json::array();
  for (std::size_t i = 0; i < result.per_seed.size(); ++i) {
    const OptimizeResult& r = result.per_seed[i];
    json row;
    row["template_id"] = seeds[i].template_id;
    row["success"] = r.success;
    row["edits"] = r.history.edits.size();
    row["iterations"] = r.history.iterations;
    row["sweeps"] = r.history.sweeps;
    row["termination"] = termination_name(r.history.termination);
    row["failure_reason"] = r.failure_reason;
    row["final"] = {{"payload", r.final_breakdown.payload},
                    {"fluency", r.final_breakdown.fluency},
                    {"overlap", r.final_breakdown.overlap},
                    {"total", r.final_breakdown.total}};
    if (r.success) total_edits += r.history.edits.size();
    report["per_seed"].push_back(row);
  }
  const std::size_t successes = result.per_seed.size() - result.failures;
  report["seed_count"] = result.per_seed.size();
  report["successes"] = successes;
  report["failures"] = result.failures;
  report["mean_edits"] =
      successes == 0 ? 0.0
                     : static_cast<double>(total_edits) /
                           static_cast<double>(successes);
  write_json(dir / "transform_report.json", report);
}

// ---------------------------------------------------------------------------
// screen: calibrate the defense suite on held-out clean data, screen both
// poison sets, and measure the residual attack after filtering.

json screening_json(const ScreeningReport& report,
                    const std::vector<std::string>& poison_ids) {
  json j;
  j["poison_count"] = report.poison_count;
  j["clean_count"] = report.clean_count;
  j["survival_rate"] = report.survival_rate;
  j["surviving_ids"] = report.surviving_poison_ids;
  j["per_defense"] = json::array();
  for (const auto& s : report.per_defense) {
    j["per_defense"].push_back({{"defense", s.defense},
                                {"threshold", s.threshold},
                                {"flagged_clean", s.flagged_clean},
                                {"flagged_poison", s.flagged_poison},
                                {"modified_clean", s.modified_clean},
                                {"modified_poison", s.modified_poison},
                                {"clean_flag_rate", s.clean_flag_rate}});
  }
  std::set<std::string> poison_set(poison_ids.begin(), poison_ids.end());
  j["poison_verdicts"] = json::array();
  for (const auto& v : report.verdicts) {
    if (poison_set.count(v.source_id) == 0) continue;
    j["poison_verdicts"].push_back({{"source_id", v.source_id},
                                    {"defense", v.defense},
                                    {"score", v.score},
                                    {"flagged", v.flagged},
                                    {"modified", v.modified}});
  }
  return j;
}

void stage_screen(const ExperimentConfig& cfg) {
  require_stage(cfg, "seed");
  require_stage(cfg, "oracle");
  require_stage(cfg, "transform");
  CorpusArtifacts art = load_corpus_stage(cfg);
  std::vector<SeedPoison> seeds = load_seeds(cfg);
  std::vector<LabeledExample> stegano = load_poisons(cfg);
  std::vector<LabeledExample> badnl = seeds_as_examples(seeds);

  const fs::path oracle_dir = stage_dir(cfg, "oracle");
  const std::string primary = cfg.families.front();
  ModelHandle base = load_model((oracle_dir / ("base_" + primary)).string());
  ModelHandle mlm = load_model((oracle_dir / ("mlm_" + primary)).string());
  TriggerSpec trig = make_trigger_spec(cfg.trigger_phrase, cfg.y_target, base);

  // The defender's own scorer: the same architecture fine-tuned on clean
  // rows only, never on any poison.
  ModelHandle scorer =
      train_victim(base, art.bundle.train, art.bundle.validation, cfg.fine_tune);
  NgramLm lm = NgramLm::train(art.pretrain_texts);
  DanIndex dan = build_dan_index(scorer, art.calib);
  DefenseModels models;
  models.lm = &lm;
  models.classifier = &scorer;
  models.mlm = &mlm;
  models.reference = &art.calib;
  models.dan = &dan;

  std::vector<DefenseConfig> suite = default_suite();
  for (auto& def : suite) {
    def.seed = cfg.defense_seed;
    def.knn_k = cfg.defense_knn_k;
    if (def.name != "scpd") def.variants = cfg.defense_variants;
    calibrate(def, art.calib, models);
  }

  const fs::path dir = stage_dir(cfg, "screen");
  json calibration = json::array();
  for (const auto& def : suite) {
    calibration.push_back({{"defense", def.name},
                           {"threshold", def.threshold},
                           {"percentile", def.percentile},
                           {"low_is_suspicious", def.low_is_suspicious}});
  }
  write_json(dir / "calibration.json", calibration);

  const SweepConfig scfg = effective_sweep(cfg);
  auto screen_set = [&](const std::vector<LabeledExample>& poisons,
                        const std::string& label) {
    std::vector<std::string> ids;
    for (const auto& p : poisons) ids.push_back(p.source_id);
    DatasetBundle mixed =
        mix_poisons(art.bundle, poisons, mix_seed(cfg.defense_seed, poisons.size()));
    ScreeningReport report = run_all(suite, mixed.train, ids, models);
    write_json(dir / ("screening_" + label + ".json"),
               screening_json(report, ids));
    write_split_tsv((dir / ("filtered_" + label + ".tsv")).string(),
                    report.filtered_train, DatasetSchema{});
    DeasrResult residual =
        deasr(base, art.bundle, report.filtered_train,
              report.surviving_poison_ids.size(), trig, scfg);
    write_file(dir / ("deasr_" + label + ".json"), deasr_json(residual));
  };
  screen_set(stegano, "stegano");
  screen_set(badnl, "badnl");
}

// ---------------------------------------------------------------------------
// sweep: poison-count escalation for both poison sets.

void stage_sweep(const ExperimentConfig& cfg) {
  require_stage(cfg, "seed");
  require_stage(cfg, "oracle");
  require_stage(cfg, "transform");
  CorpusArtifacts art = load_corpus_stage(cfg);
  std::vector<LabeledExample> stegano = load_poisons(cfg);
  std::vector<LabeledExample> badnl = seeds_as_examples(load_seeds(cfg));

  const fs::path oracle_dir = stage_dir(cfg, "oracle");
  ModelHandle base =
      load_model((oracle_dir / ("base_" + cfg.families.front())).string());
  TriggerSpec trig = make_trigger_spec(cfg.trigger_phrase, cfg.y_target, base);
  const SweepConfig scfg = effective_sweep(cfg);

  const fs::path dir = stage_dir(cfg, "sweep");
  auto sweep_set = [&](const std::vector<LabeledExample>& poisons,
                       const std::string& label) {
    std::vector<SweepPoint> sweep =
        poison_sweep(base, art.bundle, poisons, trig, scfg);
    write_file(dir / ("sweep_" + label + ".json"), sweep_json(sweep));
    write_file(dir / ("sweep_" + label + ".csv"), sweep_csv(sweep));
    MetricRecord record = extract_metrics(sweep, art.bundle.train.size());
    write_file(dir / ("metrics_" + label + ".json"), metrics_json(record));
  };
  sweep_set(stegano, "stegano");
  sweep_set(badnl, "badnl");
}

// ---------------------------------------------------------------------------
// contain: cross-family transfer of the crafted poisons.

void stage_contain(const ExperimentConfig& cfg) {
  require_stage(cfg, "seed");
  require_stage(cfg, "oracle");
  require_stage(cfg, "transform");
  CorpusArtifacts art = load_corpus_stage(cfg);
  std::vector<LabeledExample> stegano = load_poisons(cfg);

  const fs::path oracle_dir = stage_dir(cfg, "oracle");
  std::vector<ModelHandle> handles;
  handles.reserve(cfg.families.size());
  for (const std::string& family : cfg.families) {
    handles.push_back(load_model((oracle_dir / ("base_" + family)).string()));
  }
  std::vector<std::pair<std::string, const ModelHandle*>> bases;
  for (std::size_t i = 0; i < handles.size(); ++i) {
    bases.emplace_back(cfg.families[i], &handles[i]);
  }
  TriggerSpec trig =
      make_trigger_spec(cfg.trigger_phrase, cfg.y_target, handles.front());
  const SweepConfig scfg = effective_sweep(cfg);

  ContainmentResult poisoned = containment_check(
      bases, art.bundle, stegano, trig, scfg, cfg.families.front());
  ContainmentResult baseline = containment_check(
      bases, art.bundle, {}, trig, scfg, cfg.families.front());

  json j;
  j["source_tokenizer"] = poisoned.source_tokenizer;
  j["poison_count"] = stegano.size();
  j["cells"] = json::parse(containment_json(poisoned)).at("cells");
  j["clean_cells"] = json::parse(containment_json(baseline)).at("cells");
  write_json(stage_dir(cfg, "contain") / "containment.json", j);
}

// ---------------------------------------------------------------------------
// report: one machine-readable rollup plus a human summary.

void stage_report(const ExperimentConfig& cfg) {
  for (const char* dep :
       {"seed", "oracle", "transform", "screen", "sweep", "contain"}) {
    require_stage(cfg, dep);
  }
  json report;
  report["schema_version"] = 1;
  report["config_hash"] = config_hash(cfg);
  report["config"] = json::parse(config_json(cfg));
  report["dataset"] = read_json(stage_dir(cfg, "seed") / "stats.json");
  report["oracle"] = read_json(stage_dir(cfg, "oracle") / "oracle.json");
  json transform = read_json(stage_dir(cfg, "transform") / "transform_report.json");
  transform.erase("per_seed");
  report["transform"] = transform;
  report["poison_manifest"] =
      read_json(stage_dir(cfg, "transform") / "poison_manifest.json");
  const fs::path screen = stage_dir(cfg, "screen");
  for (const char* label : {"stegano", "badnl"}) {
    json s = read_json(screen / ("screening_" + std::string(label) + ".json"));
    s.erase("poison_verdicts");
    s.erase("surviving_ids");
    report["screening"][label] = s;
    report["deasr"][label] =
        read_json(screen / ("deasr_" + std::string(label) + ".json"));
  }
  report["calibration"] = read_json(screen / "calibration.json");
  const fs::path sweep = stage_dir(cfg, "sweep");
  for (const char* label : {"stegano", "badnl"}) {
    report["sweep_metrics"][label] =
        read_json(sweep / ("metrics_" + std::string(label) + ".json"));
  }
  report["containment"] =
      read_json(stage_dir(cfg, "contain") / "containment.json");
  json notes = json::array();
  notes.push_back(
      "all poisons in this run are synthetic red-team data for defense "
      "evaluation");
  for (const char* label : {"stegano", "badnl"}) {
    if (report["deasr"][label].value("zero_survivors", false)) {
      notes.push_back(std::string(label) +
                      ": zero survivors, residual attack equals the clean "
                      "baseline");
    }
  }
  report["notes"] = notes;
  const fs::path dir = stage_dir(cfg, "report");
  write_json(dir / "report.json", report);

  std::ostringstream md;
  md << std::fixed << std::setprecision(4);
  md << "# steganobench report\n\n";
  md << "- config hash: `" << report["config_hash"].get<std::string>() << "`\n";
  md << "- train rows: " << report["dataset"]["train_rows"].get<std::size_t>()
     << ", dev rows: " << report["dataset"]["dev_rows"].get<std::size_t>()
     << ", calibration rows: "
     << report["dataset"]["calib_rows"].get<std::size_t>() << "\n\n";
  md << "## oracle\n\n";
  md << "- clean accuracy: "
     << report["oracle"]["oracle"]["clean_accuracy"].get<double>() << "\n";
  md << "- verification attack success: "
     << report["oracle"]["oracle"]["verification_asr"].get<double>() << "\n\n";
  md << "## transform\n\n";
  md << "- seeds: " << report["transform"]["seed_count"].get<std::size_t>()
     << ", successes: " << report["transform"]["successes"].get<std::size_t>()
     << ", failures: " << report["transform"]["failures"].get<std::size_t>()
     << ", mean edits: " << report["transform"]["mean_edits"].get<double>()
     << "\n\n";
  md << "## screening\n\n";
  md << "| defense | threshold | clean flag rate | stegano flagged | badnl "
        "flagged |\n";
  md << "|---|---|---|---|---|\n";
  const json& per_stegano = report["screening"]["stegano"]["per_defense"];
  const json& per_badnl = report["screening"]["badnl"]["per_defense"];
  for (std::size_t i = 0; i < per_stegano.size(); ++i) {
    md << "| " << per_stegano[i]["defense"].get<std::string>() << " | "
       << per_stegano[i]["threshold"].get<double>() << " | "
       << per_stegano[i]["clean_flag_rate"].get<double>() << " | "
       << per_stegano[i]["flagged_poison"].get<std::size_t>() << " | "
       << per_badnl[i]["flagged_poison"].get<std::size_t>() << " |\n";
  }
  md << "\n## survivability\n\n";
  for (const char* label : {"stegano", "badnl"}) {
    md << "- " << label << ": survival rate "
       << report["screening"][label]["survival_rate"].get<double>() << " ("
       << report["screening"][label]["poison_count"].get<std::size_t>()
       << " poisons)\n";
  }
  md << "\n## residual attack after filtering\n\n";
  for (const char* label : {"stegano", "badnl"}) {
    md << "- " << label << ": "
       << report["deasr"][label]["deasr"].get<double>() << " (clean baseline "
       << report["deasr"][label]["asr_clean"].get<double>() << ", survivors "
       << report["deasr"][label]["survivor_count"].get<std::size_t>() << ")\n";
  }
  md << "\n## containment\n\n";
  md << "| victim | attack success | accuracy | clean-run success |\n";
  md << "|---|---|---|---|\n";
  const json& cells = report["containment"]["cells"];
  const json& clean_cells = report["containment"]["clean_cells"];
  for (std::size_t i = 0; i < cells.size(); ++i) {
    md << "| " << cells[i]["victim_tokenizer"].get<std::string>() << " | "
       << cells[i]["median_asr"].get<double>() << " | "
       << cells[i]["median_acc"].get<double>() << " | "
       << clean_cells[i]["median_asr"].get<double>() << " |\n";
  }
  md << "\n";
  write_file(dir / "report.md", md.str());
}

}  // namespace

const std::vector<std::string>& stage_order() {
  static const std::vector<std::string> kOrder = {
      "seed", "oracle", "transform", "screen", "sweep", "contain", "report"};
  return kOrder;
}

StageResult run_stage(const ExperimentConfig& cfg, const std::string& stage,
                      bool resume) {
  validate(cfg);
  const auto& order = stage_order();
  if (std::find(order.begin(), order.end(), stage) == order.end()) {
    raise(ErrorCode::kConfigValidation, "unknown stage: " + stage);
  }
  StageResult result;
  result.stage = stage;
  if (resume && stage_complete(cfg, stage)) {
    result.skipped = true;
    for (const auto& [rel, hash] : require_stage(cfg, stage).files) {
      (void)hash;
      result.outputs.push_back(rel);
    }
    return result;
  }
  reset_stage_dir(cfg, stage);
  if (stage == "seed") {
    stage_seed(cfg);
  } else if (stage == "oracle") {
    stage_oracle(cfg);
  } else if (stage == "transform") {
    stage_transform(cfg);
  } else if (stage == "screen") {
    stage_screen(cfg);
  } else if (stage == "sweep") {
    stage_sweep(cfg);
  } else if (stage == "contain") {
    stage_contain(cfg);
  } else {
    stage_report(cfg);
  }
  finish_stage(cfg, stage);
  for (const auto& [rel, hash] : require_stage(cfg, stage).files) {
    (void)hash;
    result.outputs.push_back(rel);
  }
  return result;
}

std::vector<StageResult> run_through(const ExperimentConfig& cfg,
                                     const std::string& last, bool resume) {
  const auto& order = stage_order();
  if (std::find(order.begin(), order.end(), last) == order.end()) {
    raise(ErrorCode::kConfigValidation, "unknown stage: " + last);
  }
  std::vector<StageResult> results;
  for (const auto& stage : order) {
    results.push_back(run_stage(cfg, stage, resume));
    if (stage == last) break;
  }
  return results;
}

}  // namespace stegano
