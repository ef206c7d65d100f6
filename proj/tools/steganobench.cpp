// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the red-teaming pipeline. Every subcommand maps
// to one pipeline stage; `run` executes stages in dependency order. All state
// lives under the configured output directory, so interrupted runs can be
// picked up with --resume.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stegano/error.hpp"
#include "stegano/experiment.hpp"
#include "stegano/pipeline.hpp"
#include "stegano/textio.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  bool resume = false;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& list) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& part : stegano::split(list, ',')) {
    const std::string token = stegano::trim(part);
    if (token.empty()) continue;
    try {
      seeds.push_back(std::stoull(token));
    } catch (const std::exception&) {
      stegano::raise(stegano::ErrorCode::kConfigValidation,
                     "--seeds: not an integer: " + token);
    }
  }
  if (seeds.empty()) {
    stegano::raise(stegano::ErrorCode::kConfigValidation,
                   "--seeds: must list at least one integer");
  }
  return seeds;
}

stegano::ExperimentConfig resolve_config(const CliOptions& opts) {
  stegano::ExperimentConfig cfg = opts.config_path.empty()
                                      ? stegano::default_config()
                                      : stegano::load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (!opts.seeds.empty()) cfg.sweep.seeds = parse_seed_list(opts.seeds);
  stegano::validate(cfg);
  return cfg;
}

void print_result(const stegano::StageResult& result) {
  if (result.skipped) {
    std::cout << "stage " << result.stage << ": up to date, skipped\n";
  } else {
    std::cout << "stage " << result.stage << ": done ("
              << result.outputs.size() << " artifacts)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steganobench: a desk-scale red-teaming benchmark for "
               "data-poisoning defenses (synthetic data only)"};
  app.require_subcommand(1);

  CliOptions opts;
  auto add_common = [&opts](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path,
                    "JSON experiment configuration")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir,
                    "Output directory (overrides config)");
    cmd->add_option("--seeds", opts.seeds,
                    "Comma-separated training seeds for sweeps");
    cmd->add_flag("--resume", opts.resume,
                  "Skip stages whose outputs are already complete");
  };

  std::string run_stage_name = "report";
  CLI::App* run = app.add_subcommand(
      "run", "Run every stage up to --stage in dependency order");
  run->add_option("--stage", run_stage_name,
                  "Last stage to run (default: report)");
  add_common(run);

  for (const std::string& stage : stegano::stage_order()) {
    add_common(app.add_subcommand(stage, "Run only the " + stage + " stage"));
  }

  CLI::App* schema =
      app.add_subcommand("schema", "Print the configuration schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (schema->parsed()) {
      std::cout << stegano::config_schema();
      return 0;
    }
    const stegano::ExperimentConfig cfg = resolve_config(opts);
    if (run->parsed()) {
      for (const auto& result :
           stegano::run_through(cfg, run_stage_name, opts.resume)) {
        print_result(result);
      }
      return 0;
    }
    for (const std::string& stage : stegano::stage_order()) {
      if (app.get_subcommand(stage)->parsed()) {
        print_result(stegano::run_stage(cfg, stage, opts.resume));
        return 0;
      }
    }
    std::cerr << "error: no subcommand selected\n";
    return 1;
  } catch (const stegano::Error& e) {
    std::cerr << "error [" << stegano::to_string(e.code()) << "]: " << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
