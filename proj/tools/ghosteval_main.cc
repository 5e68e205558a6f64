#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ghosteval/pipeline.h"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> dictionary;
  std::optional<std::string> checkpoint_root;
  std::optional<int> port;
  std::optional<std::string> annotations;
  bool literal_entropy = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation toolkit for style-imitating verse generation"};
  app.require_subcommand(1);

  Overrides ov;
  ghosteval::CommandOptions options;
  app.add_option("-c,--config", ov.config_path, "pipeline config JSON");
  app.add_option("-o,--output", ov.output, "override output_dir");
  app.add_option("--seed", ov.seed, "override seed");
  app.add_option("--dict", ov.dictionary, "override pronouncing dictionary");
  app.add_option("--checkpoints", ov.checkpoint_root, "override checkpoint_root");
  app.add_option("--annotations", ov.annotations, "override annotations JSONL");

  app.add_subcommand("ingest", "write per-artist corpus manifests");
  app.add_subcommand("stats", "write corpus statistics");
  auto* gen = app.add_subcommand("gen-baseline", "generate n-gram baseline verses");
  gen->add_option("--artist", options.artists, "artist id (repeatable)");
  gen->add_option("--n", options.order, "single n-gram order")->check(CLI::Range(1, 9));
  gen->add_option("--seed", ov.seed, "override seed");
  gen->add_option("--count", options.count, "verses per order")->check(CLI::PositiveNumber);
  app.add_subcommand("score", "score baseline and checkpoint series");
  app.add_subcommand("regress", "fit regression lines and write the merged table");
  app.add_subcommand("pages", "build style-matching pages and the task plan");
  auto* serve = app.add_subcommand("serve", "run the annotation service");
  serve->add_option("--port", ov.port, "override service port");
  app.add_subcommand("report", "write every report table");
  auto* sim = app.add_subcommand("score-similarity", "max tf-idf similarity per verse");
  sim->add_option("--index", options.index_artist, "artist whose verses form the index")
      ->required();
  sim->add_option("--verse", options.verse_files, "verse file (repeatable)")->required();
  auto* rd = app.add_subcommand("rhyme-density", "rhyme density per verse");
  rd->add_option("--verse", options.verse_files, "verse file (repeatable)")->required();
  rd->add_flag("--weighted", options.weighted, "apply entropy weighting");
  rd->add_flag("--literal-entropy", ov.literal_entropy,
               "normalize entropy by token count instead of its log");

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  ghosteval::PipelineConfig config;
  try {
    if (!ov.config_path.empty()) {
      config = ghosteval::PipelineConfig::load(ov.config_path);
    } else if (subcommand == "rhyme-density") {
      config.dictionary = GHOSTEVAL_DEFAULT_DICTIONARY;
    } else {
      throw ghosteval::Error(ghosteval::ErrorKind::kValidation,
                             "--config is required for " + subcommand);
    }
  } catch (const ghosteval::Error& e) {
    std::cerr << ghosteval::error_line(e.kind(), e.what()) << std::endl;
    return ghosteval::exit_code_for(e.kind());
  }
  // Paths given on the command line are relative to the working directory.
  auto absolute = [](const std::string& p) { return std::filesystem::absolute(p).string(); };
  if (ov.output) config.output_dir = absolute(*ov.output);
  if (ov.seed) config.seed = *ov.seed;
  if (ov.dictionary) config.dictionary = absolute(*ov.dictionary);
  if (ov.checkpoint_root) config.checkpoint_root = absolute(*ov.checkpoint_root);
  if (ov.port) config.service.port = *ov.port;
  if (ov.annotations) config.annotations = absolute(*ov.annotations);
  if (ov.literal_entropy) {
    config.normalization = ghosteval::EntropyNormalization::kTokenCount;
  }
  return ghosteval::run(subcommand, config, options, std::cout, std::cerr);
}
