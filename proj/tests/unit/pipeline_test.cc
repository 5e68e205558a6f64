#include "ghosteval/pipeline.h"

#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "test_support.h"

namespace ghosteval {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::read_file;
using testing::TempDir;

PipelineConfig golden_config(const fs::path& output) {
  PipelineConfig config = PipelineConfig::load(testing::data_dir() / "golden" / "config.json");
  config.output_dir = output.string();
  config.baseline.max_order = 3;
  config.baseline.verses_per_point = 2;
  return config;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }
std::string second_line(const std::string& text) {
  const auto start = text.find('\n') + 1;
  return text.substr(start, text.find('\n', start) - start);
}

TEST(PipelineConfig, RejectsUnknownKeys) {
  EXPECT_THROW(PipelineConfig::from_json(R"({"corpus_root":"c","colour":1})"), Error);
  EXPECT_THROW(PipelineConfig::from_json(R"({"rhyme":{"window":3}})"), Error);
  EXPECT_THROW(PipelineConfig::from_json(R"({"artists":["a","a"]})"), Error);
  EXPECT_THROW(PipelineConfig::from_json(R"({"baseline":{"max_order":10}})"), Error);
  EXPECT_THROW(PipelineConfig::from_json("[1,2]"), Error);
  try {
    PipelineConfig::load("/nonexistent/config.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingInput);
  }
}

TEST(PipelineConfig, JsonRoundTripAndHash) {
  const PipelineConfig config = PipelineConfig::load(testing::data_dir() / "golden" / "config.json");
  const PipelineConfig back = PipelineConfig::from_json(config.to_json(), config.base_dir);
  EXPECT_EQ(back.to_json(), config.to_json());
  EXPECT_EQ(back.hash(), config.hash());
  EXPECT_EQ(config.hash().size(), 16u);

  PipelineConfig moved = config;
  moved.output_dir = "elsewhere";
  moved.service.port = 9999;
  EXPECT_EQ(moved.hash(), config.hash());
  PipelineConfig reseeded = config;
  reseeded.seed = 7;
  EXPECT_NE(reseeded.hash(), config.hash());
  EXPECT_EQ(reseeded.provenance(), "provenance: config=" + reseeded.hash() + " seed=7");
}

TEST(Pipeline, ExitCodesAndErrorLines) {
  EXPECT_EQ(exit_code_for(ErrorKind::kValidation), 1);
  EXPECT_EQ(exit_code_for(ErrorKind::kMissingInput), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::kMissingCheckpoint), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::kInternal), 3);
  EXPECT_EQ(error_line(ErrorKind::kMissingInput, "no file"),
            R"({"error":{"kind":"missing_input","message":"no file","exit_code":2}})");
}

TEST(Pipeline, MissingCheckpointDirectoryExitsWithTwo) {
  TempDir out("pipe");
  PipelineConfig config = golden_config(out.path());
  config.checkpoint_root = (out.path() / "absent").string();
  std::ostringstream stdout_text;
  std::ostringstream stderr_text;
  EXPECT_EQ(run("score", config, {}, stdout_text, stderr_text), 2);
  const json err = json::parse(first_line(stderr_text.str()));
  EXPECT_EQ(err["error"]["kind"], "missing_checkpoint");
  EXPECT_EQ(err["error"]["exit_code"], 2);
  EXPECT_NE(err["error"]["message"].get<std::string>().find("absent"), std::string::npos);
}

TEST(Pipeline, UnknownSubcommandIsAValidationError) {
  TempDir out("pipe");
  std::ostringstream o;
  std::ostringstream e;
  EXPECT_EQ(run("dance", golden_config(out.path()), {}, o, e), 1);
}

TEST(Pipeline, StagesWriteDocumentedArtifacts) {
  TempDir out("pipe");
  const PipelineConfig config = golden_config(out.path());
  std::ostringstream o;
  std::ostringstream e;
  for (const char* stage : {"ingest", "stats", "gen-baseline", "score", "regress", "pages"}) {
    ASSERT_EQ(run(stage, config, {}, o, e), 0) << stage << ": " << e.str();
  }
  const fs::path root = out.path();
  EXPECT_TRUE(fs::exists(root / "corpus" / "mc_aurora.json"));
  EXPECT_TRUE(fs::exists(root / "baseline" / "dj_basalt" / "n3_1.txt"));
  EXPECT_TRUE(fs::exists(root / "scores" / "kid_cinder_points.csv"));
  EXPECT_TRUE(fs::exists(root / "pages.json"));
  EXPECT_TRUE(fs::exists(root / "task_plan.json"));

  const std::string table1 = read_file(root / "table1_corpus_stats.csv");
  EXPECT_EQ(first_line(table1), "# " + config.provenance());
  EXPECT_EQ(second_line(table1), "artist,verses,unique_vocab,vocab_richness,avg_len,stdev_len,max_len");
  EXPECT_NE(table1.find("\nmc_aurora,20,"), std::string::npos);
  EXPECT_EQ(second_line(read_file(root / "table3_merged.csv")),
            "artist,avg_rhyme_density,baseline_similarity,baseline_n,lstm_similarity,lstm_iteration");

  // Five authentic verses per artist plus the three verses of the last
  // checkpoint window, one page each.
  const auto pages = pages_from_json(read_file(root / "pages.json"));
  EXPECT_EQ(pages.size(), 24u);

  // Without annotations the report still writes the corpus and structure tables.
  std::ostringstream warn;
  ASSERT_EQ(run("report", config, {}, o, warn), 0) << warn.str();
  EXPECT_NE(warn.str().find("no annotations"), std::string::npos);
  const std::string table5 = read_file(root / "table5_structure.csv");
  EXPECT_EQ(second_line(table5), "artist,max_len,checkpoint,percent_of_training");
  EXPECT_FALSE(fs::exists(root / "table2_style_match.csv"));
}

TEST(Pipeline, ReportConsumesTheServiceLog) {
  TempDir out("pipe");
  const PipelineConfig config = golden_config(out.path());
  std::ostringstream o;
  std::ostringstream e;
  ASSERT_EQ(run("pages", config, {}, o, e), 0) << e.str();
  const TaskPlan plan = TaskPlan::from_json(read_file(out.path() / "task_plan.json"));
  const Roster roster = testing::make_roster(3);
  {
    AnnotationService service(plan, roster, out.path() / "annotations.log");
    testing::simulate_annotators(service, roster, 5);
  }
  ASSERT_EQ(run("report", config, {}, o, e), 0) << e.str();
  for (const char* name : {"table2_style_match.csv", "fig3_confusion.csv", "line_scores.csv",
                           "table4a_metric_correlations.csv",
                           "table4b_covariate_correlations.csv"}) {
    const std::string text = read_file(out.path() / name);
    EXPECT_EQ(first_line(text), "# " + config.provenance()) << name;
  }
  EXPECT_EQ(second_line(read_file(out.path() / "table2_style_match.csv")),
            "artist,authentic_match_pct,authentic_match_a_pct,authentic_agreement_pct,"
            "generated_match_pct,generated_match_a_pct,generated_agreement_pct");
  EXPECT_EQ(second_line(read_file(out.path() / "table4a_metric_correlations.csv")),
            ",coherence,fluency,similarity,matching");
}

TEST(Pipeline, RhymeDensityCommandReadsVerseFiles) {
  TempDir out("pipe");
  const PipelineConfig config = golden_config(out.path());
  CommandOptions options;
  options.verse_files = {(testing::test_data_dir() / "golden_rhyme_verse.txt").string()};
  std::ostringstream o;
  std::ostringstream e;
  ASSERT_EQ(run("rhyme-density", config, options, o, e), 0) << e.str();
  EXPECT_EQ(o.str(), "0.175000\n");
}

}  // namespace
}  // namespace ghosteval
