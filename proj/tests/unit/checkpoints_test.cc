#include "ghosteval/checkpoints.h"

#include <gtest/gtest.h>

#include "ghosteval/error.h"
#include "ghosteval/random.h"
#include "test_support.h"

namespace ghosteval {
namespace {

using testing::make_verse;
using testing::shipped_dictionary;
using testing::TempDir;
using testing::write_file;

ArtistCorpus small_corpus() {
  return ArtistCorpus(
      "a", {make_verse("a", "s:0", "the night is long and the city is cold\nwe ride at dawn"),
            make_verse("a", "s:1", "money on my mind\nand the time is right"),
            make_verse("a", "s:2", "light in the street\nbeat on repeat")});
}

TEST(CheckpointWindows, DefaultCentresAndOffsets) {
  const CheckpointWindows w;
  const auto centres = w.centres();
  ASSERT_EQ(centres.size(), 9u);
  EXPECT_EQ(centres.front(), 0);
  EXPECT_EQ(centres.back(), 16000);
  EXPECT_EQ(w.window_for(2000), 2000);
  EXPECT_EQ(w.window_for(1600), 2000);
  EXPECT_EQ(w.window_for(2400), 2000);
  EXPECT_EQ(w.window_for(100), 0);
  EXPECT_FALSE(w.window_for(2050).has_value());
  EXPECT_FALSE(w.window_for(2500).has_value());
}

TEST(CheckpointFiles, FilenamesParse) {
  EXPECT_EQ(parse_checkpoint_filename("iter_2100.txt"), 2100);
  EXPECT_EQ(parse_checkpoint_filename("iter_0.txt"), 0);
  EXPECT_FALSE(parse_checkpoint_filename("iter_.txt").has_value());
  EXPECT_FALSE(parse_checkpoint_filename("iter_12a.txt").has_value());
  EXPECT_FALSE(parse_checkpoint_filename("iter_-5.txt").has_value());
  EXPECT_FALSE(parse_checkpoint_filename("notes.txt").has_value());
}

TEST(CheckpointFiles, VerseKeepsLinesAndIteration) {
  const Verse v = parse_checkpoint_verse("one two\n\n  three  \n", "a", 300);
  ASSERT_EQ(v.lines.size(), 2u);
  EXPECT_EQ(v.lines[1], (Line{"three"}));
  EXPECT_EQ(v.provenance, Provenance::generated(300));
  EXPECT_EQ(v.verse_id, "a/iter_300");
}

TEST(ExternalCheckpoints, AveragesEachWindow) {
  TempDir dir("ckpt");
  CheckpointWindows windows;
  windows.last = 2000;
  write_file(dir.path() / "iter_0.txt", "the night is long\nwe ride at dawn");
  write_file(dir.path() / "iter_100.txt", "money on my mind");
  write_file(dir.path() / "iter_1900.txt", "light in the street");
  write_file(dir.path() / "iter_5000.txt", "ignored verse here");
  write_file(dir.path() / "readme.md", "not a checkpoint");
  const ArtistCorpus corpus = small_corpus();
  const auto index = TfIdfIndex::build(corpus.verses());
  const Scorer scorer{index, shipped_dictionary(), {}, EntropyNormalization::kLogTokenCount};
  const auto out = load_external_checkpoints(dir.path(), "a", scorer, windows);
  ASSERT_EQ(out.points.size(), 2u);
  EXPECT_EQ(out.points[0].x, 0.0);
  EXPECT_EQ(out.points[0].verse_refs.size(), 2u);
  EXPECT_EQ(out.points[1].verse_refs.size(), 1u);
  EXPECT_EQ(out.warnings.size(), 1u);
  EXPECT_EQ(out.verses.size(), 4u);

  const VerseScore a = scorer.score(out.verses[0]);
  const VerseScore b = scorer.score(out.verses[1]);
  EXPECT_DOUBLE_EQ(out.points[0].avg_rhyme_density,
                   (a.weighted_rhyme_density + b.weighted_rhyme_density) / 2.0);
  EXPECT_DOUBLE_EQ(out.points[0].avg_max_similarity,
                   (a.max_similarity + b.max_similarity) / 2.0);
}

TEST(ExternalCheckpoints, EmptyWindowNamesTheIteration) {
  TempDir dir("ckpt");
  write_file(dir.path() / "iter_0.txt", "the night is long");
  const ArtistCorpus corpus = small_corpus();
  const auto index = TfIdfIndex::build(corpus.verses());
  const Scorer scorer{index, shipped_dictionary(), {}, EntropyNormalization::kLogTokenCount};
  try {
    load_external_checkpoints(dir.path(), "a", scorer);
    FAIL() << "expected a missing checkpoint";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingCheckpoint);
    EXPECT_NE(std::string(e.what()).find("2000"), std::string::npos);
  }
  try {
    load_external_checkpoints(dir.path() / "absent", "a", scorer);
    FAIL() << "expected missing input";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingInput);
  }
}

TEST(BaselineSuite, OnePointPerOrderWithSeededVerses) {
  const ArtistCorpus corpus = small_corpus();
  const auto index = TfIdfIndex::build(corpus.verses());
  const Scorer scorer{index, shipped_dictionary(), {}, EntropyNormalization::kLogTokenCount};
  BaselineOptions options;
  options.max_order = 4;
  options.verses_per_point = 3;
  const auto suite = baseline_checkpoint_suite(corpus, scorer, options);
  ASSERT_EQ(suite.points.size(), 4u);
  ASSERT_EQ(suite.verses.size(), 12u);
  EXPECT_EQ(suite.verses[4].verse_id, "baseline/n2/1");
  for (std::size_t p = 0; p < suite.points.size(); ++p) {
    EXPECT_EQ(suite.points[p].x, static_cast<double>(p + 1));
    EXPECT_GE(suite.points[p].avg_max_similarity, 0.0);
    EXPECT_LE(suite.points[p].avg_max_similarity, 1.0 + 1e-12);
  }
  const NGramModel model = train(corpus, 2);
  EXPECT_EQ(baseline_verse(model, options.seed, 1).lines, suite.verses[4].lines);

  const auto again = baseline_checkpoint_suite(corpus, scorer, options);
  for (std::size_t i = 0; i < suite.verses.size(); ++i) {
    EXPECT_EQ(suite.verses[i].lines, again.verses[i].lines);
  }
}

TEST(Scorer, UnpronounceableVerseScoresZeroDensity) {
  const ArtistCorpus corpus = small_corpus();
  const auto index = TfIdfIndex::build(corpus.verses());
  const Scorer scorer{index, shipped_dictionary(), {}, EntropyNormalization::kLogTokenCount};
  EXPECT_EQ(scorer.score(make_verse("a", "p", "... !!")).weighted_rhyme_density, 0.0);
  EXPECT_THROW(scorer.aggregate(1.0, {}), Error);
}

}  // namespace
}  // namespace ghosteval
