// One test per acceptance criterion. A listener prints a PASS or FAIL line
// for each of them after the regular gtest output.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "ghosteval/annotation.h"
#include "ghosteval/evalmerge.h"
#include "ghosteval/ngram.h"
#include "ghosteval/pipeline.h"
#include "ghosteval/rhyme.h"
#include "ghosteval/service.h"
#include "ghosteval/similarity.h"
#include "test_support.h"

namespace ghosteval {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using testing::make_verse;
using testing::random_verse;
using testing::shipped_dictionary;

const std::map<std::string, std::string>& criteria() {
  static const std::map<std::string, std::string> names = {
      {"NGramOracleEquivalence", "n-gram oracle equivalence"},
      {"OverfitReproduction", "overfit reproduction"},
      {"SimilarityIdentities", "similarity identities"},
      {"EntropyWeighting", "entropy weighting"},
      {"RhymeGolden", "rhyme golden test"},
      {"RegressionMerge", "regression merge"},
      {"AnnotationFormulas", "annotation formulas"},
      {"PageConstruction", "page construction"},
      {"EndToEndDeterminism", "end-to-end determinism"},
  };
  return names;
}

class CriterionPrinter : public ::testing::EmptyTestEventListener {
 public:
  void OnTestEnd(const ::testing::TestInfo& info) override {
    const auto it = criteria().find(info.name());
    const std::string name = it == criteria().end() ? info.name() : it->second;
    lines_.push_back((info.result()->Passed() ? "PASS " : "FAIL ") + name);
  }
  void OnTestProgramEnd(const ::testing::UnitTest&) override {
    for (const auto& line : lines_) std::cout << line << "\n";
    std::cout.flush();
  }

 private:
  std::vector<std::string> lines_;
};

// Brute-force next-token counts: scan every framed sequence for the
// context, wildcarding the newest positions one at a time.
std::map<std::string, std::uint64_t> oracle_next(const std::vector<Verse>& verses, int order,
                                                 std::vector<std::string> context) {
  const std::size_t keep = static_cast<std::size_t>(order - 1);
  if (context.size() > keep) context.erase(context.begin(), context.end() - keep);
  auto counts_for = [&verses](const std::vector<std::string>& prefix, std::size_t gap) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& verse : verses) {
      const auto seq = frame_verse(verse);
      for (std::size_t t = 1; t < seq.size(); ++t) {
        if (t < prefix.size() + gap) continue;
        const std::size_t start = t - gap - prefix.size();
        bool match = true;
        for (std::size_t i = 0; i < prefix.size() && match; ++i) match = seq[start + i] == prefix[i];
        if (match) ++out[seq[t]];
      }
    }
    return out;
  };
  for (std::size_t gap = 0; gap < context.size(); ++gap) {
    auto counts = counts_for({context.begin(), context.end() - static_cast<std::ptrdiff_t>(gap)}, gap);
    if (!counts.empty()) return counts;
  }
  return counts_for({}, 0);
}

TEST(Acceptance, NGramOracleEquivalence) {
  const auto start = Clock::now();
  Rng rng(635);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Verse> verses;
    std::size_t tokens = 0;
    while (verses.size() < 6) {
      Verse v = random_verse(rng, "a", "v" + std::to_string(verses.size()),
                             3 + rng.uniform_index(8), 4, 8);
      if (tokens + v.token_count() > 200) break;
      tokens += v.token_count();
      verses.push_back(std::move(v));
    }
    ASSERT_FALSE(verses.empty());
    ASSERT_LE(tokens, 200u);
    const ArtistCorpus corpus("a", verses);
    for (int order = 1; order <= 6; ++order) {
      const NGramModel model = train(corpus, order);
      for (int probe = 0; probe < 10; ++probe) {
        std::vector<std::string> context = {std::string(kVerseStart)};
        // Half of the probes replay a training prefix so that deep levels answer.
        if (probe % 2 == 0) {
          const auto seq = frame_verse(verses[rng.uniform_index(verses.size())]);
          const std::size_t len = 1 + rng.uniform_index(seq.size() - 1);
          context.assign(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(len));
          if (rng.uniform_index(2) == 0) context.back() = "unseen";
        } else {
          for (std::size_t i = rng.uniform_index(6); i > 0; --i) {
            context.push_back("w" + std::to_string(rng.uniform_index(12)));
          }
        }
        const auto expected = oracle_next(verses, order, context);
        const auto got = next_token_distribution(model, context);
        std::uint64_t total = 0;
        for (const auto& [token, count] : expected) total += count;
        ASSERT_EQ(got.total, total);
        ASSERT_EQ(got.tokens.size(), expected.size());
        for (const auto& [token, count] : expected) {
          ASSERT_NEAR(got.probability(token),
                      static_cast<double>(count) / static_cast<double>(total), 1e-12);
        }
      }
    }
  }
  EXPECT_LT(Clock::now() - start, std::chrono::seconds(5));
}

std::string as_text(const std::vector<Line>& lines) {
  std::string out;
  for (const auto& line : lines) {
    for (std::size_t i = 0; i < line.size(); ++i) out += (i ? " " : "") + line[i];
    out += "\n";
  }
  return out;
}

TEST(Acceptance, OverfitReproduction) {
  const ArtistCorpus golden = load_artist_directory(
      testing::data_dir() / "golden" / "corpus" / "mc_aurora", CleaningRules::defaults(),
      "mc_aurora");
  for (const auto& verse : golden.verses()) {
    const NGramModel model = train(ArtistCorpus("mc_aurora", {verse}), 9);
    GenerateOptions options;
    options.greedy = true;
    EXPECT_EQ(as_text(generate_verse(model, options).lines), as_text(verse.lines));
  }
}

double oracle_cosine(const std::vector<Verse>& training, const Verse& a, const Verse& b) {
  std::map<std::string, std::size_t> df;
  for (const auto& v : training) {
    std::set<std::string> seen;
    for (const auto& t : v.tokens()) seen.insert(t);
    for (const auto& t : seen) ++df[t];
  }
  const double n = static_cast<double>(training.size());
  auto weights = [&](const Verse& v) {
    std::map<std::string, double> w;
    for (const auto& t : v.tokens()) {
      if (df.contains(t)) w[t] += 1.0;
    }
    for (auto& [t, f] : w) f *= std::log(n / static_cast<double>(df[t]));
    return w;
  };
  const auto wa = weights(a);
  const auto wb = weights(b);
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [t, x] : wa) {
    na += x * x;
    if (auto it = wb.find(t); it != wb.end()) dot += x * it->second;
  }
  for (const auto& [t, y] : wb) nb += y * y;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

TEST(Acceptance, SimilarityIdentities) {
  Rng rng(637);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Verse> training;
    const std::size_t count = 2 + rng.uniform_index(49);
    for (std::size_t i = 0; i < count; ++i) {
      training.push_back(random_verse(rng, "a", "t" + std::to_string(i), 40, 4, 8));
    }
    const auto index = TfIdfIndex::build(training);
    const Verse candidate = random_verse(rng, "a", "c", 50, 4, 8);
    double best = 0.0;
    for (const auto& t : training) best = std::max(best, oracle_cosine(training, candidate, t));
    EXPECT_NEAR(max_similarity(index, candidate).score, best, 1e-12);
    for (const auto& t : training) {
      if (index.vectorize(t).is_zero()) continue;
      EXPECT_NEAR(max_similarity(index, t).score, 1.0, 1e-9);
    }
    const Verse disjoint = make_verse("b", "d", "zebra quartz\nvolcano");
    EXPECT_EQ(max_similarity(index, disjoint).score, 0.0);
  }
}

TEST(Acceptance, EntropyWeighting) {
  EXPECT_EQ(entropy_weight(make_verse("t", "1", "yo")), 0.0);
  EXPECT_EQ(entropy_weight(make_verse("t", "1", "yo yo yo")), 0.0);
  EXPECT_NEAR(entropy_weight(make_verse("t", "1", "every token here is distinct")), 1.0, 1e-12);
  EXPECT_NEAR(entropy_weight(make_verse("t", "1", "a a b c")), 0.75, 1e-12);
  std::string text;
  for (int l = 0; l < 6; ++l) text += "yeah yeah yeah yeah yeah yeah yeah yeah yeah yeah\n";
  text += "uh\n";
  const auto r = detect_rhymes(make_verse("t", "rep", text), shipped_dictionary());
  EXPECT_GT(r.density, 0.5);
  EXPECT_LT(r.weighted_density, 0.05);
}

Verse fixture_verse(const std::string& name) {
  return make_verse("t", name, testing::read_file(testing::test_data_dir() / name));
}

TEST(Acceptance, RhymeGolden) {
  const auto golden = detect_rhymes(fixture_verse("golden_rhyme_verse.txt"), shipped_dictionary());
  EXPECT_EQ(golden.rhymed_syllables, 14u);
  EXPECT_EQ(golden.total_syllables, 80u);
  EXPECT_EQ(golden.density, 14.0 / 80.0);

  const Verse footnotes = fixture_verse("footnote_lines.txt");
  const auto r = detect_rhymes(footnotes, shipped_dictionary());
  auto word = [&](std::size_t slot) {
    const auto& s = r.syllables[slot];
    return footnotes.lines[s.line][s.token];
  };
  std::set<std::string> found;
  for (const auto& p : r.rhyme_pairs) {
    found.insert(word(p.first) + "/" + word(p.second) + "/" + std::to_string(p.length));
  }
  EXPECT_TRUE(found.contains("city/gritty/2")) << "internal rhyme, first footnote line";
  EXPECT_TRUE(found.contains("salivated/calibrated/4")) << "internal rhyme, second line";
  EXPECT_TRUE(found.contains("stolen/swollen/3")) << "polysyllabic rhyme across lines";
}

TEST(Acceptance, RegressionMerge) {
  std::vector<CheckpointPoint> series;
  for (int x = 0; x <= 100; x += 10) {
    series.push_back({static_cast<double>(x), 0.01 * x, 0.05 * x, {}});
  }
  const auto m = merged_similarity(series, 0.5);
  EXPECT_NEAR(m.intersection_x, 50.0, 1e-12);
  EXPECT_NEAR(m.similarity_at_target, 2.5, 1e-12);

  std::vector<CheckpointPoint> above;
  for (int x = 0; x <= 16000; x += 2000) {
    above.push_back({static_cast<double>(x), 0.30 + 0.000005 * x, 0.2 + 0.00001 * x, {}});
  }
  const auto negative = merged_similarity(above, 0.28);
  EXPECT_LT(negative.intersection_x, 0.0);
  EXPECT_NEAR(negative.intersection_x, -4000.0, 1e-6);
}

TEST(Acceptance, AnnotationFormulas) {
  std::string text;
  for (int i = 0; i < 10; ++i) text += "line " + std::to_string(i) + "\n";
  const Verse verse = make_verse("a", "v", text);
  std::vector<LineAnnotation> records;
  for (int k = 0; k < 20; ++k) {
    const Label label = k < 10 ? Label::kStrong : k < 16 ? Label::kWeak : Label::kNone;
    records.push_back({LineTask::kFluency, "v", static_cast<std::size_t>(k / 2),
                       k % 2 ? "y" : "x", label, ""});
  }
  EXPECT_EQ(fluency_score(records, verse), 0.65);

  std::vector<StyleMatchPage> pages;
  std::vector<StyleMatchAnnotation> notes;
  for (int p = 0; p < 20; ++p) {
    StyleMatchPage page;
    page.page_id = "p" + std::to_string(p);
    page.target_artist = "tupac";
    page.choices = {{"t", "tupac"}, {"b", "b"}, {"c", "c"}, {"d", "d"}};
    pages.push_back(page);
    notes.push_back({page.page_id, "x", static_cast<std::size_t>(p < 14 ? 0 : 1), ""});
    notes.push_back({page.page_id, "y", 1, ""});
  }
  const auto stats = match_stats(pages, notes);
  EXPECT_EQ(stats.tally.a, 40);
  EXPECT_EQ(stats.tally.m, 14);
  EXPECT_EQ(stats.match_pct, 35.0);
  EXPECT_EQ(std::llround(stats.match_pct * static_cast<double>(stats.tally.a) / 100.0), 14);

  Rng rng(641);
  std::map<std::string, std::vector<Verse>> pools;
  std::vector<Verse> eval;
  for (int a = 0; a < 7; ++a) {
    const std::string artist = "artist" + std::to_string(a);
    for (int v = 0; v < 4; ++v) {
      std::string words;
      for (int t = 0; t < 45; ++t) words += artist + "w" + std::to_string(t) + " ";
      pools[artist].push_back(make_verse(artist, artist + ":" + std::to_string(v), words));
    }
    eval.push_back(pools[artist][0]);
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto random_pages = build_style_pages(eval, pools, rng.uniform_index(1u << 30));
    std::vector<StyleMatchAnnotation> picks;
    for (const auto& p : random_pages) {
      for (const char* who : {"x", "y"}) {
        picks.push_back({p.page_id, who, rng.uniform_index(p.choices.size()), ""});
      }
    }
    const auto m = confusion_matrix(random_pages, picks);
    for (std::size_t i = 0; i < m.artists.size(); ++i) {
      for (std::size_t j = 0; j < m.artists.size(); ++j) {
        ASSERT_EQ(m.values[i][j], m.values[j][i]);
      }
    }
  }
}

TEST(Acceptance, PageConstruction) {
  std::map<std::string, std::vector<Verse>> pools;
  std::vector<Verse> eval;
  for (int a = 0; a < 13; ++a) {
    const std::string artist = "artist" + std::to_string(a);
    for (int v = 0; v < 10; ++v) {
      std::string words;
      for (int t = 0; t < 45; ++t) words += "w" + std::to_string(t) + " ";
      pools[artist].push_back(make_verse(artist, artist + ":" + std::to_string(v), words));
    }
    for (int v = 0; v < 5; ++v) eval.push_back(pools[artist][static_cast<std::size_t>(v)]);
  }
  const auto start = Clock::now();
  const auto pages = build_style_pages(eval, pools, 42);
  EXPECT_LT(Clock::now() - start, std::chrono::seconds(1));
  ASSERT_EQ(pages.size(), 260u);
  std::map<std::string, std::multiset<std::string>> distractors;
  std::map<std::string, std::string> target_of;
  for (const auto& p : pages) {
    target_of[p.eval_verse_id] = p.target_artist;
    for (const auto& c : p.choices) {
      if (c.artist_id != p.target_artist) distractors[p.eval_verse_id].insert(c.artist_id);
    }
  }
  ASSERT_EQ(distractors.size(), 65u);
  for (const auto& [eval_id, seen] : distractors) {
    std::multiset<std::string> expected;
    for (const auto& [artist, pool] : pools) {
      if (artist != target_of[eval_id]) expected.insert(artist);
    }
    EXPECT_EQ(seen, expected) << eval_id;
  }
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), root).string()] = testing::read_file(entry.path());
    }
  }
  return files;
}

void run_golden(const fs::path& output) {
  PipelineConfig config = PipelineConfig::load(testing::data_dir() / "golden" / "config.json");
  config.output_dir = output.string();
  std::ostringstream out;
  std::ostringstream err;
  for (const char* stage : {"ingest", "stats", "gen-baseline", "score", "regress", "pages"}) {
    ASSERT_EQ(run(stage, config, {}, out, err), 0) << stage << ": " << err.str();
  }
  const TaskPlan plan = TaskPlan::from_json(testing::read_file(output / "task_plan.json"));
  const Roster roster =
      Roster::from_json(testing::read_file(testing::data_dir() / "golden" / "roster.json"));
  {
    AnnotationService service(plan, roster, output / "annotations.log",
                              [] { return std::string("2026-01-01T00:00:00.000Z"); });
    testing::simulate_annotators(service, roster, config.seed);
    testing::write_file(output / "annotations.jsonl", service.export_jsonl());
  }
  ASSERT_EQ(run("report", config, {}, out, err), 0) << err.str();
}

TEST(Acceptance, EndToEndDeterminism) {
  testing::TempDir first("e2e");
  testing::TempDir second("e2e");
  for (const auto* dir : {&first, &second}) {
    const auto start = Clock::now();
    run_golden(dir->path());
    EXPECT_LT(Clock::now() - start, std::chrono::seconds(60));
  }
  const auto a = snapshot(first.path());
  const auto b = snapshot(second.path());
  for (const char* required :
       {"table1_corpus_stats.csv", "table2_style_match.csv", "table3_merged.csv",
        "table4a_metric_correlations.csv", "table4b_covariate_correlations.csv",
        "table5_structure.csv", "fig3_confusion.csv", "line_scores.csv"}) {
    EXPECT_TRUE(a.contains(required)) << required;
  }
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [name, content] : a) {
    ASSERT_TRUE(b.contains(name)) << name;
    EXPECT_TRUE(b.at(name) == content) << name << " differs between runs";
  }
}

}  // namespace
}  // namespace ghosteval

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  ::testing::UnitTest::GetInstance()->listeners().Append(new ghosteval::CriterionPrinter);
  return RUN_ALL_TESTS();
}
