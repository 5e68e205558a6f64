#include "ghosteval/annotation.h"

#include <gtest/gtest.h>

#include <chrono>
#include <set>

#include "ghosteval/error.h"
#include "ghosteval/random.h"
#include "test_support.h"

namespace ghosteval {
namespace {

using testing::make_verse;

Verse long_verse(const std::string& artist, const std::string& id, std::size_t tokens = 45) {
  std::string text;
  for (std::size_t i = 0; i < tokens; ++i) {
    text += artist + "_" + std::to_string(i) + (i % 9 == 8 ? "\n" : " ");
  }
  return make_verse(artist, id, text);
}

struct Fixture {
  std::vector<Verse> eval;
  std::map<std::string, std::vector<Verse>> pools;
};

Fixture artists(std::size_t count, std::size_t eval_per_artist, std::size_t pool_size) {
  Fixture f;
  for (std::size_t a = 0; a < count; ++a) {
    const std::string artist = "artist" + std::to_string(a);
    for (std::size_t v = 0; v < pool_size; ++v) {
      f.pools[artist].push_back(long_verse(artist, artist + ":" + std::to_string(v)));
    }
    for (std::size_t v = 0; v < eval_per_artist; ++v) f.eval.push_back(f.pools[artist][v]);
  }
  return f;
}

std::vector<LineAnnotation> labels(const Verse& verse, LineTask task,
                                   const std::vector<Label>& values) {
  std::vector<LineAnnotation> out;
  const std::size_t first = task == LineTask::kCoherence ? 1 : 0;
  std::size_t k = 0;
  for (std::size_t line = first; line < verse.lines.size(); ++line) {
    for (int who = 0; who < 2; ++who) {
      LineAnnotation r;
      r.task = task;
      r.verse_id = verse.verse_id;
      r.line_index = line;
      r.annotator_id = who == 0 ? "x" : "y";
      r.label = values[k++];
      out.push_back(r);
    }
  }
  return out;
}

Verse ten_lines() {
  std::string text;
  for (int i = 0; i < 10; ++i) text += "line number " + std::to_string(i) + "\n";
  return make_verse("a", "ten", text);
}

TEST(LineScore, PublishedWorkedCase) {
  // 10 strong, 6 weak and 4 none labels over a 10-line verse.
  std::vector<Label> values;
  values.insert(values.end(), 10, Label::kStrong);
  values.insert(values.end(), 6, Label::kWeak);
  values.insert(values.end(), 4, Label::kNone);
  const Verse verse = ten_lines();
  EXPECT_EQ(fluency_score(labels(verse, LineTask::kFluency, values), verse), 0.65);
}

TEST(LineScore, Extremes) {
  const Verse verse = ten_lines();
  EXPECT_EQ(fluency_score(labels(verse, LineTask::kFluency,
                                 std::vector<Label>(20, Label::kStrong)), verse),
            1.0);
  EXPECT_EQ(fluency_score(labels(verse, LineTask::kFluency,
                                 std::vector<Label>(20, Label::kNone)), verse),
            0.0);
}

TEST(LineScore, CoherenceSkipsTheFirstLine) {
  const Verse verse = ten_lines();
  auto records = labels(verse, LineTask::kCoherence, std::vector<Label>(18, Label::kWeak));
  EXPECT_EQ(coherence_score(records, verse), 0.5);
  LineAnnotation first = records.front();
  first.line_index = 0;
  records.push_back(first);
  EXPECT_THROW(coherence_score(records, verse), Error);
}

TEST(LineScore, MissingLinesAreListed) {
  const Verse verse = ten_lines();
  auto records = labels(verse, LineTask::kFluency, std::vector<Label>(20, Label::kStrong));
  records.erase(records.begin() + 6);  // line 3, second annotator
  try {
    fluency_score(records, verse);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIncompleteAnnotation);
    EXPECT_NE(std::string(e.what()).find("lines: 3"), std::string::npos);
  }
}

TEST(LineScore, StrongerLabelNeverLowersTheScore) {
  Rng rng(8);
  const Verse verse = ten_lines();
  const Label all[] = {Label::kStrong, Label::kWeak, Label::kNone};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Label> values;
    for (int i = 0; i < 20; ++i) values.push_back(all[rng.uniform_index(3)]);
    const double before = fluency_score(labels(verse, LineTask::kFluency, values), verse);
    EXPECT_GE(before, 0.0);
    EXPECT_LE(before, 1.0);
    values[rng.uniform_index(20)] = Label::kStrong;
    EXPECT_GE(fluency_score(labels(verse, LineTask::kFluency, values), verse), before);
  }
}

TEST(RepetitionRule, RepeatedLineBecomesNotCoherentIdempotently) {
  const Verse verse = make_verse("a", "rep", "same words here\nsame words here\nnew line now");
  const auto records = labels(verse, LineTask::kCoherence, std::vector<Label>(4, Label::kStrong));
  const auto once = apply_repetition_rule(records, verse);
  EXPECT_EQ(once[0].label, Label::kNone);
  EXPECT_EQ(once[1].label, Label::kNone);
  EXPECT_EQ(once[2].label, Label::kStrong);
  const auto twice = apply_repetition_rule(once, verse);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(once[i].label, twice[i].label);
  EXPECT_EQ(coherence_score(records, verse), 0.5);
}

TEST(RawIaa, SmallCases) {
  const Verse verse = make_verse("a", "v", "one\ntwo\nthree");
  auto records = labels(verse, LineTask::kFluency,
                        {Label::kStrong, Label::kStrong, Label::kWeak, Label::kWeak,
                         Label::kNone, Label::kWeak});
  EXPECT_NEAR(raw_iaa(records), 2.0 / 3.0, 1e-9);
  records.pop_back();
  EXPECT_THROW(raw_iaa(records), Error);
}

TEST(RawIaa, SimulatedStreamsAtThePublishedRate) {
  Rng rng(67);
  std::string text;
  for (int i = 0; i < 4000; ++i) text += "w\n";
  const Verse verse = make_verse("a", "long", text);
  std::vector<Label> values;
  for (int i = 0; i < 4000; ++i) {
    const Label first = static_cast<Label>(rng.uniform_index(3));
    Label second = first;
    if (rng.uniform01() >= 0.67) second = static_cast<Label>((static_cast<int>(first) + 1) % 3);
    values.push_back(first);
    values.push_back(second);
  }
  EXPECT_NEAR(raw_iaa(labels(verse, LineTask::kFluency, values)), 0.67, 0.02);
}

StyleMatchPage page(const std::string& id, const std::string& target, std::size_t target_index,
                    const std::vector<std::string>& choice_artists, bool generated = false) {
  StyleMatchPage p;
  p.page_id = id;
  p.eval_verse_id = target + ":eval";
  p.target_artist = target;
  p.generated = generated;
  p.target_choice_index = target_index;
  for (const auto& a : choice_artists) p.choices.push_back({a + ":v", a});
  return p;
}

StyleMatchAnnotation pick(const std::string& page, const std::string& who, std::size_t index) {
  return {page, who, index, ""};
}

TEST(MatchStats, PublishedMatchPercentRoundTrips) {
  // 20 pages, 40 annotations, 14 of them on the target.
  std::vector<StyleMatchPage> pages;
  std::vector<StyleMatchAnnotation> notes;
  int correct = 0;
  for (int p = 0; p < 20; ++p) {
    const std::string id = "p" + std::to_string(p);
    pages.push_back(page(id, "tupac", 0, {"tupac", "b", "c", "d"}));
    for (const char* who : {"x", "y"}) {
      notes.push_back(pick(id, who, correct < 14 ? 0 : 1));
      ++correct;
    }
  }
  const auto stats = match_stats(pages, notes);
  EXPECT_EQ(stats.tally.a, 40);
  EXPECT_EQ(stats.tally.m, 14);
  EXPECT_EQ(stats.match_pct, 35.0);
  EXPECT_EQ(stats.tally.s_a, 20);
  EXPECT_EQ(stats.tally.m_a, 7);
  EXPECT_EQ(*stats.match_agreed_pct, 35.0);
  EXPECT_EQ(std::llround(35.0 * 40 / 100.0), 14);
}

TEST(MatchStats, NoAgreementLeavesMatchAUndefined) {
  const std::vector<StyleMatchPage> pages = {page("p", "a", 0, {"a", "b", "c", "d"})};
  const auto stats = match_stats(pages, {pick("p", "x", 0), pick("p", "y", 1)});
  EXPECT_FALSE(stats.match_agreed_pct.has_value());
  EXPECT_EQ(stats.agreement_pct, 0.0);
  EXPECT_THROW(match_stats(pages, {pick("p", "x", 0)}), Error);
}

TEST(MatchStats, ChoicePermutationLeavesStatisticsUnchanged) {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<StyleMatchPage> pages;
    std::vector<StyleMatchAnnotation> notes;
    std::vector<StyleMatchPage> permuted;
    std::vector<StyleMatchAnnotation> permuted_notes;
    for (int p = 0; p < 8; ++p) {
      const std::string id = "p" + std::to_string(p);
      const std::size_t target = rng.uniform_index(4);
      std::vector<std::string> names = {"b", "c", "d"};
      names.insert(names.begin() + static_cast<std::ptrdiff_t>(target), "a");
      pages.push_back(page(id, "a", target, names));
      std::vector<std::size_t> order = {0, 1, 2, 3};
      rng.shuffle(order);
      std::vector<std::string> shuffled(4);
      std::vector<std::size_t> where(4);
      for (std::size_t i = 0; i < 4; ++i) {
        shuffled[i] = names[order[i]];
        where[order[i]] = i;
      }
      permuted.push_back(page(id, "a", where[target], shuffled));
      for (const char* who : {"x", "y"}) {
        const std::size_t c = rng.uniform_index(4);
        notes.push_back(pick(id, who, c));
        permuted_notes.push_back(pick(id, who, where[c]));
      }
    }
    const auto a = match_stats(pages, notes);
    const auto b = match_stats(permuted, permuted_notes);
    EXPECT_EQ(a.match_pct, b.match_pct);
    EXPECT_EQ(a.match_agreed_pct, b.match_agreed_pct);
    EXPECT_EQ(a.agreement_pct, b.agreement_pct);
    std::reverse(permuted.begin(), permuted.end());
    EXPECT_EQ(match_stats(permuted, permuted_notes).match_pct, a.match_pct);
  }
}

TEST(Confusion, HandCountedCase) {
  // b is shown on four of a's pages and chosen twice; a never appears on b's pages.
  std::vector<StyleMatchPage> pages;
  std::vector<StyleMatchAnnotation> notes;
  for (int p = 0; p < 4; ++p) {
    pages.push_back(page("p" + std::to_string(p), "a", 0, {"a", "b", "c", "d"}));
  }
  for (int p = 0; p < 4; ++p) {
    const std::string id = "p" + std::to_string(p);
    notes.push_back(pick(id, "x", p < 2 ? 1 : 0));
    notes.push_back(pick(id, "y", 0));
  }
  const auto m = confusion_matrix(pages, notes);
  EXPECT_EQ(m.tally.presented.at({"a", "b"}), 4);
  EXPECT_EQ(m.tally.chosen.at({"a", "b"}), 2);
  EXPECT_EQ(*m.at("a", "b"), 0.5);
  EXPECT_EQ(*m.at("b", "a"), 0.5);
  EXPECT_EQ(*m.at("a", "c"), 0.0);
  EXPECT_FALSE(m.at("a", "a").has_value());
  EXPECT_FALSE(m.at("b", "c").has_value());
}

TEST(Confusion, AlwaysCorrectGivesZeroOffDiagonal) {
  const Fixture f = artists(4, 1, 3);
  PageLayout layout;
  const auto pages = build_style_pages(f.eval, f.pools, 1, layout);
  std::vector<StyleMatchAnnotation> notes;
  for (const auto& p : pages) {
    notes.push_back(pick(p.page_id, "x", p.target_choice_index));
    notes.push_back(pick(p.page_id, "y", p.target_choice_index));
  }
  const auto m = confusion_matrix(pages, notes);
  for (std::size_t i = 0; i < m.artists.size(); ++i) {
    for (std::size_t j = 0; j < m.artists.size(); ++j) {
      if (i != j) {
        EXPECT_EQ(m.values[i][j], 0.0);
      }
    }
  }
}

TEST(Confusion, SymmetricOnRandomAnnotationSets) {
  Rng rng(100);
  const Fixture f = artists(7, 2, 8);
  for (int trial = 0; trial < 100; ++trial) {
    PageLayout layout;
    layout.distractors_per_page = 1 + rng.uniform_index(2) * 2;  // 1 or 3
    const auto pages = build_style_pages(f.eval, f.pools, rng.uniform_index(1000), layout);
    std::vector<StyleMatchAnnotation> notes;
    for (const auto& p : pages) {
      for (const char* who : {"x", "y"}) {
        notes.push_back(pick(p.page_id, who, rng.uniform_index(p.choices.size())));
      }
    }
    const auto m = confusion_matrix(pages, notes);
    for (std::size_t i = 0; i < m.artists.size(); ++i) {
      EXPECT_FALSE(m.values[i][i].has_value());
      for (std::size_t j = 0; j < m.artists.size(); ++j) {
        ASSERT_EQ(m.values[i][j], m.values[j][i]);
        if (m.values[i][j]) {
          EXPECT_GE(*m.values[i][j], 0.0);
          EXPECT_LE(*m.values[i][j], 2.0);
        }
      }
    }
    for (const auto& [a, b] : m.flagged()) EXPECT_GT(*m.at(a, b), 1.0);
  }
}

TEST(StylePages, ThirteenArtistsFiveVersesEach) {
  const Fixture f = artists(13, 5, 6);
  const auto start = std::chrono::steady_clock::now();
  const auto pages = build_style_pages(f.eval, f.pools, 42);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_LT(elapsed, std::chrono::seconds(1));
  ASSERT_EQ(pages.size(), 260u);

  std::map<std::string, std::vector<const StyleMatchPage*>> by_eval;
  for (const auto& p : pages) by_eval[p.eval_verse_id].push_back(&p);
  ASSERT_EQ(by_eval.size(), 65u);
  for (const auto& [eval_id, list] : by_eval) {
    ASSERT_EQ(list.size(), 4u);
    const std::string target = list.front()->target_artist;
    std::multiset<std::string> distractors;
    std::set<std::string> target_verses;
    for (const auto* p : list) {
      ASSERT_EQ(p->choices.size(), 4u);
      std::size_t from_target = 0;
      for (std::size_t c = 0; c < 4; ++c) {
        const auto& choice = p->choices[c];
        EXPECT_NE(choice.verse_id, eval_id);
        if (choice.artist_id == target) {
          ++from_target;
          EXPECT_EQ(c, p->target_choice_index);
          target_verses.insert(choice.verse_id);
        } else {
          distractors.insert(choice.artist_id);
        }
      }
      EXPECT_EQ(from_target, 1u);
    }
    EXPECT_EQ(target_verses.size(), 4u);
    std::multiset<std::string> expected;
    for (const auto& [artist, pool] : f.pools) {
      if (artist != target) expected.insert(artist);
    }
    EXPECT_EQ(distractors, expected);
  }
  EXPECT_EQ(pages_to_json(build_style_pages(f.eval, f.pools, 42)), pages_to_json(pages));
}

TEST(StylePages, LayoutAndPoolErrors) {
  const Fixture twelve = artists(12, 1, 6);
  try {
    build_style_pages(twelve.eval, twelve.pools, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLayout);
    EXPECT_NE(std::string(e.what()).find("remainder 2"), std::string::npos);
  }
  const Fixture thin = artists(13, 1, 3);
  try {
    build_style_pages(thin.eval, thin.pools, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientPool);
  }
  Fixture short_pool = artists(4, 1, 3);
  short_pool.pools["artist3"] = {long_verse("artist3", "artist3:0", 10)};
  short_pool.eval.pop_back();
  try {
    build_style_pages(short_pool.eval, short_pool.pools, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientPool);
  }
}

TEST(AnnotationJsonl, RoundTrip) {
  LineAnnotation line{LineTask::kCoherence, "v1", 3, "ann-1", Label::kWeak, "2026-01-01T00:00:00Z"};
  StyleMatchAnnotation style{"page-4", "ann-2", 2, "2026-01-01T00:00:01Z"};
  const std::string text = to_jsonl(line) + "\n" + to_jsonl(style) + "\n";
  EXPECT_EQ(to_jsonl(line),
            R"({"task":"coherence","verse_id":"v1","line_index":3,"annotator_id":"ann-1",)"
            R"("label":"weak","timestamp":"2026-01-01T00:00:00Z"})");
  const auto set = parse_annotation_jsonl(text);
  ASSERT_EQ(set.lines.size(), 1u);
  ASSERT_EQ(set.styles.size(), 1u);
  EXPECT_EQ(set.lines[0].label, Label::kWeak);
  EXPECT_EQ(set.styles[0].chosen_index, 2u);
  EXPECT_THROW(parse_annotation_jsonl("{not json}\n"), Error);
}

TEST(PagesJson, RoundTrip) {
  const Fixture f = artists(4, 1, 3);
  const auto pages = build_style_pages(f.eval, f.pools, 5);
  const auto back = pages_from_json(pages_to_json(pages));
  ASSERT_EQ(back.size(), pages.size());
  EXPECT_EQ(pages_to_json(back), pages_to_json(pages));
}

}  // namespace
}  // namespace ghosteval
