// Manual evaluation: style-matching page construction and every statistic
// computed from annotator judgments.

#ifndef GHOSTEVAL_ANNOTATION_H_
#define GHOSTEVAL_ANNOTATION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ghosteval/verse.h"

namespace ghosteval {

enum class Label { kStrong, kWeak, kNone };

/// strong -> 1, weak -> 0.5, none -> 0.
double label_value(Label label);
std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view name);

enum class LineTask { kFluency, kCoherence };

std::string_view line_task_name(LineTask task);

struct LineAnnotation {
  LineTask task = LineTask::kFluency;
  std::string verse_id;
  std::size_t line_index = 0;
  std::string annotator_id;
  Label label = Label::kNone;
  std::string timestamp;
};

struct Choice {
  std::string verse_id;
  std::string artist_id;
};

struct StyleMatchPage {
  std::string page_id;
  std::string eval_verse_id;
  std::string target_artist;
  bool generated = false;
  std::vector<Choice> choices;
  /// Never shown to annotators.
  std::size_t target_choice_index = 0;
};

struct StyleMatchAnnotation {
  std::string page_id;
  std::string annotator_id;
  std::size_t chosen_index = 0;
  std::string timestamp;
};

struct PageLayout {
  std::size_t distractors_per_page = 3;
  /// Pool verses shorter than this never appear on a page.
  std::size_t min_pool_tokens = 40;
};

/// Each eval verse gets (other artists / distractors_per_page) pages. Across
/// those pages every other artist supplies exactly one distractor and every
/// page carries a different authentic verse of the target artist (never the
/// eval verse). Choice order is shuffled; deterministic for a seed.
/// Throws Error(kLayout) when the other-artist count is not a multiple of
/// distractors_per_page and Error(kInsufficientPool) when a pool is short.
std::vector<StyleMatchPage> build_style_pages(
    const std::vector<Verse>& eval_verses,
    const std::map<std::string, std::vector<Verse>>& pools, std::uint64_t seed,
    const PageLayout& layout = {});

/// Coherence records on a line identical to its predecessor become
/// not-coherent. Idempotent.
std::vector<LineAnnotation> apply_repetition_rule(
    std::vector<LineAnnotation> annotations, const Verse& verse);

/// (#strong + 0.5 #weak) / #a over the verse's records for `task`, where #a
/// is twice the number of eligible lines (all lines for fluency, all but the
/// first for coherence). Coherence applies the repetition rule first.
/// Throws Error(kIncompleteAnnotation) listing lines without exactly two
/// records.
double line_score(const std::vector<LineAnnotation>& annotations,
                  const Verse& verse, LineTask task);
double fluency_score(const std::vector<LineAnnotation>& annotations,
                     const Verse& verse);
double coherence_score(const std::vector<LineAnnotation>& annotations,
                       const Verse& verse);

/// Fraction of annotated lines whose two labels agree.
double raw_iaa(const std::vector<LineAnnotation>& annotations);

struct MatchTally {
  std::int64_t m = 0;    // annotations choosing the target
  std::int64_t a = 0;    // annotations
  std::int64_t m_a = 0;  // agreed pages whose agreed choice is the target
  std::int64_t s_a = 0;  // pages where both annotators agreed
  std::int64_t pages = 0;
};

struct MatchStats {
  MatchTally tally;
  double match_pct = 0.0;
  std::optional<double> match_agreed_pct;
  double agreement_pct = 0.0;
};

/// Over `pages` (annotations for other pages are ignored). Throws
/// Error(kIncompleteAnnotation) for a page without exactly two annotations.
MatchStats match_stats(const std::vector<StyleMatchPage>& pages,
                       const std::vector<StyleMatchAnnotation>& annotations);

struct ConfusionTally {
  std::map<std::pair<std::string, std::string>, std::int64_t> chosen;
  std::map<std::pair<std::string, std::string>, std::int64_t> presented;
};

struct ConfusionMatrix {
  std::vector<std::string> artists;
  /// Undefined on the diagonal and for never-presented pairs.
  std::vector<std::vector<std::optional<double>>> values;
  ConfusionTally tally;

  std::optional<double> at(const std::string& a, const std::string& b) const;
  /// Defined cells above 1 (possible with two annotations per page).
  std::vector<std::pair<std::string, std::string>> flagged() const;
  std::string to_csv(const std::string& provenance = {}) const;
};

/// Symmetric artist confusion over authentic-verse pages.
ConfusionMatrix confusion_matrix(
    const std::vector<StyleMatchPage>& pages,
    const std::vector<StyleMatchAnnotation>& annotations);

/// Per target artist: Match%, Match_A%, raw agreement % for authentic and
/// generated pages.
std::string style_match_table_csv(
    const std::vector<StyleMatchPage>& pages,
    const std::vector<StyleMatchAnnotation>& annotations,
    const std::string& provenance = {});

struct AnnotationSet {
  std::vector<LineAnnotation> lines;
  std::vector<StyleMatchAnnotation> styles;
};

/// One JSON object per line, keys in the order task, page_id | verse_id,
/// line_index, annotator_id, label | chosen_index, timestamp.
std::string to_jsonl(const LineAnnotation& record);
std::string to_jsonl(const StyleMatchAnnotation& record);
AnnotationSet parse_annotation_jsonl(std::string_view text);

std::string pages_to_json(const std::vector<StyleMatchPage>& pages);
std::vector<StyleMatchPage> pages_from_json(std::string_view text);

}  // namespace ghosteval

#endif  // GHOSTEVAL_ANNOTATION_H_
