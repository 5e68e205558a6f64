#include "ghosteval/annotation.h"

#include <algorithm>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "ghosteval/csv.h"
#include "ghosteval/error.h"
#include "ghosteval/random.h"
#include "json.hpp"

namespace ghosteval {

namespace {

using nlohmann::ordered_json;

std::string join_indices(const std::vector<std::size_t>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(items[i]);
  }
  return out;
}

}  // namespace

double label_value(Label label) {
  switch (label) {
    case Label::kStrong: return 1.0;
    case Label::kWeak: return 0.5;
    case Label::kNone: return 0.0;
  }
  return 0.0;
}

std::string_view label_name(Label label) {
  switch (label) {
    case Label::kStrong: return "strong";
    case Label::kWeak: return "weak";
    case Label::kNone: return "none";
  }
  return "none";
}

std::optional<Label> parse_label(std::string_view name) {
  if (name == "strong") return Label::kStrong;
  if (name == "weak") return Label::kWeak;
  if (name == "none") return Label::kNone;
  return std::nullopt;
}

std::string_view line_task_name(LineTask task) {
  return task == LineTask::kFluency ? "fluency" : "coherence";
}

std::vector<StyleMatchPage> build_style_pages(
    const std::vector<Verse>& eval_verses,
    const std::map<std::string, std::vector<Verse>>& pools, std::uint64_t seed,
    const PageLayout& layout) {
  if (layout.distractors_per_page == 0) {
    throw Error(ErrorKind::kLayout, "distractors_per_page must be positive");
  }
  std::map<std::string, std::vector<const Verse*>> eligible;
  for (const auto& [artist, verses] : pools) {
    auto& list = eligible[artist];
    for (const auto& v : verses) {
      if (v.token_count() >= layout.min_pool_tokens) list.push_back(&v);
    }
  }

  std::vector<StyleMatchPage> pages;
  for (std::size_t e = 0; e < eval_verses.size(); ++e) {
    const Verse& eval = eval_verses[e];
    const auto own = eligible.find(eval.artist_id);
    if (own == eligible.end()) {
      throw Error(ErrorKind::kInsufficientPool,
                  "no pool for artist '" + eval.artist_id + "'");
    }
    std::vector<std::string> others;
    for (const auto& [artist, list] : eligible) {
      if (artist != eval.artist_id) others.push_back(artist);
    }
    const std::size_t per_page = layout.distractors_per_page;
    if (others.empty() || others.size() % per_page != 0) {
      throw Error(ErrorKind::kLayout,
                  std::to_string(others.size()) +
                      " other artists cannot be split into pages of " +
                      std::to_string(per_page) + " distractors (remainder " +
                      std::to_string(others.size() % per_page) + ")");
    }
    const std::size_t page_count = others.size() / per_page;

    std::vector<const Verse*> targets;
    for (const Verse* v : own->second) {
      if (v->verse_id != eval.verse_id) targets.push_back(v);
    }
    if (targets.size() < page_count) {
      throw Error(ErrorKind::kInsufficientPool,
                  "artist '" + eval.artist_id + "' has " +
                      std::to_string(targets.size()) +
                      " eligible pool verses besides the eval verse, " +
                      std::to_string(page_count) + " needed");
    }
    for (const auto& artist : others) {
      if (eligible.at(artist).empty()) {
        throw Error(ErrorKind::kInsufficientPool,
                    "artist '" + artist + "' has no pool verse of at least " +
                        std::to_string(layout.min_pool_tokens) + " tokens");
      }
    }

    Rng rng(derive_seed(seed, e));
    rng.shuffle(others);
    rng.shuffle(targets);
    for (std::size_t p = 0; p < page_count; ++p) {
      StyleMatchPage page;
      page.page_id = "page-" + std::to_string(pages.size());
      page.eval_verse_id = eval.verse_id;
      page.target_artist = eval.artist_id;
      page.generated = eval.provenance.is_generated();
      page.choices.push_back({targets[p]->verse_id, eval.artist_id});
      for (std::size_t d = 0; d < per_page; ++d) {
        const auto& artist = others[p * per_page + d];
        const auto& list = eligible.at(artist);
        const Verse* pick = list[rng.uniform_index(list.size())];
        page.choices.push_back({pick->verse_id, artist});
      }
      rng.shuffle(page.choices);
      for (std::size_t c = 0; c < page.choices.size(); ++c) {
        if (page.choices[c].artist_id == eval.artist_id) {
          page.target_choice_index = c;
        }
      }
      pages.push_back(std::move(page));
    }
  }
  return pages;
}

std::vector<LineAnnotation> apply_repetition_rule(
    std::vector<LineAnnotation> annotations, const Verse& verse) {
  for (auto& record : annotations) {
    if (record.task != LineTask::kCoherence ||
        record.verse_id != verse.verse_id) {
      continue;
    }
    const std::size_t i = record.line_index;
    if (i >= 1 && i < verse.lines.size() &&
        verse.lines[i] == verse.lines[i - 1]) {
      record.label = Label::kNone;
    }
  }
  return annotations;
}

double line_score(const std::vector<LineAnnotation>& annotations,
                  const Verse& verse, LineTask task) {
  const std::size_t first = task == LineTask::kCoherence ? 1 : 0;
  if (verse.lines.size() <= first) {
    throw Error(ErrorKind::kDomain, "verse '" + verse.verse_id +
                                        "' has no line eligible for " +
                                        std::string(line_task_name(task)));
  }
  std::vector<std::size_t> per_line(verse.lines.size(), 0);
  double sum = 0.0;
  for (const auto& record : annotations) {
    if (record.task != task || record.verse_id != verse.verse_id) continue;
    if (record.line_index < first || record.line_index >= verse.lines.size()) {
      throw Error(ErrorKind::kValidation,
                  "annotation on ineligible line " +
                      std::to_string(record.line_index) + " of verse '" +
                      verse.verse_id + "'");
    }
    ++per_line[record.line_index];
    sum += label_value(record.label);
  }
  std::vector<std::size_t> bad;
  for (std::size_t i = first; i < verse.lines.size(); ++i) {
    if (per_line[i] != 2) bad.push_back(i);
  }
  if (!bad.empty()) {
    throw Error(ErrorKind::kIncompleteAnnotation,
                std::string(line_task_name(task)) + " annotations for verse '" +
                    verse.verse_id +
                    "' need exactly two records per line; lines: " +
                    join_indices(bad));
  }
  const double total = 2.0 * static_cast<double>(verse.lines.size() - first);
  return sum / total;
}

double fluency_score(const std::vector<LineAnnotation>& annotations,
                     const Verse& verse) {
  return line_score(annotations, verse, LineTask::kFluency);
}

double coherence_score(const std::vector<LineAnnotation>& annotations,
                       const Verse& verse) {
  return line_score(apply_repetition_rule(annotations, verse), verse,
                    LineTask::kCoherence);
}

double raw_iaa(const std::vector<LineAnnotation>& annotations) {
  std::map<std::tuple<LineTask, std::string, std::size_t>, std::vector<Label>>
      groups;
  for (const auto& r : annotations) {
    groups[{r.task, r.verse_id, r.line_index}].push_back(r.label);
  }
  if (groups.empty()) {
    throw Error(ErrorKind::kDomain, "raw_iaa: no annotations");
  }
  std::size_t agree = 0;
  for (const auto& [key, labels] : groups) {
    if (labels.size() != 2) {
      throw Error(ErrorKind::kIncompleteAnnotation,
                  "line " + std::to_string(std::get<2>(key)) + " of verse '" +
                      std::get<1>(key) + "' has " +
                      std::to_string(labels.size()) + " annotations, not 2");
    }
    if (labels[0] == labels[1]) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(groups.size());
}

MatchStats match_stats(const std::vector<StyleMatchPage>& pages,
                       const std::vector<StyleMatchAnnotation>& annotations) {
  std::unordered_map<std::string, std::vector<std::size_t>> chosen;
  std::unordered_map<std::string, const StyleMatchPage*> by_id;
  for (const auto& page : pages) by_id.emplace(page.page_id, &page);
  for (const auto& a : annotations) {
    auto it = by_id.find(a.page_id);
    if (it == by_id.end()) continue;
    if (a.chosen_index >= it->second->choices.size()) {
      throw Error(ErrorKind::kValidation,
                  "chosen_index " + std::to_string(a.chosen_index) +
                      " out of range on " + a.page_id);
    }
    chosen[a.page_id].push_back(a.chosen_index);
  }

  MatchStats stats;
  MatchTally& t = stats.tally;
  for (const auto& page : pages) {
    const auto& picks = chosen[page.page_id];
    if (picks.size() != 2) {
      throw Error(ErrorKind::kIncompleteAnnotation,
                  page.page_id + " has " + std::to_string(picks.size()) +
                      " annotations, expected 2");
    }
    ++t.pages;
    for (std::size_t pick : picks) {
      ++t.a;
      if (pick == page.target_choice_index) ++t.m;
    }
    if (picks[0] == picks[1]) {
      ++t.s_a;
      if (picks[0] == page.target_choice_index) ++t.m_a;
    }
  }
  if (t.a > 0) {
    stats.match_pct = 100.0 * static_cast<double>(t.m) / static_cast<double>(t.a);
    stats.agreement_pct =
        100.0 * static_cast<double>(t.s_a) / static_cast<double>(t.pages);
  }
  if (t.s_a > 0) {
    stats.match_agreed_pct =
        100.0 * static_cast<double>(t.m_a) / static_cast<double>(t.s_a);
  }
  return stats;
}

std::optional<double> ConfusionMatrix::at(const std::string& a,
                                          const std::string& b) const {
  auto ia = std::find(artists.begin(), artists.end(), a);
  auto ib = std::find(artists.begin(), artists.end(), b);
  if (ia == artists.end() || ib == artists.end()) return std::nullopt;
  return values[static_cast<std::size_t>(ia - artists.begin())]
               [static_cast<std::size_t>(ib - artists.begin())];
}

std::vector<std::pair<std::string, std::string>> ConfusionMatrix::flagged()
    const {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < artists.size(); ++i) {
    for (std::size_t j = i + 1; j < artists.size(); ++j) {
      if (values[i][j] && *values[i][j] > 1.0) {
        out.emplace_back(artists[i], artists[j]);
      }
    }
  }
  return out;
}

std::string ConfusionMatrix::to_csv(const std::string& provenance) const {
  std::vector<std::string> header = {"artist"};
  header.insert(header.end(), artists.begin(), artists.end());
  csv::Writer out(header);
  out.set_comment(provenance);
  for (std::size_t i = 0; i < artists.size(); ++i) {
    out.field(artists[i]);
    for (const auto& v : values[i]) out.field(v);
    out.end_row();
  }
  return out.str();
}

ConfusionMatrix confusion_matrix(
    const std::vector<StyleMatchPage>& pages,
    const std::vector<StyleMatchAnnotation>& annotations) {
  if (pages.empty()) {
    throw Error(ErrorKind::kDomain, "confusion_matrix: no pages");
  }
  ConfusionMatrix m;
  std::unordered_map<std::string, const StyleMatchPage*> by_id;
  std::set<std::string> artists;
  for (const auto& page : pages) {
    if (page.generated) continue;
    by_id.emplace(page.page_id, &page);
    artists.insert(page.target_artist);
    for (const auto& choice : page.choices) {
      artists.insert(choice.artist_id);
      if (choice.artist_id != page.target_artist) {
        ++m.tally.presented[{page.target_artist, choice.artist_id}];
      }
    }
  }
  for (const auto& a : annotations) {
    auto it = by_id.find(a.page_id);
    if (it == by_id.end()) continue;
    const StyleMatchPage& page = *it->second;
    if (a.chosen_index >= page.choices.size()) {
      throw Error(ErrorKind::kValidation,
                  "chosen_index out of range on " + a.page_id);
    }
    const auto& picked = page.choices[a.chosen_index].artist_id;
    if (picked != page.target_artist) {
      ++m.tally.chosen[{page.target_artist, picked}];
    }
  }

  m.artists.assign(artists.begin(), artists.end());
  const std::size_t k = m.artists.size();
  m.values.assign(k, std::vector<std::optional<double>>(k));
  auto get = [](const auto& map, const std::string& a, const std::string& b) {
    auto it = map.find({a, b});
    return it == map.end() ? std::int64_t{0} : it->second;
  };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto& a = m.artists[i];
      const auto& b = m.artists[j];
      const std::int64_t p =
          get(m.tally.presented, a, b) + get(m.tally.presented, b, a);
      if (p == 0) continue;
      const std::int64_t c = get(m.tally.chosen, a, b) + get(m.tally.chosen, b, a);
      const double v = static_cast<double>(c) / static_cast<double>(p);
      m.values[i][j] = v;
      m.values[j][i] = v;
    }
  }
  return m;
}

std::string style_match_table_csv(
    const std::vector<StyleMatchPage>& pages,
    const std::vector<StyleMatchAnnotation>& annotations,
    const std::string& provenance) {
  csv::Writer out({"artist", "authentic_match_pct", "authentic_match_a_pct",
                   "authentic_agreement_pct", "generated_match_pct",
                   "generated_match_a_pct", "generated_agreement_pct"});
  out.set_comment(provenance);
  std::map<std::string, std::pair<std::vector<StyleMatchPage>,
                                  std::vector<StyleMatchPage>>>
      by_artist;
  for (const auto& page : pages) {
    auto& slot = by_artist[page.target_artist];
    (page.generated ? slot.second : slot.first).push_back(page);
  }
  for (const auto& [artist, split] : by_artist) {
    out.field(artist);
    for (const auto* subset : {&split.first, &split.second}) {
      if (subset->empty()) {
        out.field(std::optional<double>())
            .field(std::optional<double>())
            .field(std::optional<double>());
        continue;
      }
      const MatchStats s = match_stats(*subset, annotations);
      out.field(s.match_pct).field(s.match_agreed_pct).field(s.agreement_pct);
    }
    out.end_row();
  }
  return out.str();
}

std::string to_jsonl(const LineAnnotation& record) {
  ordered_json j;
  j["task"] = line_task_name(record.task);
  j["verse_id"] = record.verse_id;
  j["line_index"] = record.line_index;
  j["annotator_id"] = record.annotator_id;
  j["label"] = label_name(record.label);
  j["timestamp"] = record.timestamp;
  return j.dump();
}

std::string to_jsonl(const StyleMatchAnnotation& record) {
  ordered_json j;
  j["task"] = "style";
  j["page_id"] = record.page_id;
  j["annotator_id"] = record.annotator_id;
  j["chosen_index"] = record.chosen_index;
  j["timestamp"] = record.timestamp;
  return j.dump();
}

AnnotationSet parse_annotation_jsonl(std::string_view text) {
  AnnotationSet out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = ordered_json::parse(line);
      const auto task = j.at("task").get<std::string>();
      if (task == "style") {
        StyleMatchAnnotation r;
        r.page_id = j.at("page_id").get<std::string>();
        r.annotator_id = j.at("annotator_id").get<std::string>();
        r.chosen_index = j.at("chosen_index").get<std::size_t>();
        r.timestamp = j.value("timestamp", "");
        out.styles.push_back(std::move(r));
      } else if (task == "fluency" || task == "coherence") {
        LineAnnotation r;
        r.task = task == "fluency" ? LineTask::kFluency : LineTask::kCoherence;
        r.verse_id = j.at("verse_id").get<std::string>();
        r.line_index = j.at("line_index").get<std::size_t>();
        r.annotator_id = j.at("annotator_id").get<std::string>();
        const auto label = parse_label(j.at("label").get<std::string>());
        if (!label) throw Error(ErrorKind::kValidation, "unknown label");
        r.label = *label;
        r.timestamp = j.value("timestamp", "");
        out.lines.push_back(std::move(r));
      } else {
        throw Error(ErrorKind::kValidation, "unknown task '" + task + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kValidation, "annotation record " +
                                              std::to_string(line_no) + ": " +
                                              e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), "annotation record " + std::to_string(line_no) +
                                ": " + e.what());
    }
  }
  return out;
}

std::string pages_to_json(const std::vector<StyleMatchPage>& pages) {
  ordered_json arr = ordered_json::array();
  for (const auto& page : pages) {
    ordered_json choices = ordered_json::array();
    for (const auto& c : page.choices) {
      choices.push_back({{"verse_id", c.verse_id}, {"artist_id", c.artist_id}});
    }
    ordered_json j;
    j["page_id"] = page.page_id;
    j["eval_verse_id"] = page.eval_verse_id;
    j["target_artist"] = page.target_artist;
    j["generated"] = page.generated;
    j["choices"] = choices;
    j["target_choice_index"] = page.target_choice_index;
    arr.push_back(std::move(j));
  }
  return arr.dump(1) + "\n";
}

std::vector<StyleMatchPage> pages_from_json(std::string_view text) {
  std::vector<StyleMatchPage> pages;
  try {
    for (const auto& j : ordered_json::parse(text)) {
      StyleMatchPage page;
      page.page_id = j.at("page_id").get<std::string>();
      page.eval_verse_id = j.at("eval_verse_id").get<std::string>();
      page.target_artist = j.at("target_artist").get<std::string>();
      page.generated = j.at("generated").get<bool>();
      for (const auto& c : j.at("choices")) {
        page.choices.push_back({c.at("verse_id").get<std::string>(),
                                c.at("artist_id").get<std::string>()});
      }
      page.target_choice_index = j.at("target_choice_index").get<std::size_t>();
      pages.push_back(std::move(page));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("pages: ") + e.what());
  }
  return pages;
}

}  // namespace ghosteval
