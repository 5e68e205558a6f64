#include "ghosteval/pipeline.h"

#include <signal.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "ghosteval/csv.h"
#include "ghosteval/http_server.h"
#include "ghosteval/ngram.h"
#include "ghosteval/random.h"
#include "ghosteval/text.h"
#include "json.hpp"

namespace ghosteval {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingInput, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string normalization_name(EntropyNormalization n) {
  return n == EntropyNormalization::kTokenCount ? "token_count" : "log_token_count";
}

void reject_unknown(const json& object, std::initializer_list<std::string_view> keys,
                    std::string_view where) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw Error(ErrorKind::kValidation,
                  "unknown config key '" + std::string(where) + key + "'");
    }
  }
}

template <typename T>
void read_field(const json& object, const char* key, T& out) {
  if (object.contains(key)) out = object.at(key).get<T>();
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string verse_text(const Verse& verse) {
  std::string out;
  for (const auto& line : verse.lines) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) out.push_back(' ');
      out += line[i];
    }
    out.push_back('\n');
  }
  return out;
}

// Runs f(i) for every index on its own thread and returns the results in
// index order.
template <typename F>
auto parallel_map(std::size_t count, F f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<std::future<R>> futures;
  futures.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    futures.push_back(std::async(std::launch::async, f, i));
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto& fut : futures) out.push_back(fut.get());
  return out;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace

PipelineConfig PipelineConfig::from_json(std::string_view text, fs::path base_dir) {
  PipelineConfig c;
  c.base_dir = std::move(base_dir);
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw Error(ErrorKind::kValidation, "config must be a JSON object");
    reject_unknown(j,
                   {"corpus_root", "artists", "cleaning_rules", "dictionary", "rhyme",
                    "similarity", "seed", "baseline", "checkpoint_root",
                    "checkpoint_windows", "total_iterations", "pages", "service",
                    "annotations", "output_dir"},
                   "");
    read_field(j, "corpus_root", c.corpus_root);
    read_field(j, "artists", c.artists);
    read_field(j, "cleaning_rules", c.cleaning_rules);
    read_field(j, "dictionary", c.dictionary);
    read_field(j, "seed", c.seed);
    read_field(j, "checkpoint_root", c.checkpoint_root);
    read_field(j, "annotations", c.annotations);
    read_field(j, "output_dir", c.output_dir);
    if (j.contains("total_iterations") && !j["total_iterations"].is_null()) {
      c.total_iterations = j["total_iterations"].get<std::int64_t>();
    }
    if (j.contains("rhyme")) {
      const json& r = j["rhyme"];
      reject_unknown(r,
                     {"window_lines", "max_span", "reduce_unstressed", "require_stress",
                      "coda_classes", "entropy_normalization"},
                     "rhyme.");
      read_field(r, "window_lines", c.rhyme.window_lines);
      read_field(r, "max_span", c.rhyme.max_span);
      read_field(r, "reduce_unstressed", c.rhyme.reduce_unstressed);
      read_field(r, "require_stress", c.rhyme.require_stress);
      read_field(r, "coda_classes", c.rhyme.coda_classes);
      if (r.contains("entropy_normalization")) {
        const auto name = r["entropy_normalization"].get<std::string>();
        if (name == "log_token_count") {
          c.normalization = EntropyNormalization::kLogTokenCount;
        } else if (name == "token_count") {
          c.normalization = EntropyNormalization::kTokenCount;
        } else {
          throw Error(ErrorKind::kValidation, "unknown entropy_normalization '" + name + "'");
        }
      }
    }
    if (j.contains("similarity")) {
      reject_unknown(j["similarity"], {"include_line_breaks"}, "similarity.");
      read_field(j["similarity"], "include_line_breaks", c.similarity.include_line_breaks);
    }
    if (j.contains("baseline")) {
      const json& b = j["baseline"];
      reject_unknown(b, {"verses_per_point", "min_order", "max_order", "max_tokens"},
                     "baseline.");
      read_field(b, "verses_per_point", c.baseline.verses_per_point);
      read_field(b, "min_order", c.baseline.min_order);
      read_field(b, "max_order", c.baseline.max_order);
      read_field(b, "max_tokens", c.baseline.max_tokens);
    }
    if (j.contains("checkpoint_windows")) {
      const json& w = j["checkpoint_windows"];
      reject_unknown(w, {"first", "last", "spacing", "offsets"}, "checkpoint_windows.");
      read_field(w, "first", c.windows.first);
      read_field(w, "last", c.windows.last);
      read_field(w, "spacing", c.windows.spacing);
      read_field(w, "offsets", c.windows.offsets);
    }
    if (j.contains("pages")) {
      const json& p = j["pages"];
      reject_unknown(p,
                     {"eval_verses_per_artist", "min_eval_tokens",
                      "line_task_verses_per_artist", "generated_order",
                      "distractors_per_page", "min_pool_tokens"},
                     "pages.");
      read_field(p, "eval_verses_per_artist", c.pages.eval_verses_per_artist);
      read_field(p, "min_eval_tokens", c.pages.min_eval_tokens);
      read_field(p, "line_task_verses_per_artist", c.pages.line_task_verses_per_artist);
      read_field(p, "generated_order", c.pages.generated_order);
      read_field(p, "distractors_per_page", c.pages.layout.distractors_per_page);
      read_field(p, "min_pool_tokens", c.pages.layout.min_pool_tokens);
    }
    if (j.contains("service")) {
      const json& s = j["service"];
      reject_unknown(s, {"host", "port", "roster", "log", "ui_dir"}, "service.");
      read_field(s, "host", c.service.host);
      read_field(s, "port", c.service.port);
      read_field(s, "roster", c.service.roster);
      read_field(s, "log", c.service.log);
      read_field(s, "ui_dir", c.service.ui_dir);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("config: ") + e.what());
  }
  if (c.baseline.min_order < 1 || c.baseline.max_order > kMaxOrder ||
      c.baseline.min_order > c.baseline.max_order) {
    throw Error(ErrorKind::kValidation, "baseline orders must satisfy 1 <= min <= max <= 9");
  }
  if (c.windows.spacing <= 0 || c.windows.last < c.windows.first) {
    throw Error(ErrorKind::kValidation, "checkpoint_windows need spacing > 0 and last >= first");
  }
  std::set<std::string> seen;
  for (const auto& a : c.artists) {
    if (a.empty() || !seen.insert(a).second) {
      throw Error(ErrorKind::kValidation, "artist ids must be unique and non-empty");
    }
  }
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorKind::kMissingInput, "config file not found: " + path.string());
  }
  return from_json(read_text(path), path.parent_path().empty() ? fs::path(".")
                                                               : path.parent_path());
}

std::string PipelineConfig::to_json() const {
  ordered_json j;
  j["corpus_root"] = corpus_root;
  j["artists"] = artists;
  j["cleaning_rules"] = cleaning_rules;
  j["dictionary"] = dictionary;
  j["rhyme"] = {{"window_lines", rhyme.window_lines},
                {"max_span", rhyme.max_span},
                {"reduce_unstressed", rhyme.reduce_unstressed},
                {"require_stress", rhyme.require_stress},
                {"coda_classes", rhyme.coda_classes},
                {"entropy_normalization", normalization_name(normalization)}};
  j["similarity"] = {{"include_line_breaks", similarity.include_line_breaks}};
  j["seed"] = seed;
  j["baseline"] = {{"verses_per_point", baseline.verses_per_point},
                   {"min_order", baseline.min_order},
                   {"max_order", baseline.max_order},
                   {"max_tokens", baseline.max_tokens}};
  j["checkpoint_root"] = checkpoint_root;
  j["checkpoint_windows"] = {{"first", windows.first},
                             {"last", windows.last},
                             {"spacing", windows.spacing},
                             {"offsets", windows.offsets}};
  j["total_iterations"] =
      total_iterations ? ordered_json(*total_iterations) : ordered_json(nullptr);
  j["pages"] = {{"eval_verses_per_artist", pages.eval_verses_per_artist},
                {"min_eval_tokens", pages.min_eval_tokens},
                {"line_task_verses_per_artist", pages.line_task_verses_per_artist},
                {"generated_order", pages.generated_order},
                {"distractors_per_page", pages.layout.distractors_per_page},
                {"min_pool_tokens", pages.layout.min_pool_tokens}};
  j["annotations"] = annotations;
  j["service"] = {{"host", service.host},
                  {"port", service.port},
                  {"roster", service.roster},
                  {"log", service.log},
                  {"ui_dir", service.ui_dir}};
  j["output_dir"] = output_dir;
  return j.dump(2) + "\n";
}

fs::path PipelineConfig::resolve(const std::string& path) const {
  const fs::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

std::string PipelineConfig::hash() const {
  auto j = ordered_json::parse(to_json());
  j.erase("service");
  j.erase("output_dir");
  j.erase("annotations");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

std::string PipelineConfig::provenance() const {
  return "provenance: config=" + hash() + " seed=" + std::to_string(seed);
}

void PipelineConfig::validate() const {
  if (corpus_root.empty()) throw Error(ErrorKind::kValidation, "config lacks corpus_root");
  if (artists.empty()) throw Error(ErrorKind::kValidation, "config lists no artists");
  auto require = [this](const std::string& path, const char* what) {
    if (!path.empty() && !fs::exists(resolve(path))) {
      throw Error(ErrorKind::kMissingInput,
                  std::string(what) + " not found: " + resolve(path).string());
    }
  };
  require(corpus_root, "corpus_root");
  require(cleaning_rules, "cleaning_rules");
  require(dictionary, "dictionary");
  for (const auto& a : artists) require(corpus_root + "/" + a, "artist directory");
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMissingInput:
    case ErrorKind::kMissingCheckpoint:
      return 2;
    case ErrorKind::kInternal:
      return 3;
    default:
      return 1;
  }
}

std::string error_line(ErrorKind kind, std::string_view message) {
  ordered_json j;
  j["error"] = {{"kind", error_kind_name(kind)},
                {"message", message},
                {"exit_code", exit_code_for(kind)}};
  return j.dump();
}

struct Pipeline::State {
  std::optional<std::vector<ArtistCorpus>> corpora;
  std::optional<PronouncingDictionary> dictionary;
  std::vector<std::unique_ptr<TfIdfIndex>> indexes;
  std::optional<std::vector<ArtistScores>> scores;
  std::optional<PagePlan> page_plan;
};

Pipeline::Pipeline(PipelineConfig config, std::ostream& out, std::ostream& log)
    : config_(std::move(config)), out_(out), log_(log), state_(std::make_unique<State>()) {}

Pipeline::~Pipeline() = default;

const std::vector<ArtistCorpus>& Pipeline::corpora() {
  if (!state_->corpora) {
    config_.validate();
    const CleaningRules rules =
        config_.cleaning_rules.empty()
            ? CleaningRules::defaults()
            : CleaningRules::from_json(read_text(config_.resolve(config_.cleaning_rules)));
    const fs::path root = config_.resolve(config_.corpus_root);
    state_->corpora = parallel_map(config_.artists.size(), [&](std::size_t i) {
      return load_artist_directory(root / config_.artists[i], rules, config_.artists[i]);
    });
    for (const auto& c : *state_->corpora) {
      if (c.empty()) {
        throw Error(ErrorKind::kValidation,
                    "artist '" + c.artist_id() + "' has no verse of at least " +
                        std::to_string(rules.min_tokens) + " tokens");
      }
    }
  }
  return *state_->corpora;
}

const PronouncingDictionary& Pipeline::dictionary() {
  if (!state_->dictionary) {
    if (config_.dictionary.empty()) {
      throw Error(ErrorKind::kValidation, "config lacks a pronouncing dictionary");
    }
    state_->dictionary = PronouncingDictionary::load(config_.resolve(config_.dictionary));
  }
  return *state_->dictionary;
}

const ArtistCorpus& Pipeline::corpus(const std::string& artist) {
  for (const auto& c : corpora()) {
    if (c.artist_id() == artist) return c;
  }
  throw Error(ErrorKind::kValidation, "artist '" + artist + "' is not in the config");
}

std::vector<std::string> Pipeline::selected(const std::vector<std::string>& requested) {
  if (requested.empty()) return config_.artists;
  for (const auto& a : requested) corpus(a);
  return requested;
}

void Pipeline::write_file(const fs::path& relative, std::string_view data) {
  const fs::path path = config_.output() / relative;
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInternal, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorKind::kInternal, "write failed: " + path.string());
  log_ << "wrote " << path.string() << "\n";
}

void Pipeline::ingest() {
  for (const auto& c : corpora()) {
    write_file(fs::path("corpus") / (c.artist_id() + ".json"), corpus_manifest_json(c));
  }
}

void Pipeline::stats() {
  write_file("table1_corpus_stats.csv", corpus_stats_csv(corpora(), config_.provenance()));
}

void Pipeline::gen_baseline(const CommandOptions& options) {
  const int first = options.order.value_or(config_.baseline.min_order);
  const int last = options.order.value_or(config_.baseline.max_order);
  if (first < 1 || last > kMaxOrder) {
    throw Error(ErrorKind::kValidation, "n-gram order must lie in [1, 9]");
  }
  const int count = options.count.value_or(config_.baseline.verses_per_point);
  if (count < 1) throw Error(ErrorKind::kValidation, "--count must be positive");
  const auto artists = selected(options.artists);
  std::vector<const ArtistCorpus*> sources;
  for (const auto& artist : artists) sources.push_back(&corpus(artist));
  const auto generated = parallel_map(artists.size(), [&](std::size_t a) {
    std::vector<Verse> verses;
    for (int n = first; n <= last; ++n) {
      const NGramModel model = train(*sources[a], n);
      for (int i = 0; i < count; ++i) {
        verses.push_back(baseline_verse(model, config_.seed, i, config_.baseline.max_tokens));
      }
    }
    return verses;
  });
  for (std::size_t a = 0; a < artists.size(); ++a) {
    for (const auto& v : generated[a]) {
      const std::string name = v.verse_id.substr(std::string_view("baseline/").size());
      std::string file = name;
      std::replace(file.begin(), file.end(), '/', '_');
      write_file(fs::path("baseline") / artists[a] / (file + ".txt"), verse_text(v));
      if (options.order) out_ << "# " << artists[a] << "/" << name << "\n" << verse_text(v) << "\n";
    }
  }
}

const std::vector<Pipeline::ArtistScores>& Pipeline::scores() {
  if (state_->scores) return *state_->scores;
  const auto& all = corpora();
  const auto& dict = dictionary();
  if (!config_.checkpoint_root.empty()) {
    for (const auto& c : all) {
      const fs::path dir = config_.resolve(config_.checkpoint_root) / c.artist_id();
      if (!fs::is_directory(dir)) {
        throw Error(ErrorKind::kMissingCheckpoint,
                    "checkpoint directory not found: " + dir.string());
      }
    }
  }
  state_->indexes.clear();
  for (const auto& c : all) {
    state_->indexes.push_back(std::make_unique<TfIdfIndex>(
        TfIdfIndex::build(c.verses(), config_.similarity)));
  }
  state_->scores = parallel_map(all.size(), [&](std::size_t a) {
    const ArtistCorpus& c = all[a];
    const Scorer scorer{*state_->indexes[a], dict, config_.rhyme, config_.normalization};
    ArtistScores s;
    s.artist_id = c.artist_id();
    std::vector<double> densities;
    for (const auto& v : c.verses()) {
      densities.push_back(weighted_rhyme_density(v, dict, config_.rhyme, config_.normalization));
    }
    s.avg_rhyme_density = mean(densities);
    BaselineOptions options = config_.baseline;
    options.seed = config_.seed;
    s.baseline = baseline_checkpoint_suite(c, scorer, options);
    if (!config_.checkpoint_root.empty()) {
      s.neural = load_external_checkpoints(
          config_.resolve(config_.checkpoint_root) / c.artist_id(), c.artist_id(), scorer,
          config_.windows);
    }
    return s;
  });
  for (const auto& s : *state_->scores) {
    if (s.neural) {
      for (const auto& w : s.neural->warnings) log_ << "warning: " << w << "\n";
    }
  }
  return *state_->scores;
}

void Pipeline::score() {
  const auto& all = scores();
  const auto& dict = dictionary();
  csv::Writer densities({"artist", "avg_rhyme_density", "verses"});
  densities.set_comment(config_.provenance());
  for (std::size_t a = 0; a < all.size(); ++a) {
    const ArtistScores& s = all[a];
    densities.field(s.artist_id)
        .field(s.avg_rhyme_density)
        .field(static_cast<std::int64_t>(corpora()[a].verses().size()))
        .end_row();

    csv::Writer points({"series", "x", "avg_rhyme_density", "avg_max_similarity", "verses"});
    points.set_comment(config_.provenance());
    auto add_points = [&points](std::string_view series,
                                const std::vector<CheckpointPoint>& list) {
      for (const auto& p : list) {
        points.field(series)
            .field(p.x)
            .field(p.avg_rhyme_density)
            .field(p.avg_max_similarity)
            .field(static_cast<std::int64_t>(p.verse_refs.size()))
            .end_row();
      }
    };
    add_points("baseline", s.baseline.points);
    if (s.neural) add_points("neural", s.neural->points);
    write_file(fs::path("scores") / (s.artist_id + "_points.csv"), points.str());

    const Scorer scorer{*state_->indexes[a], dict, config_.rhyme, config_.normalization};
    csv::Writer verses({"verse_id", "checkpoint", "tokens", "weighted_rhyme_density",
                        "max_similarity"});
    verses.set_comment(config_.provenance());
    auto add_verses = [&](const std::vector<Verse>& list) {
      for (const auto& v : list) {
        const VerseScore vs = scorer.score(v);
        verses.field(v.verse_id)
            .field(v.provenance.checkpoint)
            .field(static_cast<std::int64_t>(v.token_count()))
            .field(vs.weighted_rhyme_density)
            .field(vs.max_similarity)
            .end_row();
      }
    };
    add_verses(s.baseline.verses);
    if (s.neural) add_verses(s.neural->verses);
    write_file(fs::path("scores") / (s.artist_id + "_verses.csv"), verses.str());
  }
  write_file(fs::path("scores") / "artist_rhyme_density.csv", densities.str());
}

std::vector<MergedRow> Pipeline::merged_rows() {
  std::vector<MergedRow> rows;
  for (const auto& s : scores()) {
    MergedRow row;
    row.artist_id = s.artist_id;
    row.avg_rhyme_density = s.avg_rhyme_density;
    auto merge = [&](const std::vector<CheckpointPoint>& series,
                     std::string_view name) -> std::optional<MergedScore> {
      try {
        return merged_similarity(series, s.avg_rhyme_density);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNoIntersection &&
            e.kind() != ErrorKind::kUnderdetermined &&
            e.kind() != ErrorKind::kDegenerateFit) {
          throw;
        }
        log_ << "warning: " << s.artist_id << " " << name << ": " << e.what() << "\n";
        return std::nullopt;
      }
    };
    row.baseline = merge(s.baseline.points, "baseline");
    if (s.neural) row.neural = merge(s.neural->points, "neural");
    rows.push_back(std::move(row));
  }
  return rows;
}

void Pipeline::regress() {
  write_file("table3_merged.csv", merged_table_csv(merged_rows(), config_.provenance()));
}

const Pipeline::PagePlan& Pipeline::page_plan() {
  if (state_->page_plan) return *state_->page_plan;
  const auto& all = corpora();
  const auto& all_scores = scores();
  std::vector<Verse> authentic_eval;
  std::vector<Verse> generated_eval;
  std::vector<Verse> line_verses;
  std::map<std::string, std::vector<Verse>> pools;
  std::map<std::string, Verse> by_id;
  for (std::size_t a = 0; a < all.size(); ++a) {
    const ArtistCorpus& c = all[a];
    pools[c.artist_id()] = c.verses();
    for (const auto& v : c.verses()) by_id.emplace(v.verse_id, v);

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < c.verses().size(); ++i) {
      if (c.verses()[i].token_count() >= config_.pages.min_eval_tokens) eligible.push_back(i);
    }
    Rng rng(derive_seed(config_.seed, 1000 + a));
    rng.shuffle(eligible);
    const std::size_t take = std::min(eligible.size(), config_.pages.eval_verses_per_artist);
    if (take < config_.pages.eval_verses_per_artist) {
      log_ << "warning: " << c.artist_id() << " has only " << take
           << " verses long enough for evaluation\n";
    }
    std::sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(take));
    for (std::size_t i = 0; i < take; ++i) authentic_eval.push_back(c.verses()[eligible[i]]);

    // Generated verses come from the last neural window when present and
    // from the configured baseline order otherwise.
    const ArtistScores& s = all_scores[a];
    std::vector<Verse> generated;
    if (s.neural && !s.neural->points.empty()) {
      const auto& last = s.neural->points.back();
      for (const auto& v : s.neural->verses) {
        if (std::find(last.verse_refs.begin(), last.verse_refs.end(), v.verse_id) !=
            last.verse_refs.end()) {
          generated.push_back(v);
        }
      }
    } else {
      const std::string prefix = "baseline/n" + std::to_string(config_.pages.generated_order) + "/";
      for (const auto& v : s.baseline.verses) {
        if (v.verse_id.starts_with(prefix)) {
          Verse copy = v;
          copy.verse_id = c.artist_id() + "/" + v.verse_id;
          generated.push_back(std::move(copy));
        }
      }
    }
    const std::size_t gen_take = std::min(generated.size(), config_.pages.eval_verses_per_artist);
    for (std::size_t i = 0; i < gen_take; ++i) {
      by_id.emplace(generated[i].verse_id, generated[i]);
      generated_eval.push_back(generated[i]);
    }
    for (std::size_t i = 0; i < std::min(gen_take, config_.pages.line_task_verses_per_artist); ++i) {
      line_verses.push_back(generated[i]);
    }
  }
  std::vector<Verse> eval = authentic_eval;
  eval.insert(eval.end(), generated_eval.begin(), generated_eval.end());
  PagePlan plan;
  plan.pages = build_style_pages(eval, pools, config_.seed, config_.pages.layout);
  plan.tasks = make_task_plan(plan.pages, by_id, line_verses);
  state_->page_plan = std::move(plan);
  return *state_->page_plan;
}

void Pipeline::pages() {
  const PagePlan& plan = page_plan();
  write_file("pages.json", pages_to_json(plan.pages));
  write_file("task_plan.json", plan.tasks.to_json());
}

namespace {

fs::path service_log_path(const PipelineConfig& config) {
  return config.service.log.empty() ? config.output() / "annotations.log"
                                    : config.resolve(config.service.log);
}

}  // namespace

void Pipeline::serve() {
  if (config_.service.roster.empty()) {
    throw Error(ErrorKind::kValidation, "config lacks service.roster");
  }
  const fs::path plan_path = config_.output() / "task_plan.json";
  TaskPlan plan = fs::exists(plan_path) ? TaskPlan::from_json(read_text(plan_path))
                                        : page_plan().tasks;
  Roster roster = Roster::from_json(read_text(config_.resolve(config_.service.roster)));
  const fs::path log_path = service_log_path(config_);
  fs::create_directories(log_path.parent_path());
  AnnotationService service(std::move(plan), std::move(roster), log_path);
  HttpOptions http;
  http.host = config_.service.host;
  http.port = config_.service.port;
  if (!config_.service.ui_dir.empty()) http.ui_dir = config_.resolve(config_.service.ui_dir);
  HttpServer server(service, http);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  const int port = server.bind();
  out_ << "listening on " << http.host << ":" << port << std::endl;
  std::thread waiter([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.wait_until_ready();
    server.stop();
  });
  server.listen();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
}

std::optional<AnnotationSet> Pipeline::load_annotations() {
  if (!config_.annotations.empty()) {
    return parse_annotation_jsonl(read_text(config_.resolve(config_.annotations)));
  }
  const fs::path jsonl = config_.output() / "annotations.jsonl";
  if (fs::exists(jsonl)) return parse_annotation_jsonl(read_text(jsonl));
  const fs::path log_path = service_log_path(config_);
  if (fs::exists(log_path)) {
    std::string records;
    std::istringstream in(read_text(log_path));
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      try {
        const ordered_json entry = ordered_json::parse(line);
        for (const auto& r : entry.at("records")) records += r.dump() + "\n";
      } catch (const json::exception&) {
        break;
      }
    }
    return parse_annotation_jsonl(records);
  }
  return std::nullopt;
}

void Pipeline::report() {
  const std::string prov = config_.provenance();
  stats();
  regress();
  const auto& all = corpora();
  const auto& all_scores = scores();

  std::vector<StructureRow> structure;
  for (const auto& s : all_scores) {
    if (!s.neural) continue;
    if (auto row = verse_structure_report(s.artist_id, s.neural->verses, config_.total_iterations)) {
      structure.push_back(*row);
    }
  }
  write_file("table5_structure.csv", structure_report_csv(structure, prov));

  const auto annotations = load_annotations();
  if (!annotations) {
    log_ << "warning: no annotations found; skipping tables 2 and 4\n";
    return;
  }
  const PagePlan& plan = page_plan();
  write_file("table2_style_match.csv", style_match_table_csv(plan.pages, annotations->styles, prov));
  write_file("fig3_confusion.csv", confusion_matrix(plan.pages, annotations->styles).to_csv(prov));

  std::map<std::string, Verse> line_verses;
  for (const auto& task : plan.tasks.line_tasks) {
    if (line_verses.contains(task.verse_id)) continue;
    for (const auto& s : all_scores) {
      auto find_in = [&](const std::vector<Verse>& list) {
        for (const auto& v : list) {
          if (v.verse_id == task.verse_id) line_verses.emplace(v.verse_id, v);
        }
      };
      if (s.neural) find_in(s.neural->verses);
      for (const auto& v : s.baseline.verses) {
        if (s.artist_id + "/" + v.verse_id == task.verse_id) {
          Verse copy = v;
          copy.verse_id = task.verse_id;
          line_verses.emplace(copy.verse_id, copy);
        }
      }
    }
  }

  csv::Writer line_csv({"artist", "verses", "fluency", "coherence", "fluency_agreement",
                        "coherence_agreement"});
  line_csv.set_comment(prov);
  std::vector<double> fluency_col;
  std::vector<double> coherence_col;
  for (const auto& c : all) {
    std::vector<double> fl;
    std::vector<double> co;
    std::vector<LineAnnotation> flr;
    std::vector<LineAnnotation> cor;
    for (const auto& [id, verse] : line_verses) {
      if (verse.artist_id != c.artist_id()) continue;
      const auto records = apply_repetition_rule(annotations->lines, verse);
      fl.push_back(fluency_score(records, verse));
      co.push_back(coherence_score(records, verse));
      for (const auto& r : records) {
        if (r.verse_id != verse.verse_id) continue;
        (r.task == LineTask::kFluency ? flr : cor).push_back(r);
      }
    }
    fluency_col.push_back(mean(fl));
    coherence_col.push_back(mean(co));
    line_csv.field(c.artist_id())
        .field(static_cast<std::int64_t>(fl.size()))
        .field(fluency_col.back())
        .field(coherence_col.back())
        .field(flr.empty() ? std::optional<double>() : std::optional<double>(100.0 * raw_iaa(flr)))
        .field(cor.empty() ? std::optional<double>() : std::optional<double>(100.0 * raw_iaa(cor)))
        .end_row();
  }
  write_file("line_scores.csv", line_csv.str());

  const auto merged = merged_rows();
  std::vector<double> similarity_col;
  for (const auto& row : merged) {
    const auto& chosen = row.neural ? row.neural : row.baseline;
    similarity_col.push_back(chosen ? chosen->similarity_at_target
                                    : std::numeric_limits<double>::quiet_NaN());
  }
  std::vector<double> matching_col;
  std::vector<double> matches_agreed_col;
  for (const auto& c : all) {
    std::vector<StyleMatchPage> own;
    for (const auto& p : plan.pages) {
      if (p.target_artist == c.artist_id() && p.generated) own.push_back(p);
    }
    const MatchStats ms = match_stats(own, annotations->styles);
    matching_col.push_back(ms.tally.a > 0 ? ms.match_pct : std::numeric_limits<double>::quiet_NaN());
    matches_agreed_col.push_back(
        ms.match_agreed_pct.value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  if (all.size() >= 3) {
    write_file("table4a_metric_correlations.csv",
               metric_correlations({{"coherence", coherence_col},
                                    {"fluency", fluency_col},
                                    {"similarity", similarity_col},
                                    {"matching", matching_col}})
                   .to_csv(prov));
    std::vector<double> verses_col;
    std::vector<double> tokens_col;
    std::vector<double> richness_col;
    for (const auto& c : all) {
      const CorpusStats st = corpus_stats(c);
      verses_col.push_back(static_cast<double>(st.verse_count));
      tokens_col.push_back(static_cast<double>(st.total_tokens));
      richness_col.push_back(st.vocab_richness);
    }
    write_file("table4b_covariate_correlations.csv",
               cross_correlations({{"verses", verses_col},
                                   {"tokens", tokens_col},
                                   {"vocab_richness", richness_col}},
                                  {{"coherence", coherence_col},
                                   {"fluency", fluency_col},
                                   {"similarity", similarity_col},
                                   {"matches", matches_agreed_col}})
                   .to_csv(prov));
  } else {
    log_ << "warning: correlation tables need at least 3 artists\n";
  }
}

void Pipeline::score_similarity(const CommandOptions& options) {
  if (options.index_artist.empty()) throw Error(ErrorKind::kValidation, "--index is required");
  if (options.verse_files.empty()) throw Error(ErrorKind::kValidation, "--verse is required");
  const TfIdfIndex index =
      TfIdfIndex::build(corpus(options.index_artist).verses(), config_.similarity);
  CleaningRules rules;
  rules.min_tokens = 1;
  for (const auto& file : options.verse_files) {
    const auto text = read_text(file);
    for (const auto& v : parse_lyrics(text, rules, "", fs::path(file).stem().string())) {
      out_ << csv::format_real(max_similarity(index, v).score) << "\n";
    }
  }
}

void Pipeline::rhyme_density(const CommandOptions& options) {
  if (options.verse_files.empty()) throw Error(ErrorKind::kValidation, "--verse is required");
  const auto& dict = dictionary();
  CleaningRules rules;
  rules.min_tokens = 1;
  for (const auto& file : options.verse_files) {
    const auto text = read_text(file);
    for (const auto& v : parse_lyrics(text, rules, "", fs::path(file).stem().string())) {
      const RhymeAnalysis r = detect_rhymes(v, dict, config_.rhyme, config_.normalization);
      out_ << csv::format_real(options.weighted ? r.weighted_density : r.density) << "\n";
    }
  }
}

int run(std::string_view subcommand, const PipelineConfig& config,
        const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    Pipeline p(config, out, err);
    if (subcommand == "ingest") {
      p.ingest();
    } else if (subcommand == "stats") {
      p.stats();
    } else if (subcommand == "gen-baseline") {
      p.gen_baseline(options);
    } else if (subcommand == "score") {
      p.score();
    } else if (subcommand == "regress") {
      p.regress();
    } else if (subcommand == "pages") {
      p.pages();
    } else if (subcommand == "serve") {
      p.serve();
    } else if (subcommand == "report") {
      p.report();
    } else if (subcommand == "score-similarity") {
      p.score_similarity(options);
    } else if (subcommand == "rhyme-density") {
      p.rhyme_density(options);
    } else {
      throw Error(ErrorKind::kValidation, "unknown subcommand '" + std::string(subcommand) + "'");
    }
    return 0;
  } catch (const Error& e) {
    err << error_line(e.kind(), e.what()) << std::endl;
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << error_line(ErrorKind::kInternal, e.what()) << std::endl;
    return 3;
  }
}

}  // namespace ghosteval
