// End-to-end orchestration behind the `ghosteval` command line tool.
//
// Every artifact lands under the configured output directory:
//   corpus/<artist>.json                 ingest
//   table1_corpus_stats.csv              stats
//   baseline/<artist>/n<k>_<i>.txt       gen-baseline
//   scores/<artist>_points.csv           score
//   scores/<artist>_verses.csv           score
//   scores/artist_rhyme_density.csv      score
//   table3_merged.csv                    regress
//   pages.json, task_plan.json           pages
//   table2_style_match.csv, fig3_confusion.csv, line_scores.csv,
//   table4a_metric_correlations.csv, table4b_covariate_correlations.csv,
//   table5_structure.csv                 report

#ifndef GHOSTEVAL_PIPELINE_H_
#define GHOSTEVAL_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ghosteval/annotation.h"
#include "ghosteval/checkpoints.h"
#include "ghosteval/corpus.h"
#include "ghosteval/error.h"
#include "ghosteval/evalmerge.h"
#include "ghosteval/pronounce.h"
#include "ghosteval/rhyme.h"
#include "ghosteval/service.h"
#include "ghosteval/similarity.h"

namespace ghosteval {

struct PagesConfig {
  std::size_t eval_verses_per_artist = 5;
  std::size_t min_eval_tokens = 40;
  std::size_t line_task_verses_per_artist = 1;
  int generated_order = 3;  // baseline order used when no neural checkpoints
  PageLayout layout;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string roster;  // path to roster JSON
  std::string log;     // defaults to <output>/annotations.log
  std::string ui_dir;
};

struct PipelineConfig {
  /// Directory relative paths are resolved against.
  std::filesystem::path base_dir = ".";

  std::string corpus_root;
  std::vector<std::string> artists;
  std::string cleaning_rules;  // empty: built-in defaults
  std::string dictionary;
  RhymeParams rhyme;
  EntropyNormalization normalization = EntropyNormalization::kLogTokenCount;
  SimilarityOptions similarity;
  std::uint64_t seed = 42;
  BaselineOptions baseline;
  std::string checkpoint_root;  // empty: no neural checkpoints
  CheckpointWindows windows;
  std::optional<std::int64_t> total_iterations;
  PagesConfig pages;
  ServiceConfig service;
  std::string annotations;  // JSONL consumed by `report`
  std::string output_dir = "out";

  /// Unknown keys are rejected with Error(kValidation).
  static PipelineConfig from_json(std::string_view json,
                                  std::filesystem::path base_dir = ".");
  /// Throws Error(kMissingInput) when the file does not exist.
  static PipelineConfig load(const std::filesystem::path& path);
  std::string to_json() const;

  std::filesystem::path resolve(const std::string& path) const;
  std::filesystem::path output() const { return resolve(output_dir); }

  /// FNV-1a over the experiment-defining fields (output and service
  /// settings excluded), as 16 hex digits.
  std::string hash() const;
  /// "config=<hash> seed=<seed>", the first line of every CSV.
  std::string provenance() const;

  /// Checks that referenced inputs exist. Throws Error(kMissingInput).
  void validate() const;
};

/// Options of individual subcommands that do not belong in the config.
struct CommandOptions {
  std::vector<std::string> artists;  // restricts per-artist stages
  std::optional<int> order;          // gen-baseline --n
  std::optional<int> count;          // gen-baseline --count
  std::string index_artist;          // score-similarity --index
  std::vector<std::string> verse_files;
  bool weighted = false;             // rhyme-density --weighted
};

int exit_code_for(ErrorKind kind);

/// One JSON object naming the error kind, message and exit code.
std::string error_line(ErrorKind kind, std::string_view message);

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, std::ostream& out, std::ostream& log);
  ~Pipeline();

  const PipelineConfig& config() const { return config_; }

  void ingest();
  void stats();
  void gen_baseline(const CommandOptions& options);
  void score();
  void regress();
  void pages();
  void serve();
  void report();
  void score_similarity(const CommandOptions& options);
  void rhyme_density(const CommandOptions& options);

  /// Artist corpora in configured order, loaded once.
  const std::vector<ArtistCorpus>& corpora();
  const PronouncingDictionary& dictionary();

  struct ArtistScores {
    std::string artist_id;
    double avg_rhyme_density = 0.0;
    BaselineSuite baseline;
    std::optional<ExternalCheckpoints> neural;
  };
  const std::vector<ArtistScores>& scores();
  std::vector<MergedRow> merged_rows();

  struct PagePlan {
    std::vector<StyleMatchPage> pages;
    TaskPlan tasks;
  };
  const PagePlan& page_plan();

 private:
  struct State;
  const ArtistCorpus& corpus(const std::string& artist);
  std::vector<std::string> selected(const std::vector<std::string>& requested);
  void write_file(const std::filesystem::path& relative, std::string_view data);
  std::optional<AnnotationSet> load_annotations();

  PipelineConfig config_;
  std::ostream& out_;
  std::ostream& log_;
  std::unique_ptr<State> state_;
};

/// Runs a subcommand, reporting errors as an error line on `err`. Returns
/// the process exit status.
int run(std::string_view subcommand, const PipelineConfig& config,
        const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace ghosteval

#endif  // GHOSTEVAL_PIPELINE_H_
