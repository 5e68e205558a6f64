// Checkpoint series: the (checkpoint, avg rhyme density, avg max similarity)
// points fed to the regression merge, for the n-gram baseline and for
// externally generated verses.

#ifndef GHOSTEVAL_CHECKPOINTS_H_
#define GHOSTEVAL_CHECKPOINTS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ghosteval/corpus.h"
#include "ghosteval/ngram.h"
#include "ghosteval/pronounce.h"
#include "ghosteval/rhyme.h"
#include "ghosteval/similarity.h"
#include "ghosteval/verse.h"

namespace ghosteval {

struct CheckpointPoint {
  /// Iteration number, or the n-gram order for the baseline.
  double x = 0.0;
  double avg_rhyme_density = 0.0;
  double avg_max_similarity = 0.0;
  std::vector<std::string> verse_refs;
};

/// Metrics of a single verse against an artist's training index.
struct VerseScore {
  double weighted_rhyme_density = 0.0;
  double max_similarity = 0.0;
};

struct Scorer {
  const TfIdfIndex& index;
  const PronouncingDictionary& dict;
  RhymeParams params;
  EntropyNormalization normalization = EntropyNormalization::kLogTokenCount;

  VerseScore score(const Verse& verse) const;
  /// Averages over `verses` (at least one) into a point at `x`.
  CheckpointPoint aggregate(double x, const std::vector<Verse>& verses) const;
};

struct BaselineOptions {
  std::uint64_t seed = 42;
  int verses_per_point = 5;
  int min_order = 1;
  int max_order = 9;
  std::size_t max_tokens = 1100;
};

struct BaselineSuite {
  std::vector<CheckpointPoint> points;
  std::vector<Verse> verses;  // ids "baseline/n<k>/<i>"
};

/// Verse i of the order-n suite, seeded with derive_seed(seed, 100n + i) and
/// identified as "baseline/n<k>/<i>".
Verse baseline_verse(const NGramModel& model, std::uint64_t seed, int index,
                     std::size_t max_tokens = kDefaultMaxTokens);

/// For each n in [min_order, max_order], trains an n-gram model, samples
/// `verses_per_point` verses and averages their weighted rhyme density and
/// max similarity into one point with x = n.
BaselineSuite baseline_checkpoint_suite(const ArtistCorpus& corpus,
                                        const Scorer& scorer,
                                        const BaselineOptions& options = {});

/// Checkpoint aggregation windows: points at first, first + spacing, ...,
/// last; the verse at iteration x and at x +/- each offset feed the point.
struct CheckpointWindows {
  std::int64_t first = 0;
  std::int64_t last = 16000;
  std::int64_t spacing = 2000;
  std::vector<std::int64_t> offsets = {100, 200, 300, 400};

  /// The window centre an iteration belongs to, if any.
  std::optional<std::int64_t> window_for(std::int64_t iteration) const;
  std::vector<std::int64_t> centres() const;
};

/// "iter_<k>.txt" -> k.
std::optional<std::int64_t> parse_checkpoint_filename(std::string_view name);

/// One verse per file; lines split on whitespace only, blank lines skipped.
Verse parse_checkpoint_verse(std::string_view text, std::string artist_id,
                             std::int64_t iteration);

/// Every iter_<k>.txt verse in `dir`, sorted by iteration.
std::vector<Verse> read_checkpoint_directory(const std::filesystem::path& dir,
                                             const std::string& artist_id);

struct ExternalCheckpoints {
  std::vector<CheckpointPoint> points;
  std::vector<std::string> warnings;
  std::vector<Verse> verses;  // every checkpoint verse found, by iteration
};

/// Throws Error(kMissingInput) when `dir` does not exist and
/// Error(kMissingCheckpoint) naming x when a window holds no verse.
ExternalCheckpoints load_external_checkpoints(
    const std::filesystem::path& dir, const std::string& artist_id,
    const Scorer& scorer, const CheckpointWindows& windows = {});

}  // namespace ghosteval

#endif  // GHOSTEVAL_CHECKPOINTS_H_
