// Lyric ingestion: cleaning, verse segmentation, per-artist collections and
// dataset statistics.

#ifndef GHOSTEVAL_CORPUS_H_
#define GHOSTEVAL_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ghosteval/verse.h"

namespace ghosteval {

/// Heuristic lyric-site cleanup expressed as data. All patterns are
/// ECMAScript regexes matched case-insensitively against a trimmed line.
struct CleaningRules {
  /// Lines dropped on their own (song metadata, typed-by credits).
  std::vector<std::string> drop_line;
  /// A matching line starts a block (e.g. a chorus) that is dropped up to the
  /// next blank line, header included.
  std::vector<std::string> drop_block;
  /// Fragments removed from inside lines (repetition markup such as "(x2)").
  std::vector<std::string> strip;
  /// Lines that end the current verse and are themselves dropped
  /// ("[Verse 2]"). Blank lines always separate verses.
  std::vector<std::string> separator;
  /// Verses with fewer tokens are discarded.
  std::size_t min_tokens = 20;

  static CleaningRules defaults();
  /// Parses the JSON rule file format; missing keys keep their defaults.
  static CleaningRules from_json(std::string_view json);
  std::string to_json() const;
};

/// Segments `raw_text` into cleaned, lowercased, tokenized verses. Verse ids
/// are "<song_id>:<k>" with k counting retained verses from 0.
std::vector<Verse> parse_lyrics(std::string_view raw_text,
                                const CleaningRules& rules,
                                std::string_view artist_id = {},
                                std::string_view song_id = "song");

class ArtistCorpus {
 public:
  ArtistCorpus() = default;
  /// Throws Error(kValidation) on duplicate verse ids or empty verses.
  ArtistCorpus(std::string artist_id, std::vector<Verse> verses);

  const std::string& artist_id() const { return artist_id_; }
  const std::vector<Verse>& verses() const { return verses_; }
  const std::set<std::string>& vocabulary() const { return vocabulary_; }
  std::size_t total_tokens() const { return total_tokens_; }
  bool empty() const { return verses_.empty(); }

 private:
  std::string artist_id_;
  std::vector<Verse> verses_;
  std::set<std::string> vocabulary_;
  std::size_t total_tokens_ = 0;
};

/// Reads every *.txt file under `dir` (sorted by name) as one song.
ArtistCorpus load_artist_directory(const std::filesystem::path& dir,
                                   const CleaningRules& rules,
                                   const std::string& artist_id);

struct CorpusStats {
  std::size_t verse_count = 0;
  std::size_t unique_vocab = 0;
  std::size_t total_tokens = 0;
  /// 100 * unique_vocab / total_tokens.
  double vocab_richness = 0.0;
  double avg_len = 0.0;
  /// Population standard deviation of verse token counts.
  double stdev_len = 0.0;
  std::size_t max_len = 0;
};

CorpusStats corpus_stats(const ArtistCorpus& corpus);

/// Table-1 shaped CSV: artist,verses,unique_vocab,vocab_richness,avg_len,
/// stdev_len,max_len.
std::string corpus_stats_csv(const std::vector<ArtistCorpus>& corpora,
                             const std::string& provenance = {});

/// Manifest: {"artist_id", "verses": [{"verse_id", "lines", "token_count"}]}.
std::string corpus_manifest_json(const ArtistCorpus& corpus);
ArtistCorpus corpus_from_manifest(std::string_view json);

}  // namespace ghosteval

#endif  // GHOSTEVAL_CORPUS_H_
