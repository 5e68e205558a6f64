// Rhyme density of a verse and its entropy-weighted variant.
//
// The detector works on the verse's syllable sequence. Every pair of
// word-final syllables no more than `window_lines - 1` lines apart is an
// anchor; the anchor rhymes when the two nuclei are equal and the codas are
// compatible. A rhyming anchor is extended backwards, syllable by syllable,
// while the nuclei keep matching (up to `max_span` syllables and without the
// two spans overlapping). All syllables of both spans count as rhymed; a
// syllable is counted once no matter how many spans cover it.

#ifndef GHOSTEVAL_RHYME_H_
#define GHOSTEVAL_RHYME_H_

#include <cstddef>
#include <string>
#include <vector>

#include "ghosteval/pronounce.h"
#include "ghosteval/verse.h"

namespace ghosteval {

struct RhymeParams {
  /// Anchors are searched within this many consecutive lines.
  int window_lines = 2;
  /// Longest span credited to one match.
  int max_span = 4;
  /// Treat unstressed AH, IH and UH as one reduced vowel.
  bool reduce_unstressed = true;
  /// Each span must contain a syllable with primary or secondary stress.
  bool require_stress = true;
  /// Codas of equal length rhyme when every consonant pair shares a class.
  std::vector<std::vector<std::string>> coda_classes = default_coda_classes();

  static std::vector<std::vector<std::string>> default_coda_classes();
};

enum class EntropyNormalization {
  /// H / log2(token count): 1 for all-distinct tokens, 0 for one token type.
  kLogTokenCount,
  /// H / token count, the literal reading.
  kTokenCount,
};

struct SyllableSlot {
  std::size_t line = 0;
  std::size_t token = 0;      // index within the line
  std::size_t syllable = 0;   // index within the token
  std::string nucleus;        // after reduction
  int stress = 0;
  bool word_final = false;
  bool rhymed = false;
};

/// Two rhyming spans given by their first syllable positions.
struct RhymePair {
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t length = 0;
};

struct RhymeAnalysis {
  std::size_t total_syllables = 0;
  std::size_t rhymed_syllables = 0;
  std::vector<RhymePair> rhyme_pairs;
  std::vector<SyllableSlot> syllables;
  double entropy_bits = 0.0;
  double entropy_weight = 0.0;
  double density = 0.0;
  double weighted_density = 0.0;
};

bool codas_compatible(const std::vector<std::string>& a,
                      const std::vector<std::string>& b,
                      const RhymeParams& params);

/// Shannon entropy (bits) of the verse's token distribution.
double token_entropy_bits(const Verse& verse);

/// Throws Error(kDomain) for an empty verse.
double entropy_weight(const Verse& verse,
                      EntropyNormalization normalization =
                          EntropyNormalization::kLogTokenCount);

/// Throws Error(kDomain) when the verse has no pronounceable syllable.
RhymeAnalysis detect_rhymes(const Verse& verse,
                            const PronouncingDictionary& dict,
                            const RhymeParams& params = {},
                            EntropyNormalization normalization =
                                EntropyNormalization::kLogTokenCount);

double weighted_rhyme_density(const Verse& verse,
                              const PronouncingDictionary& dict,
                              const RhymeParams& params = {},
                              EntropyNormalization normalization =
                                  EntropyNormalization::kLogTokenCount);

}  // namespace ghosteval

#endif  // GHOSTEVAL_RHYME_H_
