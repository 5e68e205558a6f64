// Baseline verse generator: an unsmoothed n-gram model whose backoff
// wildcards the most recent context positions (skip-gram backoff).

#ifndef GHOSTEVAL_NGRAM_H_
#define GHOSTEVAL_NGRAM_H_

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ghosteval/corpus.h"
#include "ghosteval/verse.h"

namespace ghosteval {

inline constexpr std::string_view kVerseStart = "<verse>";
inline constexpr std::string_view kVerseEnd = "</verse>";
inline constexpr std::string_view kLineBreak = "<br>";
inline constexpr int kMaxOrder = 9;
inline constexpr std::size_t kDefaultMaxTokens = 1100;

bool is_sentinel(std::string_view token);

/// <verse> line1 <br> line2 ... lineK </verse>
std::vector<std::string> frame_verse(const Verse& verse);

/// Raw counts of the continuations of one context pattern, ordered by
/// token.
struct NextTokenDistribution {
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  /// Number of wildcarded context positions; equals the effective context
  /// length when the unigram level answered.
  int backoff_steps = 0;
  bool unigram = false;

  double probability(std::string_view token) const;
  std::uint64_t count(std::string_view token) const;
};

class NGramModel {
 public:
  int order() const { return order_; }
  const std::string& artist_id() const { return artist_id_; }
  /// Training tokens plus the three sentinels.
  const std::set<std::string>& vocabulary() const { return vocabulary_; }

  /// Number of training positions where `prefix` is followed, after `gap`
  /// arbitrary tokens, by `token`.
  std::uint64_t pattern_count(std::span<const std::string> prefix,
                              std::size_t gap, std::string_view token) const;

 private:
  using TokenId = std::uint32_t;
  using Key = std::vector<TokenId>;
  struct KeyHash {
    std::size_t operator()(const Key& key) const;
  };
  using Continuations = std::unordered_map<TokenId, std::uint64_t>;
  using Table = std::unordered_map<Key, Continuations, KeyHash>;

  bool encode(std::span<const std::string> tokens, Key& out) const;
  const Continuations* find(const Key& prefix, std::size_t gap) const;
  NextTokenDistribution to_distribution(const Continuations& counts,
                                        int backoff_steps, bool unigram) const;

  int order_ = 1;
  std::string artist_id_;
  std::set<std::string> vocabulary_;
  std::vector<std::string> tokens_;  // sorted; id = position
  std::unordered_map<std::string, TokenId> ids_;
  // tables_[k - 1][g]: prefix of k concrete tokens followed by g wildcards.
  std::vector<std::vector<Table>> tables_;
  Continuations unigram_;

  friend NGramModel train(const ArtistCorpus& corpus, int n);
  friend NextTokenDistribution next_token_distribution(
      const NGramModel& model, std::span<const std::string> context);
};

/// Collects counts for every prefix length 1..n-1 and every wildcard gap, so
/// that both growing verse-start contexts and all backoff patterns are
/// available. Throws Error(kDomain) unless 1 <= n <= 9 and the corpus is
/// non-empty.
NGramModel train(const ArtistCorpus& corpus, int n);

/// Uses the last n-1 context tokens (fewer at verse start). When that full
/// pattern was never seen, the most recent position is replaced by a
/// wildcard, then the next, and so on; the unigram level ends the chain.
NextTokenDistribution next_token_distribution(
    const NGramModel& model, std::span<const std::string> context);

struct GenerateOptions {
  std::uint64_t seed = 0;
  std::size_t max_tokens = kDefaultMaxTokens;
  /// Argmax instead of sampling; ties go to the lexicographically smallest
  /// token.
  bool greedy = false;
};

/// Samples from <verse> until </verse> or `max_tokens` draws. End-of-verse
/// and line breaks are not drawn while the verse (respectively the current
/// line) is still empty. Throws Error(kDomain) when max_tokens < 1.
Verse generate_verse(const NGramModel& model, const GenerateOptions& options);

}  // namespace ghosteval

#endif  // GHOSTEVAL_NGRAM_H_
