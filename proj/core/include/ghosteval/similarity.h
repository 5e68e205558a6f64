// Textual uniqueness: maximum tf-idf cosine similarity between a verse and
// every training verse of the target artist.

#ifndef GHOSTEVAL_SIMILARITY_H_
#define GHOSTEVAL_SIMILARITY_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ghosteval/verse.h"

namespace ghosteval {

struct SimilarityOptions {
  /// Count each line break as a "<br>" term. Off by default: structural
  /// tokens do not take part in the tf-idf representation.
  bool include_line_breaks = false;
};

/// Sparse weight vector keyed by token.
struct VerseVector {
  std::map<std::string, double> weights;

  double norm() const;
  bool is_zero() const;
};

double cosine(const VerseVector& a, const VerseVector& b);

struct SimilarityResult;
class TfIdfIndex;
SimilarityResult max_similarity(const TfIdfIndex& index, const Verse& candidate);

/// Immutable index over training verses. Term j in verse i is weighted
/// f_ij * ln(N / n_j), with N the number of indexed verses, n_j the number
/// of verses containing j and f_ij the count of j in verse i.
class TfIdfIndex {
 public:
  /// Throws Error(kDomain) when `training` is empty.
  static TfIdfIndex build(std::span<const Verse> training,
                          SimilarityOptions options = {});

  std::size_t verse_count() const { return verse_ids_.size(); }
  const std::string& verse_id(std::size_t i) const { return verse_ids_[i]; }
  const SimilarityOptions& options() const { return options_; }

  /// n_j; 0 for tokens outside the index.
  std::size_t doc_freq(std::string_view token) const;
  /// f_ij.
  std::size_t term_freq(std::size_t verse, std::string_view token) const;
  /// ln(N / n_j); 0 for tokens outside the index.
  double idf(std::string_view token) const;
  double weight(std::size_t verse, std::string_view token) const;
  double weight_norm(std::size_t verse) const { return norms_[verse]; }

  /// Term counts of a verse under this index's tokenization options.
  std::map<std::string, std::size_t> term_counts(const Verse& verse) const;
  /// Weights a verse with the index's idf. Unknown tokens get weight 0 and
  /// are omitted.
  VerseVector vectorize(const Verse& verse) const;
  VerseVector training_vector(std::size_t verse) const;

 private:
  using TermId = std::uint32_t;
  struct Posting {
    std::uint32_t verse;
    std::uint32_t count;
  };

  std::optional<TermId> term_id(std::string_view token) const;

  SimilarityOptions options_;
  std::vector<std::string> verse_ids_;
  std::unordered_map<std::string, TermId> term_ids_;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<double> norms_;

  friend SimilarityResult max_similarity(const TfIdfIndex&, const Verse&);
};

struct SimilarityResult {
  /// Max cosine over training verses, in [0, 1].
  double score = 0.0;
  /// Set when the candidate's vector is all zeros (every token unknown or
  /// present in every training verse); score is then 0.
  bool degenerate = false;
  /// Index of the most similar training verse, when score > 0.
  std::optional<std::size_t> best_match;
};

SimilarityResult max_similarity(const TfIdfIndex& index, const Verse& candidate);

}  // namespace ghosteval

#endif  // GHOSTEVAL_SIMILARITY_H_
