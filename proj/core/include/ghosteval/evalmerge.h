// Merging uniqueness and stylistic similarity: regression lines over a
// checkpoint series, the similarity read off at the artist's rhyme density,
// metric correlations and the generated-verse structure report.

#ifndef GHOSTEVAL_EVALMERGE_H_
#define GHOSTEVAL_EVALMERGE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ghosteval/checkpoints.h"
#include "ghosteval/verse.h"

namespace ghosteval {

struct RegressionLine {
  double slope = 0.0;
  double intercept = 0.0;
  /// Undefined when y has zero variance.
  std::optional<double> r_squared;

  double at(double x) const { return intercept + slope * x; }
};

/// Ordinary least squares. Throws Error(kDegenerateFit) with fewer than two
/// points or when every x is equal.
RegressionLine fit_line(const std::vector<std::pair<double, double>>& points);

struct MergedScore {
  double target_rhyme_density = 0.0;
  /// Where the rhyme-density line reaches the target; may be negative.
  double intersection_x = 0.0;
  double similarity_at_target = 0.0;
  /// intersection_x lies outside the observed x range.
  bool extrapolated = false;
  RegressionLine rhyme_line;
  RegressionLine similarity_line;
};

/// Throws Error(kNoIntersection) for a horizontal rhyme line away from the
/// target and Error(kUnderdetermined) for one lying on it.
MergedScore merged_similarity(const std::vector<CheckpointPoint>& series,
                              double target_rhyme_density);

/// Symmetric correlation table; nullopt marks an undefined coefficient
/// (a zero-variance column).
struct CorrelationMatrix {
  std::vector<std::string> row_names;
  std::vector<std::string> column_names;
  std::vector<std::vector<std::optional<double>>> values;

  std::optional<double> at(const std::string& row,
                           const std::string& column) const;
  std::string to_csv(const std::string& provenance = {}) const;
};

struct NamedColumn {
  std::string name;
  std::vector<double> values;
};

std::optional<double> pearson(const std::vector<double>& x,
                              const std::vector<double>& y);

/// All-pairs Pearson correlations; needs at least three rows and columns of
/// equal length (Error(kDomain) otherwise).
CorrelationMatrix metric_correlations(const std::vector<NamedColumn>& columns);

/// Rows x columns cross-correlation table (covariates vs metrics).
CorrelationMatrix cross_correlations(const std::vector<NamedColumn>& rows,
                                     const std::vector<NamedColumn>& columns);

struct StructureRow {
  std::string artist_id;
  std::size_t max_len = 0;
  std::int64_t checkpoint = 0;
  /// 100 * checkpoint / total_iterations, when the total is known.
  std::optional<double> percent_of_training;
};

/// Longest generated verse (earliest checkpoint on ties) and where it
/// occurred. Returns nullopt when `verses` is empty.
std::optional<StructureRow> verse_structure_report(
    const std::string& artist_id, const std::vector<Verse>& verses,
    std::optional<std::int64_t> total_iterations);

std::string structure_report_csv(const std::vector<StructureRow>& rows,
                                 const std::string& provenance = {});

struct MergedRow {
  std::string artist_id;
  double avg_rhyme_density = 0.0;
  std::optional<MergedScore> baseline;
  std::optional<MergedScore> neural;
};

/// artist,avg_rhyme_density,baseline_similarity,baseline_n,lstm_similarity,
/// lstm_iteration
std::string merged_table_csv(const std::vector<MergedRow>& rows,
                             const std::string& provenance = {});

}  // namespace ghosteval

#endif  // GHOSTEVAL_EVALMERGE_H_
