// The verse: unit of generation and evaluation.

#ifndef GHOSTEVAL_VERSE_H_
#define GHOSTEVAL_VERSE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ghosteval {

using Line = std::vector<std::string>;

/// Where a verse came from: the artist's own catalogue, or a generator
/// snapshot. `checkpoint` is an iteration count for neural checkpoints and
/// the n-gram order for the baseline.
struct Provenance {
  enum class Kind { kAuthentic, kGenerated };

  Kind kind = Kind::kAuthentic;
  std::int64_t checkpoint = 0;

  static Provenance authentic() { return {Kind::kAuthentic, 0}; }
  static Provenance generated(std::int64_t checkpoint) {
    return {Kind::kGenerated, checkpoint};
  }
  bool is_generated() const { return kind == Kind::kGenerated; }

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Verse {
  std::string artist_id;
  std::string verse_id;
  std::vector<Line> lines;
  Provenance provenance;

  /// Sum of line lengths.
  std::size_t token_count() const;
  /// All tokens in reading order.
  std::vector<std::string> tokens() const;

  friend bool operator==(const Verse&, const Verse&) = default;
};

}  // namespace ghosteval

#endif  // GHOSTEVAL_VERSE_H_
