#ifndef GHOSTEVAL_BENCHMARKS_BENCH_UTIL_H_
#define GHOSTEVAL_BENCHMARKS_BENCH_UTIL_H_

#include <string>
#include <vector>

#include "ghosteval/random.h"
#include "ghosteval/verse.h"

namespace ghosteval::bench {

inline Verse synthetic_verse(Rng& rng, const std::string& artist, const std::string& id,
                             std::size_t vocab, std::size_t lines, std::size_t per_line) {
  Verse v;
  v.artist_id = artist;
  v.verse_id = id;
  for (std::size_t l = 0; l < lines; ++l) {
    Line line;
    for (std::size_t t = 0; t < per_line; ++t) {
      line.push_back("w" + std::to_string(rng.uniform_index(vocab)));
    }
    v.lines.push_back(std::move(line));
  }
  return v;
}

inline std::vector<Verse> synthetic_corpus(std::uint64_t seed, std::size_t verses,
                                           std::size_t vocab) {
  Rng rng(seed);
  std::vector<Verse> out;
  for (std::size_t i = 0; i < verses; ++i) {
    out.push_back(synthetic_verse(rng, "a", "v" + std::to_string(i), vocab, 16, 8));
  }
  return out;
}

}  // namespace ghosteval::bench

#endif  // GHOSTEVAL_BENCHMARKS_BENCH_UTIL_H_
