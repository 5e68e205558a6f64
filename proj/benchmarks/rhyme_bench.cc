#include <benchmark/benchmark.h>

#include <filesystem>

#include "ghosteval/corpus.h"
#include "ghosteval/rhyme.h"

namespace ghosteval {
namespace {

void BM_DetectRhymes(benchmark::State& state) {
  const std::filesystem::path data = GHOSTEVAL_DATA_DIR;
  const auto dict = PronouncingDictionary::load(data / "pronouncing.dict");
  const ArtistCorpus corpus = load_artist_directory(data / "golden" / "corpus" / "mc_aurora",
                                                    CleaningRules::defaults(), "mc_aurora");
  for (auto _ : state) {
    for (const auto& verse : corpus.verses()) {
      benchmark::DoNotOptimize(detect_rhymes(verse, dict));
    }
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(corpus.verses().size()));
}
BENCHMARK(BM_DetectRhymes);

}  // namespace
}  // namespace ghosteval
