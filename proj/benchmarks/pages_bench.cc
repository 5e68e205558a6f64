#include <benchmark/benchmark.h>

#include <map>

#include "bench_util.h"
#include "ghosteval/annotation.h"

namespace ghosteval {
namespace {

void BM_BuildStylePages(benchmark::State& state) {
  Rng rng(6);
  std::map<std::string, std::vector<Verse>> pools;
  std::vector<Verse> eval;
  for (int a = 0; a < 13; ++a) {
    const std::string artist = "artist" + std::to_string(a);
    for (int v = 0; v < 50; ++v) {
      pools[artist].push_back(
          bench::synthetic_verse(rng, artist, artist + ":" + std::to_string(v), 500, 8, 8));
    }
    for (int v = 0; v < 5; ++v) eval.push_back(pools[artist][static_cast<std::size_t>(v)]);
  }
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_style_pages(eval, pools, seed++));
  }
}
BENCHMARK(BM_BuildStylePages);

}  // namespace
}  // namespace ghosteval
