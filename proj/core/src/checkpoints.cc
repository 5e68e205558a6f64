#include "ghosteval/checkpoints.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "ghosteval/error.h"
#include "ghosteval/ngram.h"
#include "ghosteval/random.h"
#include "ghosteval/text.h"

namespace ghosteval {

VerseScore Scorer::score(const Verse& verse) const {
  VerseScore s;
  // A verse made only of punctuation has no syllables and scores zero.
  const bool pronounceable = std::any_of(
      verse.lines.begin(), verse.lines.end(), [this](const Line& line) {
        return std::any_of(line.begin(), line.end(), [this](const std::string& t) {
          return pronounce(t, dict).pronounced();
        });
      });
  s.weighted_rhyme_density =
      pronounceable ? weighted_rhyme_density(verse, dict, params, normalization)
                    : 0.0;
  s.max_similarity = max_similarity(index, verse).score;
  return s;
}

CheckpointPoint Scorer::aggregate(double x,
                                  const std::vector<Verse>& verses) const {
  if (verses.empty()) {
    throw Error(ErrorKind::kDomain, "aggregate: no verses for checkpoint");
  }
  CheckpointPoint point;
  point.x = x;
  double rd = 0.0;
  double sim = 0.0;
  for (const auto& verse : verses) {
    const VerseScore s = score(verse);
    rd += s.weighted_rhyme_density;
    sim += s.max_similarity;
    point.verse_refs.push_back(verse.verse_id);
  }
  const double n = static_cast<double>(verses.size());
  point.avg_rhyme_density = rd / n;
  point.avg_max_similarity = sim / n;
  return point;
}

Verse baseline_verse(const NGramModel& model, std::uint64_t seed, int index,
                     std::size_t max_tokens) {
  const int n = model.order();
  GenerateOptions gen;
  gen.seed = derive_seed(seed, static_cast<std::uint64_t>(100 * n + index));
  gen.max_tokens = max_tokens;
  Verse verse = generate_verse(model, gen);
  verse.verse_id = "baseline/n" + std::to_string(n) + "/" + std::to_string(index);
  return verse;
}

BaselineSuite baseline_checkpoint_suite(const ArtistCorpus& corpus,
                                        const Scorer& scorer,
                                        const BaselineOptions& options) {
  if (options.verses_per_point < 1) {
    throw Error(ErrorKind::kDomain, "verses_per_point must be >= 1");
  }
  BaselineSuite suite;
  for (int n = options.min_order; n <= options.max_order; ++n) {
    const NGramModel model = train(corpus, n);
    std::vector<Verse> verses;
    for (int i = 0; i < options.verses_per_point; ++i) {
      verses.push_back(baseline_verse(model, options.seed, i, options.max_tokens));
    }
    suite.points.push_back(scorer.aggregate(n, verses));
    suite.verses.insert(suite.verses.end(), verses.begin(), verses.end());
  }
  return suite;
}

std::optional<std::int64_t> CheckpointWindows::window_for(
    std::int64_t iteration) const {
  for (std::int64_t centre : centres()) {
    if (iteration == centre) return centre;
    for (std::int64_t off : offsets) {
      if (iteration == centre - off || iteration == centre + off) {
        return centre;
      }
    }
  }
  return std::nullopt;
}

std::vector<std::int64_t> CheckpointWindows::centres() const {
  std::vector<std::int64_t> out;
  for (std::int64_t x = first; x <= last; x += spacing) out.push_back(x);
  return out;
}

std::optional<std::int64_t> parse_checkpoint_filename(std::string_view name) {
  constexpr std::string_view kPrefix = "iter_";
  constexpr std::string_view kSuffix = ".txt";
  if (!name.starts_with(kPrefix) || !name.ends_with(kSuffix)) {
    return std::nullopt;
  }
  const std::string_view digits = name.substr(
      kPrefix.size(), name.size() - kPrefix.size() - kSuffix.size());
  if (digits.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value < 0) {
    return std::nullopt;
  }
  return value;
}

Verse parse_checkpoint_verse(std::string_view text, std::string artist_id,
                             std::int64_t iteration) {
  require_valid_utf8(text);
  Verse verse;
  verse.artist_id = std::move(artist_id);
  verse.verse_id = verse.artist_id + "/iter_" + std::to_string(iteration);
  verse.provenance = Provenance::generated(iteration);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    Line line = split_whitespace(text.substr(pos, eol - pos));
    if (!line.empty()) verse.lines.push_back(std::move(line));
    pos = eol + 1;
  }
  return verse;
}

std::vector<Verse> read_checkpoint_directory(const std::filesystem::path& dir,
                                             const std::string& artist_id) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::kMissingInput,
                "checkpoint directory not found: " + dir.string());
  }
  std::map<std::int64_t, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (auto k = parse_checkpoint_filename(entry.path().filename().string())) {
      files.emplace(*k, entry.path());
    }
  }
  std::vector<Verse> verses;
  for (const auto& [iteration, path] : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(ErrorKind::kMissingInput, "cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    Verse verse = parse_checkpoint_verse(buf.str(), artist_id, iteration);
    if (verse.token_count() > 0) verses.push_back(std::move(verse));
  }
  return verses;
}

ExternalCheckpoints load_external_checkpoints(
    const std::filesystem::path& dir, const std::string& artist_id,
    const Scorer& scorer, const CheckpointWindows& windows) {
  ExternalCheckpoints out;
  out.verses = read_checkpoint_directory(dir, artist_id);

  std::map<std::int64_t, std::vector<Verse>> by_window;
  for (const auto& verse : out.verses) {
    if (auto centre = windows.window_for(verse.provenance.checkpoint)) {
      by_window[*centre].push_back(verse);
    }
  }
  for (std::int64_t centre : windows.centres()) {
    auto it = by_window.find(centre);
    if (it == by_window.end()) {
      throw Error(ErrorKind::kMissingCheckpoint,
                  "no checkpoint verses within the window of iteration " +
                      std::to_string(centre) + " in " + dir.string());
    }
    if (it->second.size() == 1) {
      out.warnings.push_back("checkpoint " + std::to_string(centre) +
                             " averaged over a single verse");
    }
    out.points.push_back(
        scorer.aggregate(static_cast<double>(centre), it->second));
  }
  return out;
}

}  // namespace ghosteval
