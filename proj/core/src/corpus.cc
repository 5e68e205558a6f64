#include "ghosteval/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "ghosteval/csv.h"
#include "ghosteval/error.h"
#include "ghosteval/text.h"
#include "json.hpp"

namespace ghosteval {

namespace {

using nlohmann::json;

std::vector<std::regex> compile(const std::vector<std::string>& patterns) {
  std::vector<std::regex> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) {
    try {
      out.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error(ErrorKind::kValidation,
                  "bad cleaning pattern '" + p + "': " + e.what());
    }
  }
  return out;
}

bool any_match(const std::vector<std::regex>& patterns, const std::string& s) {
  return std::any_of(patterns.begin(), patterns.end(), [&](const auto& re) {
    return std::regex_search(s, re);
  });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kMissingInput, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

CleaningRules CleaningRules::defaults() {
  CleaningRules rules;
  rules.drop_line = {
      R"(^(artist|album|song|title|typed by|transcribed by|lyrics by)\s*:)",
      R"(^https?://)",
      R"(^\*[^*]*\*$)",
  };
  rules.drop_block = {
      R"(^[\[\(\{<]?\s*(chorus|hook|refrain)\b)",
  };
  rules.strip = {
      R"(\(\s*(x\s*\d+|\d+\s*x)\s*\))",
      R"(\[\s*(x\s*\d+|\d+\s*x)\s*\])",
      R"(\*\s*repeat[^*]*\*)",
  };
  rules.separator = {
      R"(^\[[^\]]*\]$)",
      R"(^(verse|intro|outro|bridge)\b[^:]*:$)",
  };
  return rules;
}

CleaningRules CleaningRules::from_json(std::string_view text) {
  CleaningRules rules = defaults();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kValidation,
                std::string("cleaning rules: ") + e.what());
  }
  auto read_list = [&doc](const char* key, std::vector<std::string>& out) {
    if (doc.contains(key)) out = doc.at(key).get<std::vector<std::string>>();
  };
  read_list("drop_line", rules.drop_line);
  read_list("drop_block", rules.drop_block);
  read_list("strip", rules.strip);
  read_list("separator", rules.separator);
  if (doc.contains("min_tokens")) {
    rules.min_tokens = doc.at("min_tokens").get<std::size_t>();
  }
  compile(rules.drop_line);
  compile(rules.drop_block);
  compile(rules.strip);
  compile(rules.separator);
  return rules;
}

std::string CleaningRules::to_json() const {
  json doc = {{"drop_line", drop_line},   {"drop_block", drop_block},
              {"strip", strip},           {"separator", separator},
              {"min_tokens", min_tokens}};
  return doc.dump(2);
}

std::vector<Verse> parse_lyrics(std::string_view raw_text,
                                const CleaningRules& rules,
                                std::string_view artist_id,
                                std::string_view song_id) {
  require_valid_utf8(raw_text);
  const auto drop_line = compile(rules.drop_line);
  const auto drop_block = compile(rules.drop_block);
  const auto strip = compile(rules.strip);
  const auto separator = compile(rules.separator);

  std::vector<Verse> verses;
  std::vector<Line> current;
  std::size_t current_tokens = 0;
  bool in_block = false;

  auto flush = [&]() {
    if (!current.empty() && current_tokens >= rules.min_tokens &&
        current_tokens > 0) {
      Verse verse;
      verse.artist_id = std::string(artist_id);
      verse.verse_id =
          std::string(song_id) + ":" + std::to_string(verses.size());
      verse.lines = std::move(current);
      verse.provenance = Provenance::authentic();
      verses.push_back(std::move(verse));
    }
    current.clear();
    current_tokens = 0;
  };

  std::size_t pos = 0;
  while (pos <= raw_text.size()) {
    std::size_t eol = raw_text.find('\n', pos);
    if (eol == std::string_view::npos) eol = raw_text.size();
    const std::string line(trim(raw_text.substr(pos, eol - pos)));
    pos = eol + 1;

    if (line.empty()) {
      flush();
      in_block = false;
      continue;
    }
    if (in_block) continue;
    if (any_match(drop_block, line)) {
      flush();
      in_block = true;
      continue;
    }
    if (any_match(separator, line)) {
      flush();
      continue;
    }
    if (any_match(drop_line, line)) continue;

    std::string cleaned = line;
    for (const auto& re : strip) cleaned = std::regex_replace(cleaned, re, " ");
    Line tokens = tokenize(cleaned);
    if (tokens.empty()) continue;
    current_tokens += tokens.size();
    current.push_back(std::move(tokens));
  }
  flush();
  return verses;
}

ArtistCorpus::ArtistCorpus(std::string artist_id, std::vector<Verse> verses)
    : artist_id_(std::move(artist_id)), verses_(std::move(verses)) {
  std::unordered_set<std::string> ids;
  for (const auto& verse : verses_) {
    if (!ids.insert(verse.verse_id).second) {
      throw Error(ErrorKind::kValidation,
                  "duplicate verse id '" + verse.verse_id + "' in corpus " +
                      artist_id_);
    }
    if (verse.token_count() == 0) {
      throw Error(ErrorKind::kValidation,
                  "empty verse '" + verse.verse_id + "'");
    }
    for (const auto& line : verse.lines) {
      vocabulary_.insert(line.begin(), line.end());
      total_tokens_ += line.size();
    }
  }
}

ArtistCorpus load_artist_directory(const std::filesystem::path& dir,
                                   const CleaningRules& rules,
                                   const std::string& artist_id) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::kMissingInput,
                "corpus directory not found: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Verse> verses;
  for (const auto& file : files) {
    const std::string song_id = artist_id + "/" + file.stem().string();
    auto song = parse_lyrics(read_file(file), rules, artist_id, song_id);
    verses.insert(verses.end(), std::make_move_iterator(song.begin()),
                  std::make_move_iterator(song.end()));
  }
  return ArtistCorpus(artist_id, std::move(verses));
}

CorpusStats corpus_stats(const ArtistCorpus& corpus) {
  if (corpus.empty()) {
    throw Error(ErrorKind::kDomain,
                "corpus_stats: empty corpus for artist '" +
                    corpus.artist_id() + "'");
  }
  CorpusStats stats;
  stats.verse_count = corpus.verses().size();
  stats.unique_vocab = corpus.vocabulary().size();
  stats.total_tokens = corpus.total_tokens();
  stats.vocab_richness = 100.0 * static_cast<double>(stats.unique_vocab) /
                         static_cast<double>(stats.total_tokens);
  const double n = static_cast<double>(stats.verse_count);
  stats.avg_len = static_cast<double>(stats.total_tokens) / n;
  double sq = 0.0;
  for (const auto& verse : corpus.verses()) {
    const double len = static_cast<double>(verse.token_count());
    sq += (len - stats.avg_len) * (len - stats.avg_len);
    stats.max_len = std::max(stats.max_len, verse.token_count());
  }
  stats.stdev_len = std::sqrt(sq / n);
  return stats;
}

std::string corpus_stats_csv(const std::vector<ArtistCorpus>& corpora,
                             const std::string& provenance) {
  csv::Writer out({"artist", "verses", "unique_vocab", "vocab_richness",
                   "avg_len", "stdev_len", "max_len"});
  out.set_comment(provenance);
  for (const auto& corpus : corpora) {
    const CorpusStats s = corpus_stats(corpus);
    out.field(corpus.artist_id())
        .field(static_cast<std::int64_t>(s.verse_count))
        .field(static_cast<std::int64_t>(s.unique_vocab))
        .field(s.vocab_richness)
        .field(s.avg_len)
        .field(s.stdev_len)
        .field(static_cast<std::int64_t>(s.max_len));
    out.end_row();
  }
  return out.str();
}

std::string corpus_manifest_json(const ArtistCorpus& corpus) {
  json verses = json::array();
  for (const auto& verse : corpus.verses()) {
    verses.push_back({{"verse_id", verse.verse_id},
                      {"lines", verse.lines},
                      {"token_count", verse.token_count()}});
  }
  json doc = {{"artist_id", corpus.artist_id()}, {"verses", verses}};
  return doc.dump(1) + "\n";
}

ArtistCorpus corpus_from_manifest(std::string_view text) {
  try {
    const json doc = json::parse(text);
    const auto artist = doc.at("artist_id").get<std::string>();
    std::vector<Verse> verses;
    for (const auto& item : doc.at("verses")) {
      Verse verse;
      verse.artist_id = artist;
      verse.verse_id = item.at("verse_id").get<std::string>();
      verse.lines = item.at("lines").get<std::vector<Line>>();
      verse.provenance = Provenance::authentic();
      if (item.contains("token_count") &&
          item.at("token_count").get<std::size_t>() != verse.token_count()) {
        throw Error(ErrorKind::kValidation,
                    "manifest token_count mismatch for " + verse.verse_id);
      }
      verses.push_back(std::move(verse));
    }
    return ArtistCorpus(artist, std::move(verses));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("manifest: ") + e.what());
  }
}

}  // namespace ghosteval
