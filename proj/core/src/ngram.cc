#include "ghosteval/ngram.h"

#include <algorithm>

#include "ghosteval/error.h"
#include "ghosteval/random.h"

namespace ghosteval {

bool is_sentinel(std::string_view token) {
  return token == kVerseStart || token == kVerseEnd || token == kLineBreak;
}

std::vector<std::string> frame_verse(const Verse& verse) {
  std::vector<std::string> seq;
  seq.reserve(verse.token_count() + verse.lines.size() + 1);
  seq.emplace_back(kVerseStart);
  for (std::size_t l = 0; l < verse.lines.size(); ++l) {
    if (l > 0) seq.emplace_back(kLineBreak);
    seq.insert(seq.end(), verse.lines[l].begin(), verse.lines[l].end());
  }
  seq.emplace_back(kVerseEnd);
  return seq;
}

double NextTokenDistribution::probability(std::string_view token) const {
  return total == 0 ? 0.0
                    : static_cast<double>(count(token)) /
                          static_cast<double>(total);
}

std::uint64_t NextTokenDistribution::count(std::string_view token) const {
  auto it = std::lower_bound(tokens.begin(), tokens.end(), token);
  if (it == tokens.end() || *it != token) return 0;
  return counts[static_cast<std::size_t>(it - tokens.begin())];
}

std::size_t NGramModel::KeyHash::operator()(const Key& key) const {
  std::size_t h = 1469598103934665603ULL;
  for (TokenId id : key) {
    h ^= id + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

bool NGramModel::encode(std::span<const std::string> tokens, Key& out) const {
  out.clear();
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    auto it = ids_.find(token);
    if (it == ids_.end()) return false;
    out.push_back(it->second);
  }
  return true;
}

const NGramModel::Continuations* NGramModel::find(const Key& prefix,
                                                  std::size_t gap) const {
  if (prefix.empty() || prefix.size() > tables_.size()) return nullptr;
  const auto& by_gap = tables_[prefix.size() - 1];
  if (gap >= by_gap.size()) return nullptr;
  auto it = by_gap[gap].find(prefix);
  return it == by_gap[gap].end() ? nullptr : &it->second;
}

std::uint64_t NGramModel::pattern_count(std::span<const std::string> prefix,
                                        std::size_t gap,
                                        std::string_view token) const {
  auto tok = ids_.find(std::string(token));
  if (tok == ids_.end()) return 0;
  if (prefix.empty()) {
    if (gap != 0) return 0;
    auto it = unigram_.find(tok->second);
    return it == unigram_.end() ? 0 : it->second;
  }
  Key key;
  if (!encode(prefix, key)) return 0;
  const Continuations* conts = find(key, gap);
  if (conts == nullptr) return 0;
  auto it = conts->find(tok->second);
  return it == conts->end() ? 0 : it->second;
}

NextTokenDistribution NGramModel::to_distribution(const Continuations& counts,
                                                  int backoff_steps,
                                                  bool unigram) const {
  std::vector<std::pair<TokenId, std::uint64_t>> sorted(counts.begin(),
                                                        counts.end());
  std::sort(sorted.begin(), sorted.end());
  NextTokenDistribution dist;
  dist.backoff_steps = backoff_steps;
  dist.unigram = unigram;
  dist.tokens.reserve(sorted.size());
  dist.counts.reserve(sorted.size());
  for (const auto& [id, c] : sorted) {
    dist.tokens.push_back(tokens_[id]);
    dist.counts.push_back(c);
    dist.total += c;
  }
  return dist;
}

NGramModel train(const ArtistCorpus& corpus, int n) {
  if (n < 1 || n > kMaxOrder) {
    throw Error(ErrorKind::kDomain,
                "n-gram order must be in [1, 9], got " + std::to_string(n));
  }
  if (corpus.empty()) {
    throw Error(ErrorKind::kDomain, "train: empty corpus");
  }
  NGramModel model;
  model.order_ = n;
  model.artist_id_ = corpus.artist_id();
  model.vocabulary_ = corpus.vocabulary();
  model.vocabulary_.emplace(kVerseStart);
  model.vocabulary_.emplace(kVerseEnd);
  model.vocabulary_.emplace(kLineBreak);
  model.tokens_.assign(model.vocabulary_.begin(), model.vocabulary_.end());
  for (std::size_t i = 0; i < model.tokens_.size(); ++i) {
    model.ids_.emplace(model.tokens_[i], static_cast<NGramModel::TokenId>(i));
  }

  const std::size_t context = static_cast<std::size_t>(n - 1);
  model.tables_.resize(context);
  for (std::size_t k = 1; k <= context; ++k) {
    model.tables_[k - 1].resize(context - k + 1);
  }

  NGramModel::Key seq;
  NGramModel::Key prefix;
  for (const auto& verse : corpus.verses()) {
    const auto framed = frame_verse(verse);
    model.encode(framed, seq);
    for (std::size_t t = 1; t < seq.size(); ++t) {
      const NGramModel::TokenId target = seq[t];
      ++model.unigram_[target];
      // Patterns ending `gap` positions before the target.
      for (std::size_t k = 1; k <= context; ++k) {
        for (std::size_t gap = 0; k + gap <= context; ++gap) {
          if (k + gap > t) break;
          const std::size_t start = t - gap - k;
          prefix.assign(seq.begin() + static_cast<std::ptrdiff_t>(start),
                        seq.begin() + static_cast<std::ptrdiff_t>(start + k));
          ++model.tables_[k - 1][gap][prefix][target];
        }
      }
    }
  }
  return model;
}

NextTokenDistribution next_token_distribution(
    const NGramModel& model, std::span<const std::string> context) {
  const std::size_t max_context = static_cast<std::size_t>(model.order_ - 1);
  if (context.size() > max_context) {
    context = context.subspan(context.size() - max_context);
  }
  const std::size_t len = context.size();
  NGramModel::Key prefix;
  for (std::size_t gap = 0; gap < len; ++gap) {
    const std::size_t k = len - gap;
    if (!model.encode(context.first(k), prefix)) continue;
    const auto* conts = model.find(prefix, gap);
    if (conts != nullptr && !conts->empty()) {
      return model.to_distribution(*conts, static_cast<int>(gap), false);
    }
  }
  return model.to_distribution(model.unigram_, static_cast<int>(len), true);
}

namespace {

// Index into `dist` of the drawn token.
std::size_t draw(const NextTokenDistribution& dist, const GenerateOptions& opts,
                 Rng& rng) {
  if (opts.greedy) {
    // Tokens are sorted, so the first maximum is the lexicographic minimum.
    return static_cast<std::size_t>(
        std::max_element(dist.counts.begin(), dist.counts.end()) -
        dist.counts.begin());
  }
  std::uint64_t r = rng.uniform_index(dist.total);
  for (std::size_t i = 0; i < dist.counts.size(); ++i) {
    if (r < dist.counts[i]) return i;
    r -= dist.counts[i];
  }
  return dist.counts.size() - 1;
}

NextTokenDistribution without(NextTokenDistribution dist,
                              std::initializer_list<std::string_view> banned) {
  NextTokenDistribution out;
  out.backoff_steps = dist.backoff_steps;
  out.unigram = dist.unigram;
  for (std::size_t i = 0; i < dist.tokens.size(); ++i) {
    if (std::find(banned.begin(), banned.end(), dist.tokens[i]) !=
        banned.end()) {
      continue;
    }
    out.tokens.push_back(std::move(dist.tokens[i]));
    out.counts.push_back(dist.counts[i]);
    out.total += dist.counts[i];
  }
  return out;
}

}  // namespace

Verse generate_verse(const NGramModel& model, const GenerateOptions& options) {
  if (options.max_tokens < 1) {
    throw Error(ErrorKind::kDomain, "generate_verse: max_tokens must be >= 1");
  }
  Rng rng(options.seed);
  Verse verse;
  verse.artist_id = model.artist_id();
  verse.provenance = Provenance::generated(model.order());

  std::vector<std::string> history = {std::string(kVerseStart)};
  Line line;
  std::size_t surface = 0;
  const std::vector<std::string> empty_context;

  for (std::size_t step = 0; step < options.max_tokens; ++step) {
    NextTokenDistribution dist = next_token_distribution(model, history);
    if (surface == 0) {
      dist = without(std::move(dist), {kVerseEnd, kLineBreak});
    } else if (line.empty()) {
      dist = without(std::move(dist), {kLineBreak});
    }
    if (dist.total == 0) {
      dist = without(next_token_distribution(model, empty_context),
                     {kVerseEnd, kLineBreak});
    }
    const std::string token = dist.tokens[draw(dist, options, rng)];
    if (token == kVerseEnd) break;
    history.push_back(token);
    if (token == kLineBreak) {
      verse.lines.push_back(std::move(line));
      line.clear();
    } else {
      line.push_back(token);
      ++surface;
    }
  }
  if (!line.empty()) verse.lines.push_back(std::move(line));
  return verse;
}

}  // namespace ghosteval
