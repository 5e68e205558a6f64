#include "ghosteval/similarity.h"

#include <algorithm>
#include <cmath>

#include "ghosteval/error.h"

namespace ghosteval {

namespace {

constexpr std::string_view kBreakTerm = "<br>";

}  // namespace

double VerseVector::norm() const {
  double sq = 0.0;
  for (const auto& [token, w] : weights) sq += w * w;
  return std::sqrt(sq);
}

bool VerseVector::is_zero() const {
  return std::all_of(weights.begin(), weights.end(),
                     [](const auto& kv) { return kv.second == 0.0; });
}

double cosine(const VerseVector& a, const VerseVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  // Iterate the smaller map and probe the larger one so the result does not
  // depend on argument order beyond floating-point summation.
  const VerseVector& small = a.weights.size() <= b.weights.size() ? a : b;
  const VerseVector& large = &small == &a ? b : a;
  double dot = 0.0;
  for (const auto& [token, w] : small.weights) {
    auto it = large.weights.find(token);
    if (it != large.weights.end()) dot += w * it->second;
  }
  return dot / (na * nb);
}

TfIdfIndex TfIdfIndex::build(std::span<const Verse> training,
                             SimilarityOptions options) {
  if (training.empty()) {
    throw Error(ErrorKind::kDomain, "build_index: empty training set");
  }
  TfIdfIndex index;
  index.options_ = options;
  index.verse_ids_.reserve(training.size());

  for (std::size_t v = 0; v < training.size(); ++v) {
    index.verse_ids_.push_back(training[v].verse_id);
    for (const auto& [token, count] : index.term_counts(training[v])) {
      auto [it, inserted] = index.term_ids_.try_emplace(
          token, static_cast<TermId>(index.terms_.size()));
      if (inserted) {
        index.terms_.push_back(token);
        index.postings_.emplace_back();
      }
      index.postings_[it->second].push_back(
          {static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(count)});
    }
  }

  const double n = static_cast<double>(training.size());
  index.idf_.resize(index.terms_.size());
  index.norms_.assign(training.size(), 0.0);
  for (std::size_t t = 0; t < index.terms_.size(); ++t) {
    const double df = static_cast<double>(index.postings_[t].size());
    index.idf_[t] = std::log(n / df);
    for (const Posting& p : index.postings_[t]) {
      const double w = p.count * index.idf_[t];
      index.norms_[p.verse] += w * w;
    }
  }
  for (double& norm : index.norms_) norm = std::sqrt(norm);
  return index;
}

std::optional<TfIdfIndex::TermId> TfIdfIndex::term_id(
    std::string_view token) const {
  auto it = term_ids_.find(std::string(token));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t TfIdfIndex::doc_freq(std::string_view token) const {
  const auto id = term_id(token);
  return id ? postings_[*id].size() : 0;
}

std::size_t TfIdfIndex::term_freq(std::size_t verse,
                                  std::string_view token) const {
  const auto id = term_id(token);
  if (!id) return 0;
  const auto& list = postings_[*id];
  auto it = std::lower_bound(
      list.begin(), list.end(), verse,
      [](const Posting& p, std::size_t v) { return p.verse < v; });
  return (it != list.end() && it->verse == verse) ? it->count : 0;
}

double TfIdfIndex::idf(std::string_view token) const {
  const auto id = term_id(token);
  return id ? idf_[*id] : 0.0;
}

double TfIdfIndex::weight(std::size_t verse, std::string_view token) const {
  return static_cast<double>(term_freq(verse, token)) * idf(token);
}

std::map<std::string, std::size_t> TfIdfIndex::term_counts(
    const Verse& verse) const {
  std::map<std::string, std::size_t> counts;
  for (const auto& line : verse.lines) {
    for (const auto& token : line) ++counts[token];
  }
  if (options_.include_line_breaks && verse.lines.size() > 1) {
    counts[std::string(kBreakTerm)] += verse.lines.size() - 1;
  }
  return counts;
}

VerseVector TfIdfIndex::vectorize(const Verse& verse) const {
  VerseVector vec;
  for (const auto& [token, count] : term_counts(verse)) {
    const auto id = term_id(token);
    if (!id) continue;
    vec.weights.emplace(token, static_cast<double>(count) * idf_[*id]);
  }
  return vec;
}

VerseVector TfIdfIndex::training_vector(std::size_t verse) const {
  VerseVector vec;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const std::size_t f = term_freq(verse, terms_[t]);
    if (f > 0) vec.weights.emplace(terms_[t], static_cast<double>(f) * idf_[t]);
  }
  return vec;
}

SimilarityResult max_similarity(const TfIdfIndex& index,
                                const Verse& candidate) {
  if (candidate.token_count() == 0) {
    throw Error(ErrorKind::kDomain, "max_similarity: empty candidate verse");
  }
  // Candidate weights, accumulated into dot products through the postings.
  std::vector<double> dots(index.verse_count(), 0.0);
  double cand_sq = 0.0;
  for (const auto& [token, count] : index.term_counts(candidate)) {
    const auto id = index.term_id(token);
    if (!id) continue;
    const double idf = index.idf_[*id];
    if (idf == 0.0) continue;
    const double w = static_cast<double>(count) * idf;
    cand_sq += w * w;
    for (const auto& p : index.postings_[*id]) {
      dots[p.verse] += w * (p.count * idf);
    }
  }

  SimilarityResult result;
  if (cand_sq == 0.0) {
    result.degenerate = true;
    return result;
  }
  const double cand_norm = std::sqrt(cand_sq);
  for (std::size_t v = 0; v < dots.size(); ++v) {
    if (index.norms_[v] == 0.0 || dots[v] == 0.0) continue;
    const double c =
        std::min(1.0, dots[v] / (cand_norm * index.norms_[v]));
    if (c > result.score) {
      result.score = c;
      result.best_match = v;
    }
  }
  return result;
}

}  // namespace ghosteval
