#include "ghosteval/rhyme.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "ghosteval/error.h"

namespace ghosteval {

namespace {

int coda_class(const std::string& phone, const RhymeParams& params) {
  for (std::size_t c = 0; c < params.coda_classes.size(); ++c) {
    const auto& cls = params.coda_classes[c];
    if (std::find(cls.begin(), cls.end(), phone) != cls.end()) {
      return static_cast<int>(c);
    }
  }
  return -1;
}

std::string nucleus_class(const Syllable& s, const RhymeParams& params) {
  if (params.reduce_unstressed && s.stress == 0 &&
      (s.nucleus == "AH" || s.nucleus == "IH" || s.nucleus == "UH")) {
    return "@";
  }
  return s.nucleus;
}

}  // namespace

std::vector<std::vector<std::string>> RhymeParams::default_coda_classes() {
  return {
      {"P", "B", "T", "D", "K", "G"},
      {"M", "N", "NG"},
      {"F", "V", "TH", "DH", "S", "Z", "SH", "ZH"},
      {"CH", "JH"},
  };
}

bool codas_compatible(const std::vector<std::string>& a,
                      const std::vector<std::string>& b,
                      const RhymeParams& params) {
  if (a == b) return true;
  if (a.size() != b.size() || a.empty()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    const int ca = coda_class(a[i], params);
    if (ca < 0 || ca != coda_class(b[i], params)) return false;
  }
  return true;
}

double token_entropy_bits(const Verse& verse) {
  std::map<std::string, std::size_t> counts;
  std::size_t n = 0;
  for (const auto& line : verse.lines) {
    for (const auto& token : line) {
      ++counts[token];
      ++n;
    }
  }
  double h = 0.0;
  for (const auto& [token, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

double entropy_weight(const Verse& verse, EntropyNormalization normalization) {
  const std::size_t n = verse.token_count();
  if (n == 0) throw Error(ErrorKind::kDomain, "entropy_weight: empty verse");
  const double h = token_entropy_bits(verse);
  if (h <= 0.0) return 0.0;
  const double denom = normalization == EntropyNormalization::kLogTokenCount
                           ? std::log2(static_cast<double>(n))
                           : static_cast<double>(n);
  return std::clamp(h / denom, 0.0, 1.0);
}

RhymeAnalysis detect_rhymes(const Verse& verse,
                            const PronouncingDictionary& dict,
                            const RhymeParams& params,
                            EntropyNormalization normalization) {
  if (verse.token_count() == 0) {
    throw Error(ErrorKind::kDomain, "detect_rhymes: empty verse");
  }
  RhymeAnalysis out;
  std::vector<std::vector<std::string>> final_codas;  // per slot
  for (std::size_t l = 0; l < verse.lines.size(); ++l) {
    const auto& line = verse.lines[l];
    for (std::size_t t = 0; t < line.size(); ++t) {
      const Pronunciation pron = pronounce(line[t], dict);
      for (std::size_t s = 0; s < pron.syllables.size(); ++s) {
        const Syllable& syl = pron.syllables[s];
        SyllableSlot slot;
        slot.line = l;
        slot.token = t;
        slot.syllable = s;
        slot.nucleus = nucleus_class(syl, params);
        slot.stress = syl.stress;
        slot.word_final = s + 1 == pron.syllables.size();
        out.syllables.push_back(std::move(slot));
        final_codas.push_back(syl.coda);
      }
    }
  }
  if (out.syllables.empty()) {
    throw Error(ErrorKind::kDomain, "detect_rhymes: verse '" + verse.verse_id +
                                        "' has no pronounceable syllables");
  }

  auto& slots = out.syllables;
  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].word_final) anchors.push_back(i);
  }
  const std::size_t window =
      static_cast<std::size_t>(std::max(1, params.window_lines));
  const std::size_t max_span =
      static_cast<std::size_t>(std::max(1, params.max_span));

  auto has_stress = [&slots](std::size_t start, std::size_t len) {
    for (std::size_t k = start; k < start + len; ++k) {
      if (slots[k].stress > 0) return true;
    }
    return false;
  };

  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const std::size_t i = anchors[a];
    for (std::size_t b = a + 1; b < anchors.size(); ++b) {
      const std::size_t j = anchors[b];
      if (slots[j].line - slots[i].line >= window) break;
      if (slots[i].nucleus != slots[j].nucleus) continue;
      if (!codas_compatible(final_codas[i], final_codas[j], params)) continue;
      std::size_t len = 1;
      while (len < max_span && len <= i && j - len > i &&
             slots[i - len].nucleus == slots[j - len].nucleus) {
        ++len;
      }
      const std::size_t first = i + 1 - len;
      const std::size_t second = j + 1 - len;
      if (params.require_stress &&
          (!has_stress(first, len) || !has_stress(second, len))) {
        continue;
      }
      out.rhyme_pairs.push_back({first, second, len});
      for (std::size_t k = 0; k < len; ++k) {
        slots[first + k].rhymed = true;
        slots[second + k].rhymed = true;
      }
    }
  }

  out.total_syllables = slots.size();
  out.rhymed_syllables = static_cast<std::size_t>(
      std::count_if(slots.begin(), slots.end(),
                    [](const SyllableSlot& s) { return s.rhymed; }));
  out.density = static_cast<double>(out.rhymed_syllables) /
                static_cast<double>(out.total_syllables);
  out.entropy_bits = token_entropy_bits(verse);
  out.entropy_weight = entropy_weight(verse, normalization);
  out.weighted_density = out.density * out.entropy_weight;
  return out;
}

double weighted_rhyme_density(const Verse& verse,
                              const PronouncingDictionary& dict,
                              const RhymeParams& params,
                              EntropyNormalization normalization) {
  return detect_rhymes(verse, dict, params, normalization).weighted_density;
}

}  // namespace ghosteval
