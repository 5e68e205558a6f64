#include "ghosteval/pronounce.h"

#include <array>
#include <fstream>
#include <sstream>

#include "ghosteval/error.h"
#include "ghosteval/text.h"

namespace ghosteval {

namespace {

constexpr std::array<std::string_view, 15> kVowels = {
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
    "EY", "IH", "IY", "OW", "OY", "UH", "UW"};

int stress_of(std::string_view phone) {
  if (!phone.empty() && phone.back() >= '0' && phone.back() <= '2') {
    return phone.back() - '0';
  }
  return 0;
}

bool is_orthographic_vowel(const std::string& letters, std::size_t i) {
  const char c = letters[i];
  if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return true;
  return c == 'y' && i > 0;
}

std::string vowel_group_phone(std::string_view group, bool word_final) {
  static const std::unordered_map<std::string_view, std::string_view> kPairs =
      {{"ee", "IY"}, {"ea", "IY"}, {"ie", "IY"}, {"ey", "EY"}, {"ei", "EY"},
       {"oo", "UW"}, {"ou", "AW"}, {"ai", "EY"}, {"ay", "EY"}, {"oa", "OW"},
       {"oi", "OY"}, {"oy", "OY"}, {"au", "AO"}, {"ue", "UW"}, {"ui", "UW"},
       {"io", "IY"}, {"ia", "IY"}, {"eo", "IY"}, {"uy", "AY"}};
  if (group.size() >= 2) {
    auto it = kPairs.find(group.substr(0, 2));
    if (it != kPairs.end()) return std::string(it->second);
  }
  switch (group.front()) {
    case 'a': return "AE";
    case 'e': return "EH";
    case 'i': return "IH";
    case 'o': return "AA";
    case 'u': return "AH";
    default: return word_final ? "IY" : "IH";  // 'y'
  }
}

std::vector<std::string> consonant_phones(std::string_view cluster) {
  static const std::unordered_map<std::string_view, std::string_view>
      kDigraphs = {{"sh", "SH"}, {"ch", "CH"}, {"th", "TH"}, {"ph", "F"},
                   {"ck", "K"},  {"ng", "NG"}, {"wh", "W"},  {"gh", "G"}};
  static const std::unordered_map<char, std::string_view> kSingles = {
      {'b', "B"}, {'c', "K"}, {'d', "D"}, {'f', "F"}, {'g', "G"},
      {'h', "HH"}, {'j', "JH"}, {'k', "K"}, {'l', "L"}, {'m', "M"},
      {'n', "N"}, {'p', "P"}, {'q', "K"}, {'r', "R"}, {'s', "S"},
      {'t', "T"}, {'v', "V"}, {'w', "W"}, {'y', "Y"}, {'z', "Z"}};
  std::vector<std::string> phones;
  auto push = [&phones](std::string_view p) {
    if (phones.empty() || phones.back() != p) phones.emplace_back(p);
  };
  for (std::size_t i = 0; i < cluster.size();) {
    if (i + 1 < cluster.size()) {
      auto it = kDigraphs.find(cluster.substr(i, 2));
      if (it != kDigraphs.end()) {
        push(it->second);
        i += 2;
        continue;
      }
    }
    const char c = cluster[i];
    if (c == 'x') {
      push("K");
      push("S");
    } else if (c == 'q') {
      push("K");
      if (i + 1 < cluster.size() && cluster[i + 1] == 'u') ++i;
    } else if (auto it = kSingles.find(c); it != kSingles.end()) {
      push(it->second);
    }
    ++i;
  }
  return phones;
}

}  // namespace

bool is_vowel_phone(std::string_view phone) {
  const std::string base = strip_stress(phone);
  for (auto v : kVowels) {
    if (base == v) return true;
  }
  return false;
}

std::string strip_stress(std::string_view phone) {
  if (!phone.empty() && phone.back() >= '0' && phone.back() <= '9') {
    phone.remove_suffix(1);
  }
  return std::string(phone);
}

PronouncingDictionary PronouncingDictionary::parse(std::string_view text) {
  PronouncingDictionary dict;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.starts_with(";;;")) continue;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw Error(ErrorKind::kValidation, "pronouncing dictionary line " +
                                              std::to_string(line_no) +
                                              ": no phones");
    }
    std::string word = ascii_lower(fields.front());
    if (word.size() > 3 && word.back() == ')') {
      if (auto open = word.rfind('('); open != std::string::npos && open > 0) {
        word.resize(open);
      }
    }
    if (dict.entries_.contains(word)) continue;
    std::vector<std::string> phones;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      std::string phone = fields[i];
      for (char& c : phone) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      }
      phones.push_back(std::move(phone));
    }
    dict.entries_.emplace(std::move(word), std::move(phones));
  }
  return dict;
}

PronouncingDictionary PronouncingDictionary::load(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kMissingInput,
                "cannot read pronouncing dictionary " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const std::vector<std::string>* PronouncingDictionary::lookup(
    std::string_view word) const {
  auto it = entries_.find(ascii_lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

void PronouncingDictionary::insert(std::string_view word,
                                   std::vector<std::string> phones) {
  entries_.insert_or_assign(ascii_lower(word), std::move(phones));
}

std::vector<Syllable> syllabify(const std::vector<std::string>& phones) {
  std::vector<std::size_t> nuclei;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    if (is_vowel_phone(phones[i])) nuclei.push_back(i);
  }
  std::vector<Syllable> syllables(nuclei.size());
  if (nuclei.empty()) return syllables;

  for (std::size_t s = 0; s < nuclei.size(); ++s) {
    syllables[s].nucleus = strip_stress(phones[nuclei[s]]);
    syllables[s].stress = stress_of(phones[nuclei[s]]);
  }
  for (std::size_t i = 0; i < nuclei.front(); ++i) {
    syllables.front().onset.push_back(phones[i]);
  }
  for (std::size_t i = nuclei.back() + 1; i < phones.size(); ++i) {
    syllables.back().coda.push_back(phones[i]);
  }
  for (std::size_t s = 0; s + 1 < nuclei.size(); ++s) {
    const std::size_t first = nuclei[s] + 1;
    const std::size_t last = nuclei[s + 1];  // exclusive
    const std::size_t count = last - first;
    std::size_t split = first;
    if (count >= 2) {
      syllables[s].coda.push_back(phones[first]);
      split = first + 1;
    }
    for (std::size_t i = split; i < last; ++i) {
      syllables[s + 1].onset.push_back(phones[i]);
    }
  }
  return syllables;
}

Pronunciation fallback_pronounce(std::string_view token) {
  Pronunciation out;
  out.token = std::string(token);
  std::string letters;
  for (char c : ascii_lower(token)) {
    if (c >= 'a' && c <= 'z') letters.push_back(c);
  }
  if (letters.empty()) return out;

  // Alternate consonant clusters and vowel groups.
  struct Group {
    std::string text;
    bool vowel;
  };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const bool vowel = is_orthographic_vowel(letters, i);
    if (groups.empty() || groups.back().vowel != vowel) {
      groups.push_back({std::string(1, letters[i]), vowel});
    } else {
      groups.back().text.push_back(letters[i]);
    }
  }
  std::size_t vowel_groups = 0;
  for (const auto& g : groups) vowel_groups += g.vowel ? 1 : 0;

  std::vector<std::string> phones;
  std::size_t seen = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].vowel) {
      ++seen;
      const bool last = seen == vowel_groups;
      phones.push_back(vowel_group_phone(groups[g].text,
                                         g + 1 == groups.size()) +
                       (last ? "1" : "0"));
    } else {
      for (auto& p : consonant_phones(groups[g].text)) phones.push_back(p);
    }
  }
  out.syllables = syllabify(phones);
  out.source = out.syllables.empty() ? Pronunciation::Source::kNone
                                     : Pronunciation::Source::kFallback;
  return out;
}

Pronunciation pronounce(std::string_view token,
                        const PronouncingDictionary& dict) {
  Pronunciation out;
  out.token = std::string(token);
  if (!has_letter(token)) return out;

  std::vector<std::string> candidates = {std::string(token)};
  std::string_view bare = token;
  while (!bare.empty() && bare.front() == '\'') bare.remove_prefix(1);
  while (!bare.empty() && bare.back() == '\'') bare.remove_suffix(1);
  candidates.emplace_back(bare);
  if (token.size() > 3 && token.ends_with("in'")) {
    candidates.push_back(std::string(token.substr(0, token.size() - 1)) + "g");
  }
  for (const auto& candidate : candidates) {
    if (const auto* phones = dict.lookup(candidate)) {
      out.syllables = syllabify(*phones);
      if (out.pronounced()) {
        out.source = Pronunciation::Source::kDictionary;
        return out;
      }
    }
  }
  return fallback_pronounce(token);
}

}  // namespace ghosteval
