// ARPAbet pronouncing dictionary, syllabification and an orthographic
// fallback for out-of-vocabulary tokens.

#ifndef GHOSTEVAL_PRONOUNCE_H_
#define GHOSTEVAL_PRONOUNCE_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ghosteval {

/// One syllable: onset consonants, a vowel nucleus with its stress digit
/// (0, 1 or 2) and coda consonants. Phones are ARPAbet without stress marks.
struct Syllable {
  std::vector<std::string> onset;
  std::string nucleus;
  int stress = 0;
  std::vector<std::string> coda;

  friend bool operator==(const Syllable&, const Syllable&) = default;
};

struct Pronunciation {
  enum class Source { kNone, kDictionary, kFallback };

  std::string token;
  std::vector<Syllable> syllables;
  Source source = Source::kNone;

  /// False for tokens without letters (punctuation, numbers); those carry
  /// no syllables and are excluded from syllable counts.
  bool pronounced() const { return !syllables.empty(); }
};

bool is_vowel_phone(std::string_view phone);
/// "AE1" -> "AE".
std::string strip_stress(std::string_view phone);

/// Word -> phone list, loaded from the ARPAbet text format
/// (`WORD  PH1 PH2 ...`). Alternate pronunciations `WORD(2)` are accepted and
/// the first entry for a word wins. Lookup is case-insensitive.
class PronouncingDictionary {
 public:
  static PronouncingDictionary parse(std::string_view text);
  static PronouncingDictionary load(const std::filesystem::path& path);

  /// nullptr when the word is absent.
  const std::vector<std::string>* lookup(std::string_view word) const;
  void insert(std::string_view word, std::vector<std::string> phones);
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
};

/// Splits a phone sequence into syllables. Between two nuclei a single
/// consonant becomes the next onset; with two or more, the first closes the
/// previous syllable and the rest open the next one.
std::vector<Syllable> syllabify(const std::vector<std::string>& phones);

/// Vowel-group syllabifier: one syllable per maximal run of orthographic
/// vowels ([aeiouy], y only after the first letter), the last group carrying
/// primary stress.
Pronunciation fallback_pronounce(std::string_view token);

/// Dictionary entry when present (also trying the token with surrounding
/// apostrophes removed and a dropped-g "-in'" restored to "-ing"), otherwise
/// the fallback. Tokens without letters get no pronunciation.
Pronunciation pronounce(std::string_view token,
                        const PronouncingDictionary& dict);

}  // namespace ghosteval

#endif  // GHOSTEVAL_PRONOUNCE_H_
