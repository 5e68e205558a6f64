// Text utilities: UTF-8 validation and the corpus tokenizer.

#ifndef GHOSTEVAL_TEXT_H_
#define GHOSTEVAL_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace ghosteval {

/// True when `text` is well-formed UTF-8 (no overlongs, no surrogates).
bool is_valid_utf8(std::string_view text);

/// Throws Error(kDecode) naming the byte offset of the first bad sequence.
void require_valid_utf8(std::string_view text);

/// ASCII lowercasing; multi-byte sequences pass through untouched.
std::string ascii_lower(std::string_view text);

std::string_view trim(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);

/// Lowercases, detaches punctuation runs from words and splits on
/// whitespace. Letters, digits, non-ASCII code points and apostrophes are
/// word characters, so "Don't" stays one token ("don't"). A maximal run of
/// other punctuation ("...", "?!") becomes a single token.
std::vector<std::string> tokenize(std::string_view line);

/// Does the token contain at least one ASCII letter.
bool has_letter(std::string_view token);

}  // namespace ghosteval

#endif  // GHOSTEVAL_TEXT_H_
