#include "ghosteval/text.h"

#include <cstdint>
#include <string>

#include "ghosteval/error.h"
#include "ghosteval/verse.h"

namespace ghosteval {

namespace {

// Returns the length of the UTF-8 sequence starting at `i`, or 0 if it is
// malformed.
std::size_t utf8_sequence_length(std::string_view text, std::size_t i) {
  const auto lead = static_cast<unsigned char>(text[i]);
  if (lead < 0x80) return 1;
  std::size_t len = 0;
  std::uint32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    return 0;
  }
  if (i + len > text.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto c = static_cast<unsigned char>(text[i + k]);
    if ((c & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (c & 0x3F);
  }
  static constexpr std::uint32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMinForLength[len]) return 0;
  if (cp > 0x10FFFF) return 0;
  if (cp >= 0xD800 && cp <= 0xDFFF) return 0;
  return len;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u >= 0x80) return true;
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '\'';
}

}  // namespace

bool is_valid_utf8(std::string_view text) {
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t len = utf8_sequence_length(text, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

void require_valid_utf8(std::string_view text) {
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t len = utf8_sequence_length(text, i);
    if (len == 0) {
      throw Error(ErrorKind::kDecode,
                  "malformed UTF-8 at byte offset " + std::to_string(i));
    }
    i += len;
  }
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view text) {
  std::size_t begin = 0;
  while (begin < text.size() && is_space(text[begin])) ++begin;
  std::size_t end = text.size();
  while (end > begin && is_space(text[end - 1])) --end;
  return text.substr(begin, end - begin);
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view line) {
  // U+2019 (right single quotation mark) is folded to an ASCII apostrophe.
  std::string normalized;
  normalized.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (i + 2 < line.size() && line.compare(i, 3, "\xE2\x80\x99") == 0) {
      normalized.push_back('\'');
      i += 2;
    } else {
      normalized.push_back(line[i]);
    }
  }
  const std::string lowered = ascii_lower(normalized);

  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < lowered.size()) {
    const char c = lowered[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    const bool word = is_word_char(c);
    const std::size_t start = i;
    while (i < lowered.size() && !is_space(lowered[i]) &&
           is_word_char(lowered[i]) == word) {
      ++i;
    }
    tokens.push_back(lowered.substr(start, i - start));
  }
  return tokens;
}

bool has_letter(std::string_view token) {
  for (char c : token) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
  }
  return false;
}

std::size_t Verse::token_count() const {
  std::size_t total = 0;
  for (const auto& line : lines) total += line.size();
  return total;
}

std::vector<std::string> Verse::tokens() const {
  std::vector<std::string> out;
  out.reserve(token_count());
  for (const auto& line : lines) out.insert(out.end(), line.begin(), line.end());
  return out;
}

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kDecode: return "decode";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kMissingInput: return "missing_input";
    case ErrorKind::kMissingCheckpoint: return "missing_checkpoint";
    case ErrorKind::kIncompleteAnnotation: return "incomplete_annotation";
    case ErrorKind::kDegenerateFit: return "degenerate_fit";
    case ErrorKind::kNoIntersection: return "no_intersection";
    case ErrorKind::kUnderdetermined: return "underdetermined";
    case ErrorKind::kInsufficientPool: return "insufficient_pool";
    case ErrorKind::kLayout: return "layout";
    case ErrorKind::kAuth: return "auth";
    case ErrorKind::kForbidden: return "forbidden";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace ghosteval
