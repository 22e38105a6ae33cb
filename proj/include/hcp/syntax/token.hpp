#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hcp::syntax {

enum class Language : uint8_t { C, Cpp };

const char* language_name(Language lang);
Language language_from_name(const std::string& name);

enum class TokenCategory : uint8_t {
  Keyword,
  Identifier,
  Number,
  String,
  Punctuation,
  Pragma,
  Other,
};

const char* category_name(TokenCategory cat);

struct LexToken {
  std::string text;
  TokenCategory category = TokenCategory::Other;
  uint32_t begin = 0;  // byte span [begin, end) into the source
  uint32_t end = 0;
};

bool is_keyword(const std::string& word, Language lang);

/// Lexical tokens of `source`. Comments and whitespace are excluded.
/// Directive lines are tokenized; on a `#pragma` line every word is
/// categorized pragma (or keyword, for reserved words). Identifiers with a
/// trailing `_<digits>` segment split into stem, `_`, digits, so `func_252`
/// lexes as ["func", "_", "252"]. Joining the token texts with single spaces
/// re-lexes to the same text sequence.
std::vector<LexToken> lex(const std::string& source, Language lang);

std::vector<std::string> token_texts(const std::vector<LexToken>& tokens);

/// Single-space join; the uniform detokenization used across the toolkit.
std::string detokenize(const std::vector<std::string>& tokens);

}  // namespace hcp::syntax
