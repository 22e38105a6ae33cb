#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hcp::syntax::detail {

// Token stream shared by the public lexer and the parser: comments kept,
// identifiers unsplit, directive lines tracked by group id.
struct RawToken {
  enum class Kind : uint8_t {
    Identifier,
    Number,
    String,
    CharLit,
    Punct,
    DirectiveHead,  // "#pragma", "#define", ... (one token)
    Comment,
    Other,
  };
  Kind kind = Kind::Other;
  uint32_t begin = 0;
  uint32_t end = 0;
  int32_t directive = -1;  // directive group id, -1 outside directives
  bool line_start = false;
};

std::vector<RawToken> raw_lex(const std::string& source);

// Trailing `_<digits>` segments of an identifier, split recursively:
// "func_252" -> {"func","_","252"}, "a_1_2" -> {"a","_","1","_","2"}.
// Offsets are (begin, end) pairs relative to the token text.
std::vector<std::pair<uint32_t, uint32_t>> split_identifier(std::string_view text);

// Replace invalid UTF-8 sequences with U+FFFD; returns true when any byte
// was replaced.
bool sanitize_utf8(std::string& text);

}  // namespace hcp::syntax::detail
