#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "hcp/error.hpp"
#include "hcp/syntax/token.hpp"
#include "syntax_raw_lexer.hpp"

namespace hcp::syntax {

const char* language_name(Language lang) { return lang == Language::C ? "c" : "cpp"; }

Language language_from_name(const std::string& name) {
  if (name == "c") return Language::C;
  if (name == "cpp" || name == "c++" || name == "cxx") return Language::Cpp;
  throw Error("unknown language: " + name);
}

const char* category_name(TokenCategory cat) {
  switch (cat) {
    case TokenCategory::Keyword: return "keyword";
    case TokenCategory::Identifier: return "identifier";
    case TokenCategory::Number: return "number";
    case TokenCategory::String: return "string";
    case TokenCategory::Punctuation: return "punctuation";
    case TokenCategory::Pragma: return "pragma";
    case TokenCategory::Other: return "other";
  }
  return "other";
}

namespace {

const std::unordered_set<std::string>& c_keywords() {
  static const std::unordered_set<std::string> kw = {
      "auto", "break", "case", "char", "const", "continue", "default", "do", "double",
      "else", "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long",
      "register", "restrict", "return", "short", "signed", "sizeof", "static", "struct",
      "switch", "typedef", "union", "unsigned", "void", "volatile", "while",
      "_Alignas", "_Alignof", "_Atomic", "_Bool", "_Complex", "_Generic", "_Imaginary",
      "_Noreturn", "_Static_assert", "_Thread_local"};
  return kw;
}

const std::unordered_set<std::string>& cpp_keywords() {
  static const std::unordered_set<std::string> kw = {
      "alignas", "alignof", "and", "and_eq", "asm", "auto", "bitand", "bitor", "bool",
      "break", "case", "catch", "char", "char8_t", "char16_t", "char32_t", "class",
      "compl", "concept", "const", "consteval", "constexpr", "constinit", "const_cast",
      "continue", "co_await", "co_return", "co_yield", "decltype", "default", "delete",
      "do", "double", "dynamic_cast", "else", "enum", "explicit", "export", "extern",
      "false", "float", "for", "friend", "goto", "if", "inline", "int", "long",
      "mutable", "namespace", "new", "noexcept", "not", "not_eq", "nullptr", "operator",
      "or", "or_eq", "private", "protected", "public", "register", "reinterpret_cast",
      "requires", "return", "short", "signed", "sizeof", "static", "static_assert",
      "static_cast", "struct", "switch", "template", "this", "thread_local", "throw",
      "true", "try", "typedef", "typeid", "typename", "union", "unsigned", "using",
      "virtual", "void", "volatile", "wchar_t", "while", "xor", "xor_eq"};
  return kw;
}

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80;
}

bool is_string_prefix(std::string_view s) {
  return s == "u8" || s == "u" || s == "U" || s == "L" || s == "R" || s == "u8R" ||
         s == "uR" || s == "UR" || s == "LR";
}

bool is_char_prefix(std::string_view s) {
  return s == "u8" || s == "u" || s == "U" || s == "L";
}

}  // namespace

bool is_keyword(const std::string& word, Language lang) {
  return lang == Language::C ? c_keywords().count(word) > 0 : cpp_keywords().count(word) > 0;
}

namespace detail {

namespace {

class Scanner {
 public:
  explicit Scanner(const std::string& src) : src_(src), n_(src.size()) {}

  std::vector<RawToken> run() {
    while (pos_ < n_) {
      if (skip_whitespace()) continue;
      scan_token();
    }
    return std::move(out_);
  }

 private:
  const std::string& src_;
  size_t n_;
  size_t pos_ = 0;
  bool line_start_ = true;
  int32_t directive_ = -1;
  int32_t next_directive_ = 0;
  std::vector<RawToken> out_;

  char at(size_t i) const { return i < n_ ? src_[i] : '\0'; }

  bool is_splice(size_t i) const {
    if (at(i) != '\\') return false;
    if (at(i + 1) == '\n') return true;
    return at(i + 1) == '\r' && at(i + 2) == '\n';
  }

  // Returns true when whitespace (or a line splice) was consumed.
  bool skip_whitespace() {
    char c = src_[pos_];
    if (c == '\n') {
      ++pos_;
      line_start_ = true;
      directive_ = -1;
      return true;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
      ++pos_;
      return true;
    }
    if (is_splice(pos_)) {  // logical line continues; directives survive
      pos_ += (at(pos_ + 1) == '\r') ? 3 : 2;
      return true;
    }
    return false;
  }

  void emit(RawToken::Kind kind, size_t begin) {
    RawToken t;
    t.kind = kind;
    t.begin = static_cast<uint32_t>(begin);
    t.end = static_cast<uint32_t>(pos_);
    t.directive = directive_;
    t.line_start = line_start_;
    line_start_ = false;
    out_.push_back(t);
  }

  void scan_token() {
    size_t begin = pos_;
    char c = src_[pos_];

    if (c == '/' && at(pos_ + 1) == '/') {
      pos_ += 2;
      while (pos_ < n_) {
        if (is_splice(pos_)) {
          pos_ += (at(pos_ + 1) == '\r') ? 3 : 2;
          continue;
        }
        if (src_[pos_] == '\n') break;
        ++pos_;
      }
      emit(RawToken::Kind::Comment, begin);
      return;
    }
    if (c == '/' && at(pos_ + 1) == '*') {
      pos_ += 2;
      while (pos_ < n_ && !(src_[pos_] == '*' && at(pos_ + 1) == '/')) ++pos_;
      if (pos_ < n_) pos_ += 2;
      emit(RawToken::Kind::Comment, begin);
      return;
    }
    if (c == '"') {
      scan_string(begin, false);
      return;
    }
    if (c == '\'') {
      scan_char(begin);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(at(pos_ + 1))))) {
      scan_number(begin);
      return;
    }
    if (is_ident_start(static_cast<unsigned char>(c))) {
      scan_identifier(begin);
      return;
    }
    if (c == '#') {
      if (is_ident_start(static_cast<unsigned char>(at(pos_ + 1)))) {
        ++pos_;
        while (pos_ < n_ && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        bool starts_directive = line_start_;
        if (starts_directive) directive_ = next_directive_++;
        emit(RawToken::Kind::DirectiveHead, begin);
        return;
      }
      pos_ += (at(pos_ + 1) == '#') ? 2 : 1;
      emit(RawToken::Kind::Punct, begin);
      return;
    }
    if (scan_punct(begin)) return;

    ++pos_;
    emit(RawToken::Kind::Other, begin);
  }

  void scan_string(size_t begin, bool raw) {
    // pos_ at opening quote
    if (raw) {
      ++pos_;
      size_t dstart = pos_;
      while (pos_ < n_ && src_[pos_] != '(' && src_[pos_] != '\n' && pos_ - dstart < 18) ++pos_;
      std::string delim = ")" + src_.substr(dstart, pos_ - dstart) + "\"";
      size_t close = src_.find(delim, pos_);
      pos_ = close == std::string::npos ? n_ : close + delim.size();
      emit(RawToken::Kind::String, begin);
      return;
    }
    ++pos_;
    while (pos_ < n_) {
      char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < n_) {
        pos_ += 2;
        continue;
      }
      if (c == '"') {
        ++pos_;
        break;
      }
      if (c == '\n') break;  // unterminated; stop at end of line
      ++pos_;
    }
    emit(RawToken::Kind::String, begin);
  }

  void scan_char(size_t begin) {
    ++pos_;
    while (pos_ < n_) {
      char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < n_) {
        pos_ += 2;
        continue;
      }
      if (c == '\'') {
        ++pos_;
        break;
      }
      if (c == '\n') break;
      ++pos_;
    }
    emit(RawToken::Kind::CharLit, begin);
  }

  void scan_number(size_t begin) {
    // pp-number: handles hex, floats, exponents, suffixes, digit separators
    ++pos_;
    while (pos_ < n_) {
      char c = src_[pos_];
      if ((c == 'e' || c == 'E' || c == 'p' || c == 'P') &&
          (at(pos_ + 1) == '+' || at(pos_ + 1) == '-')) {
        pos_ += 2;
        continue;
      }
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '.') {
        ++pos_;
        continue;
      }
      if (c == '\'' && std::isalnum(static_cast<unsigned char>(at(pos_ + 1))) && pos_ > begin &&
          std::isalnum(static_cast<unsigned char>(src_[pos_ - 1]))) {
        ++pos_;
        continue;
      }
      break;
    }
    emit(RawToken::Kind::Number, begin);
  }

  void scan_identifier(size_t begin) {
    ++pos_;
    while (pos_ < n_ && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::string_view text(src_.data() + begin, pos_ - begin);
    if (at(pos_) == '"' && is_string_prefix(text)) {
      scan_string(begin, text.back() == 'R');
      return;
    }
    if (at(pos_) == '\'' && is_char_prefix(text)) {
      scan_char(begin);
      return;
    }
    emit(RawToken::Kind::Identifier, begin);
  }

  bool scan_punct(size_t begin) {
    static const std::array<std::string_view, 5> three = {"<<=", ">>=", "->*", "...", "<=>"};
    static const std::array<std::string_view, 20> two = {
        "::", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
        "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="};
    static const std::string one = "!%&()*+,-./:;<=>?[]^{|}~";

    std::string_view rest(src_.data() + pos_, std::min<size_t>(3, n_ - pos_));
    for (auto p : three) {
      if (rest.substr(0, 3) == p) {
        pos_ += 3;
        emit(RawToken::Kind::Punct, begin);
        return true;
      }
    }
    for (auto p : two) {
      if (rest.substr(0, 2) == p) {
        pos_ += 2;
        emit(RawToken::Kind::Punct, begin);
        return true;
      }
    }
    if (one.find(src_[pos_]) != std::string::npos) {
      ++pos_;
      emit(RawToken::Kind::Punct, begin);
      return true;
    }
    return false;
  }
};

}  // namespace

std::vector<RawToken> raw_lex(const std::string& source) { return Scanner(source).run(); }

std::vector<std::pair<uint32_t, uint32_t>> split_identifier(std::string_view text) {
  std::vector<std::pair<uint32_t, uint32_t>> pieces;
  // Recursive on the stem so "a_1_2" -> a _ 1 _ 2 and re-lexing the
  // space-joined pieces reproduces the same sequence.
  struct Rec {
    static void split(std::string_view t, uint32_t base,
                      std::vector<std::pair<uint32_t, uint32_t>>& out) {
      size_t j = t.size();
      while (j > 0 && std::isdigit(static_cast<unsigned char>(t[j - 1]))) --j;
      if (j < t.size() && j >= 1 && t[j - 1] == '_') {
        if (j >= 2) split(t.substr(0, j - 1), base, out);
        out.emplace_back(base + static_cast<uint32_t>(j - 1), base + static_cast<uint32_t>(j));
        out.emplace_back(base + static_cast<uint32_t>(j), base + static_cast<uint32_t>(t.size()));
        return;
      }
      out.emplace_back(base, base + static_cast<uint32_t>(t.size()));
    }
  };
  Rec::split(text, 0, pieces);
  return pieces;
}

bool sanitize_utf8(std::string& text) {
  static const std::string replacement = "\xEF\xBF\xBD";
  bool replaced = false;
  std::string out;
  size_t i = 0, n = text.size();
  while (i < n) {
    unsigned char c = text[i];
    size_t len = 0;
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      len = 4;
    } else {
      out += replacement;
      replaced = true;
      ++i;
      continue;
    }
    bool ok = i + len <= n;
    for (size_t k = 1; ok && k < len; ++k) {
      ok = (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
    }
    if (ok) {
      out.append(text, i, len);
      i += len;
    } else {
      out += replacement;
      replaced = true;
      ++i;
    }
  }
  if (replaced) text = std::move(out);
  return replaced;
}

}  // namespace detail

std::vector<LexToken> lex(const std::string& source, Language lang) {
  auto raw = detail::raw_lex(source);

  // Directive head text per directive id, for pragma-line categorization.
  std::unordered_map<int32_t, std::string> head;
  for (const auto& t : raw) {
    if (t.kind == detail::RawToken::Kind::DirectiveHead && t.directive >= 0) {
      head.emplace(t.directive, source.substr(t.begin, t.end - t.begin));
    }
  }

  std::vector<LexToken> out;
  out.reserve(raw.size());
  for (const auto& t : raw) {
    using RK = detail::RawToken::Kind;
    if (t.kind == RK::Comment) continue;
    std::string text = source.substr(t.begin, t.end - t.begin);
    bool in_pragma_line = false;
    if (t.directive >= 0) {
      auto it = head.find(t.directive);
      in_pragma_line = it != head.end() && it->second == "#pragma";
    }

    if (t.kind == RK::Identifier) {
      if (is_keyword(text, lang)) {
        out.push_back({std::move(text), TokenCategory::Keyword, t.begin, t.end});
        continue;
      }
      TokenCategory base = in_pragma_line ? TokenCategory::Pragma : TokenCategory::Identifier;
      auto pieces = detail::split_identifier(text);
      for (auto [b, e] : pieces) {
        std::string piece = text.substr(b, e - b);
        TokenCategory cat = std::isdigit(static_cast<unsigned char>(piece[0]))
                                ? TokenCategory::Number
                                : base;
        out.push_back({std::move(piece), cat, t.begin + b, t.begin + e});
      }
      continue;
    }

    TokenCategory cat = TokenCategory::Other;
    switch (t.kind) {
      case RK::Number: cat = TokenCategory::Number; break;
      case RK::String:
      case RK::CharLit: cat = TokenCategory::String; break;
      case RK::Punct: cat = TokenCategory::Punctuation; break;
      case RK::DirectiveHead: cat = TokenCategory::Pragma; break;
      default: cat = TokenCategory::Other; break;
    }
    out.push_back({std::move(text), cat, t.begin, t.end});
  }
  return out;
}

std::vector<std::string> token_texts(const std::vector<LexToken>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace hcp::syntax
