#include <cctype>
#include <cstring>

#include "hcp/error.hpp"
#include "hcp/syntax/tree.hpp"
#include "syntax_raw_lexer.hpp"

// Error-tolerant recursive-descent parser for C and C++. It produces a
// concrete syntax tree in which every code token appears exactly once as a
// leaf, so the token stream can be regenerated from the tree. Comments
// attach as comment leaves at statement and declaration boundaries; a
// comment wedged directly before a literal inside an expression is dropped
// from the tree (regeneration strips comments either way). Constructs the
// parser cannot make sense of become Error nodes (counted, never fatal);
// C++ ambiguities (a*b, templates vs comparisons) are resolved by fixed
// heuristics, so identical token streams always produce identical trees.

namespace hcp::syntax {

namespace {

using detail::RawToken;
using RK = RawToken::Kind;

bool is_type_keyword(const std::string& t) {
  static const char* names[] = {"void",   "bool",     "char",    "char8_t", "char16_t",
                                "char32_t", "wchar_t", "short",   "int",     "long",
                                "float",  "double",   "signed",  "unsigned", "auto",
                                "_Bool",  "_Complex", "_Imaginary"};
  for (const char* n : names) {
    if (t == n) return true;
  }
  return false;
}

bool is_spec_keyword(const std::string& t) {
  static const char* names[] = {
      "const",    "volatile",  "static",   "extern",       "inline",    "register",
      "restrict", "constexpr", "consteval", "constinit",   "mutable",   "virtual",
      "explicit", "friend",    "typedef",  "thread_local", "typename",  "export",
      "_Atomic",  "_Noreturn", "_Thread_local", "_Alignas"};
  for (const char* n : names) {
    if (t == n) return true;
  }
  return false;
}

bool is_cv_keyword(const std::string& t) {
  return t == "const" || t == "volatile" || t == "restrict" || t == "_Atomic";
}

int binary_precedence(const std::string& op) {
  if (op == ".*" || op == "->*") return 11;
  if (op == "*" || op == "/" || op == "%") return 10;
  if (op == "+" || op == "-") return 9;
  if (op == "<<" || op == ">>") return 8;
  if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "<=>") return 7;
  if (op == "==" || op == "!=") return 6;
  if (op == "&") return 5;
  if (op == "^") return 4;
  if (op == "|") return 3;
  if (op == "&&") return 2;
  if (op == "||") return 1;
  return -1;
}

bool is_assign_op(const std::string& op) {
  return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "%=" ||
         op == "&=" || op == "|=" || op == "^=" || op == "<<=" || op == ">>=";
}

class Parser {
 public:
  Parser(const std::string& source, Language lang)
      : src_(source), lang_(lang), toks_(detail::raw_lex(source)) {}

  SyntaxNode run() {
    SyntaxNode root;
    root.kind = NodeKind::TranslationUnit;
    while (!eof()) {
      size_t before = pos_;
      parse_external(root.children);
      ensure_progress(before, root.children);
    }
    root.begin = 0;
    root.end = static_cast<uint32_t>(src_.size());
    return root;
  }

  int error_count() const { return error_count_; }

 private:
  const std::string& src_;
  Language lang_;
  std::vector<RawToken> toks_;
  size_t pos_ = 0;
  int error_count_ = 0;

  // ---- cursor -----------------------------------------------------------

  bool eof() const {
    for (size_t i = pos_; i < toks_.size(); ++i) {
      if (toks_[i].kind != RK::Comment) return false;
    }
    return true;
  }

  bool raw_eof() const { return pos_ >= toks_.size(); }

  const RawToken* peek(size_t k = 0) const {
    size_t seen = 0;
    for (size_t i = pos_; i < toks_.size(); ++i) {
      if (toks_[i].kind == RK::Comment) continue;
      if (seen == k) return &toks_[i];
      ++seen;
    }
    return nullptr;
  }

  std::string text_of(const RawToken& t) const { return src_.substr(t.begin, t.end - t.begin); }

  std::string peek_text(size_t k = 0) const {
    const RawToken* t = peek(k);
    return t ? text_of(*t) : std::string();
  }

  bool at(const char* text, size_t k = 0) const {
    const RawToken* t = peek(k);
    if (!t) return false;
    size_t len = std::strlen(text);
    if (t->end - t->begin != len) return false;
    return src_.compare(t->begin, len, text) == 0;
  }

  bool at_kw(const char* text, size_t k = 0) const {
    const RawToken* t = peek(k);
    if (!t || t->kind != RK::Identifier) return false;
    return at(text, k) && is_keyword(text, lang_);
  }

  bool at_ident(size_t k = 0) const {
    const RawToken* t = peek(k);
    return t && t->kind == RK::Identifier && !is_keyword(text_of(*t), lang_);
  }

  bool at_punct(size_t k = 0) const {
    const RawToken* t = peek(k);
    return t && t->kind == RK::Punct;
  }

  SyntaxNode leaf(const RawToken& t) const {
    SyntaxNode n;
    n.begin = t.begin;
    n.end = t.end;
    n.text = text_of(t);
    switch (t.kind) {
      case RK::Identifier:
        n.kind = is_keyword(n.text, lang_) ? NodeKind::Keyword : NodeKind::Identifier;
        break;
      case RK::Number: n.kind = NodeKind::NumberLiteral; break;
      case RK::String: n.kind = NodeKind::StringLiteral; break;
      case RK::CharLit: n.kind = NodeKind::CharLiteral; break;
      case RK::Punct: n.kind = NodeKind::Punctuation; break;
      case RK::DirectiveHead: n.kind = NodeKind::PragmaToken; break;
      case RK::Comment: n.kind = NodeKind::Comment; break;
      case RK::Other: n.kind = NodeKind::OtherToken; break;
    }
    return n;
  }

  void flush_comments(std::vector<SyntaxNode>& out) {
    while (pos_ < toks_.size() && toks_[pos_].kind == RK::Comment) {
      out.push_back(leaf(toks_[pos_]));
      ++pos_;
    }
  }

  // Consume the next non-comment token as a leaf of `out`.
  void take(std::vector<SyntaxNode>& out) {
    flush_comments(out);
    if (raw_eof()) return;
    out.push_back(leaf(toks_[pos_]));
    ++pos_;
  }

  // Consume the next token when it matches; no-op otherwise.
  bool take_if(std::vector<SyntaxNode>& out, const char* text) {
    if (!at(text)) return false;
    take(out);
    return true;
  }

  void finish(SyntaxNode& node) {
    if (node.children.empty()) {
      uint32_t p = raw_eof() ? static_cast<uint32_t>(src_.size()) : toks_[pos_].begin;
      node.begin = node.end = p;
      return;
    }
    node.begin = node.children.front().begin;
    node.end = node.children.back().end;
  }

  SyntaxNode make(NodeKind kind, std::vector<SyntaxNode> children) {
    SyntaxNode n;
    n.kind = kind;
    n.children = std::move(children);
    finish(n);
    return n;
  }

  void ensure_progress(size_t before, std::vector<SyntaxNode>& out) {
    if (pos_ > before || raw_eof()) return;
    SyntaxNode err;
    err.kind = NodeKind::Error;
    take(err.children);
    finish(err);
    ++error_count_;
    out.push_back(std::move(err));
  }

  // Absorb tokens into an Error node until `;` (consumed) or a `}` / `)` /
  // EOF boundary (left in place).
  SyntaxNode error_sync() {
    ++error_count_;
    SyntaxNode err;
    err.kind = NodeKind::Error;
    while (!eof() && !at("}") && !at(")")) {
      bool stop = at(";");
      take(err.children);
      if (stop) break;
    }
    finish(err);
    return err;
  }

  void consume_balanced(std::vector<SyntaxNode>& out, const char* open, const char* close) {
    if (!at(open)) return;
    int depth = 0;
    size_t guard = 0;
    while (!eof() && guard++ < 100000) {
      bool is_open = at(open);
      bool is_close = at(close);
      take(out);
      if (is_open) ++depth;
      if (is_close && --depth == 0) break;
    }
  }

  // Balanced template argument list starting at '<'. Returns false (and
  // consumes nothing) when no matching '>' is found nearby, or a ';' or
  // brace intervenes — then '<' is a comparison.
  bool try_consume_template_args(std::vector<SyntaxNode>& out) {
    if (!at("<")) return false;
    int depth = 0;
    size_t steps = 0;
    for (size_t k = 0;; ++k) {
      const RawToken* t = peek(k);
      if (!t || ++steps > 64) return false;
      std::string txt = text_of(*t);
      if (txt == "<") ++depth;
      else if (txt == ">") {
        if (--depth == 0) break;
      } else if (txt == ">>") {
        depth -= 2;
        if (depth <= 0) break;
      } else if (txt == ";" || txt == "{" || txt == "}") {
        return false;
      }
    }
    // commit: consume through the closing token
    int d = 0;
    while (!eof()) {
      std::string txt = peek_text();
      bool done = false;
      if (txt == "<") ++d;
      else if (txt == ">") {
        done = (--d == 0);
      } else if (txt == ">>") {
        d -= 2;
        done = (d <= 0);
      }
      take(out);
      if (done) break;
    }
    return true;
  }

  // ---- top level --------------------------------------------------------

  void parse_external(std::vector<SyntaxNode>& out) {
    flush_comments(out);
    if (raw_eof()) return;
    const RawToken& t = toks_[pos_];

    if (t.kind == RK::DirectiveHead && t.directive >= 0) {
      out.push_back(parse_directive());
      return;
    }
    if (at_kw("namespace")) {
      out.push_back(parse_namespace());
      return;
    }
    if (at_kw("extern") && peek(1) && peek(1)->kind == RK::String) {
      out.push_back(parse_linkage());
      return;
    }
    if (at_kw("template")) {
      out.push_back(parse_template());
      return;
    }
    if (at_kw("using")) {
      out.push_back(parse_simple_to_semicolon(NodeKind::Declaration));
      return;
    }
    if (at_kw("static_assert") || at_kw("_Static_assert")) {
      out.push_back(parse_simple_to_semicolon(NodeKind::Declaration));
      return;
    }
    if (at(";")) {
      SyntaxNode n;
      n.kind = NodeKind::Declaration;
      take(n.children);
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at("}")) {
      out.push_back(error_node_one_token());
      return;
    }
    // statement keywords at file scope: fragments and generated snippets
    if (at_kw("for") || at_kw("while") || at_kw("if") || at_kw("do") || at_kw("switch") ||
        at_kw("return") || at_kw("break") || at_kw("continue") || at_kw("goto") ||
        at_kw("try")) {
      parse_statement(out);
      return;
    }
    out.push_back(parse_decl_or_function());
  }

  SyntaxNode error_node_one_token() {
    ++error_count_;
    SyntaxNode err;
    err.kind = NodeKind::Error;
    take(err.children);
    finish(err);
    return err;
  }

  SyntaxNode parse_directive() {
    const RawToken& head = toks_[pos_];
    std::string head_text = text_of(head);
    SyntaxNode n;
    n.kind = head_text == "#pragma" ? NodeKind::PragmaDirective : NodeKind::PreprocDirective;
    int32_t id = head.directive;
    while (!raw_eof() && toks_[pos_].directive == id) {
      n.children.push_back(leaf(toks_[pos_]));
      ++pos_;
    }
    finish(n);
    return n;
  }

  SyntaxNode parse_namespace() {
    SyntaxNode n;
    n.kind = NodeKind::NamespaceDefinition;
    take(n.children);  // namespace
    while (at_ident() || at("::")) take(n.children);
    if (at("{")) {
      take(n.children);
      while (!eof() && !at("}")) {
        size_t before = pos_;
        parse_external(n.children);
        ensure_progress(before, n.children);
      }
      take_if(n.children, "}");
    } else {
      // namespace alias or malformed; consume to ';'
      while (!eof() && !at(";") && !at("{") && !at("}")) take(n.children);
      take_if(n.children, ";");
    }
    finish(n);
    return n;
  }

  SyntaxNode parse_linkage() {
    SyntaxNode n;
    n.kind = NodeKind::LinkageSpecification;
    take(n.children);  // extern
    take(n.children);  // "C"
    if (at("{")) {
      take(n.children);
      while (!eof() && !at("}")) {
        size_t before = pos_;
        parse_external(n.children);
        ensure_progress(before, n.children);
      }
      take_if(n.children, "}");
    } else {
      size_t before = pos_;
      parse_external(n.children);
      ensure_progress(before, n.children);
    }
    finish(n);
    return n;
  }

  SyntaxNode parse_template() {
    SyntaxNode n;
    n.kind = NodeKind::TemplateDeclaration;
    take(n.children);  // template
    if (at("<")) consume_balanced_angles(n.children);
    size_t before = pos_;
    parse_external(n.children);
    ensure_progress(before, n.children);
    finish(n);
    return n;
  }

  void consume_balanced_angles(std::vector<SyntaxNode>& out) {
    int depth = 0;
    size_t guard = 0;
    while (!eof() && guard++ < 4096) {
      std::string txt = peek_text();
      bool done = false;
      if (txt == "<") ++depth;
      else if (txt == ">") {
        done = (--depth == 0);
      } else if (txt == ">>") {
        depth -= 2;
        done = (depth <= 0);
      } else if (txt == "{" || txt == ";") {
        break;  // malformed; bail before swallowing a body
      }
      take(out);
      if (done) break;
    }
  }

  SyntaxNode parse_simple_to_semicolon(NodeKind kind) {
    SyntaxNode n;
    n.kind = kind;
    take(n.children);  // the introducing keyword
    size_t guard = 0;
    while (!eof() && !at(";") && !at("}") && guard++ < 100000) {
      if (at("{")) {
        consume_balanced(n.children, "{", "}");
        continue;
      }
      take(n.children);
    }
    take_if(n.children, ";");
    finish(n);
    return n;
  }

  // ---- declarations -----------------------------------------------------

  struct SpecInfo {
    bool saw_type = false;
    bool any = false;
  };

  SpecInfo consume_specifiers(std::vector<SyntaxNode>& out) {
    SpecInfo info;
    for (;;) {
      flush_comments(out);
      const RawToken* t = peek();
      if (!t) break;
      if (t->kind != RK::Identifier) {
        if (at("::") && at_ident(1) && !info.saw_type && looks_like_type_here()) {
          consume_qualified_type(out);
          info.saw_type = info.any = true;
          continue;
        }
        break;
      }
      std::string txt = text_of(*t);
      if (is_keyword(txt, lang_)) {
        if (is_spec_keyword(txt)) {
          take(out);
          info.any = true;
          if (txt == "_Alignas") consume_balanced(out, "(", ")");
          continue;
        }
        if (is_type_keyword(txt)) {
          take(out);
          info.saw_type = info.any = true;
          continue;
        }
        if (txt == "struct" || txt == "class" || txt == "union") {
          out.push_back(parse_struct());
          info.saw_type = info.any = true;
          continue;
        }
        if (txt == "enum") {
          out.push_back(parse_enum());
          info.saw_type = info.any = true;
          continue;
        }
        if (txt == "decltype") {
          take(out);
          consume_balanced(out, "(", ")");
          info.saw_type = info.any = true;
          continue;
        }
        break;
      }
      // GNU attribute blocks and similar double-underscore extensions
      if (txt.rfind("__", 0) == 0 && at("(", 1)) {
        take(out);
        consume_balanced(out, "(", ")");
        info.any = true;
        continue;
      }
      if (!info.saw_type && looks_like_type_here()) {
        consume_qualified_type(out);
        info.saw_type = info.any = true;
        continue;
      }
      break;
    }
    return info;
  }

  // Whether the qualified identifier at the cursor reads as a type name:
  // it must be followed by another identifier, pointer/reference
  // punctuation, or a parenthesized pointer declarator.
  bool looks_like_type_here() const {
    size_t k = 0;
    if (at("::", k)) ++k;
    if (!at_ident(k)) return false;
    ++k;
    for (;;) {
      if (at("::", k) && at_ident(k + 1)) {
        k += 2;
        continue;
      }
      break;
    }
    // optional template arguments
    if (at("<", k)) {
      int depth = 0;
      size_t steps = 0;
      for (size_t j = k;; ++j) {
        const RawToken* t = peek(j);
        if (!t || ++steps > 64) return false;
        std::string txt = text_of(*t);
        if (txt == "<") ++depth;
        else if (txt == ">") {
          if (--depth == 0) {
            k = j + 1;
            break;
          }
        } else if (txt == ">>") {
          depth -= 2;
          if (depth <= 0) {
            k = j + 1;
            break;
          }
        } else if (txt == ";" || txt == "{" || txt == "}" || txt == ")") {
          return false;
        }
      }
      for (;;) {
        if (at("::", k) && at_ident(k + 1)) {
          k += 2;
          continue;
        }
        break;
      }
    }
    // skip cv qualifiers
    while (peek(k) && is_cv_keyword(peek_text(k))) ++k;
    if (at_ident(k)) return true;
    if (at("*", k) || at("&", k) || at("&&", k)) {
      size_t j = k;
      while (at("*", j) || at("&", j) || at("&&", j) ||
             (peek(j) && is_cv_keyword(peek_text(j)))) {
        ++j;
      }
      if (at_ident(j)) return true;
      if (at("(", j)) return true;  // int (*fp)(...)
      return false;
    }
    if (at("(", k) && at("*", k + 1)) return true;
    return false;
  }

  void consume_qualified_type(std::vector<SyntaxNode>& out) {
    if (at("::")) take(out);
    if (at_ident()) take(out);
    for (;;) {
      if (at("::") && at_ident(1)) {
        take(out);
        take(out);
        continue;
      }
      break;
    }
    if (at("<")) {
      if (try_consume_template_args(out)) {
        for (;;) {
          if (at("::") && at_ident(1)) {
            take(out);
            take(out);
            continue;
          }
          break;
        }
      }
    }
  }

  SyntaxNode parse_struct() {
    SyntaxNode n;
    n.kind = NodeKind::StructSpecifier;
    take(n.children);  // struct / class / union
    // one qualified tag name; `struct foo bar` leaves bar to the declarator
    if (at_ident()) {
      take(n.children);
      while (at("::") && at_ident(1)) {
        take(n.children);
        take(n.children);
      }
    }
    if (at("<")) try_consume_template_args(n.children);
    if (at(":")) {  // base clause
      size_t guard = 0;
      while (!eof() && !at("{") && !at(";") && guard++ < 4096) take(n.children);
    }
    if (at("{")) {
      take(n.children);
      while (!eof() && !at("}")) {
        size_t before = pos_;
        parse_member(n.children);
        ensure_progress(before, n.children);
      }
      take_if(n.children, "}");
    }
    finish(n);
    return n;
  }

  void parse_member(std::vector<SyntaxNode>& out) {
    flush_comments(out);
    if (raw_eof()) return;
    const RawToken& t = toks_[pos_];
    if (t.kind == RK::DirectiveHead && t.directive >= 0) {
      out.push_back(parse_directive());
      return;
    }
    if ((at_kw("public") || at_kw("private") || at_kw("protected")) && at(":", 1)) {
      SyntaxNode lab;
      lab.kind = NodeKind::LabeledStatement;
      take(lab.children);
      take(lab.children);
      finish(lab);
      out.push_back(std::move(lab));
      return;
    }
    parse_external(out);
  }

  SyntaxNode parse_enum() {
    SyntaxNode n;
    n.kind = NodeKind::EnumSpecifier;
    take(n.children);  // enum
    if (at_kw("class") || at_kw("struct")) take(n.children);
    if (at_ident()) take(n.children);
    if (at(":")) {
      size_t guard = 0;
      while (!eof() && !at("{") && !at(";") && guard++ < 256) take(n.children);
    }
    if (at("{")) {
      take(n.children);
      while (!eof() && !at("}")) {
        size_t before = pos_;
        flush_comments(n.children);
        if (at_ident()) take(n.children);
        if (at("=")) {
          take(n.children);
          n.children.push_back(parse_assignment());
        }
        if (at(",")) take(n.children);
        ensure_progress(before, n.children);
      }
      take_if(n.children, "}");
    }
    finish(n);
    return n;
  }

  // declarator classification helpers ------------------------------------

  static bool subtree_has_kind(const SyntaxNode& n, NodeKind kind, bool skip_params) {
    if (n.kind == kind) return true;
    if (skip_params && n.kind == NodeKind::ParameterList) return false;
    for (const auto& c : n.children) {
      if (subtree_has_kind(c, kind, skip_params)) return true;
    }
    return false;
  }

  static bool declarator_is_function(const SyntaxNode& d) {
    if (d.kind == NodeKind::FunctionDeclarator) return true;
    if (d.kind == NodeKind::Declarator || d.kind == NodeKind::PointerDeclarator) {
      for (const auto& c : d.children) {
        if (c.kind == NodeKind::FunctionDeclarator) return true;
      }
    }
    return false;
  }

  SyntaxNode parse_declarator(bool allow_abstract) {
    std::vector<SyntaxNode> prefix;
    while (at("*") || at("&") || at("&&")) {
      take(prefix);
      while (peek() && peek()->kind == RK::Identifier && is_cv_keyword(peek_text())) {
        take(prefix);
      }
    }

    SyntaxNode core;
    bool have_core = false;
    if (at("(") && (at("*", 1) || at("&", 1) || at("(", 1))) {
      SyntaxNode group;
      group.kind = NodeKind::Declarator;
      take(group.children);  // (
      group.children.push_back(parse_declarator(allow_abstract));
      take_if(group.children, ")");
      finish(group);
      core = std::move(group);
      have_core = true;
    } else if (at_kw("operator")) {
      SyntaxNode name;
      name.kind = NodeKind::Declarator;
      take(name.children);  // operator
      size_t guard = 0;
      while (!eof() && !at("(") && !at(";") && guard++ < 16) take(name.children);
      if (at("(") && at(")", 1) && at("(", 2)) {
        take(name.children);  // operator()
        take(name.children);
      }
      finish(name);
      core = std::move(name);
      have_core = true;
    } else if (at_ident() || at("::") || at("~")) {
      SyntaxNode name;
      name.kind = NodeKind::Declarator;
      if (at("~")) take(name.children);
      if (at("::")) take(name.children);
      if (at_ident()) take(name.children);
      for (;;) {
        if (at("::") && (at_ident(1) || at("~", 1))) {
          take(name.children);
          if (at("~")) take(name.children);
          if (at_ident()) take(name.children);
          continue;
        }
        break;
      }
      finish(name);
      if (name.children.size() == 1 && name.children[0].kind == NodeKind::Identifier) {
        core = std::move(name.children[0]);
      } else {
        core = std::move(name);
      }
      have_core = true;
    }
    // abstract declarators (or tolerated missing names) simply have no core

    for (;;) {
      if (at("[")) {
        SyntaxNode arr;
        arr.kind = NodeKind::ArrayDeclarator;
        if (have_core) arr.children.push_back(std::move(core));
        take(arr.children);  // [
        if (!at("]")) arr.children.push_back(parse_assignment());
        take_if(arr.children, "]");
        finish(arr);
        core = std::move(arr);
        have_core = true;
        continue;
      }
      if (at("(")) {
        SyntaxNode fn;
        fn.kind = NodeKind::FunctionDeclarator;
        if (have_core) fn.children.push_back(std::move(core));
        fn.children.push_back(parse_parameter_list());
        // trailing qualifiers
        for (;;) {
          if (at_kw("const") || at_kw("volatile") || at_kw("override") ||
              at_kw("final") || at("&") || at("&&")) {
            take(fn.children);
            continue;
          }
          if (at_kw("noexcept") || at_kw("throw")) {
            take(fn.children);
            if (at("(")) consume_balanced(fn.children, "(", ")");
            continue;
          }
          if (at_ident() && (at("override") || at("final"))) {
            take(fn.children);
            continue;
          }
          break;
        }
        if (at("->")) {  // trailing return type
          take(fn.children);
          size_t guard = 0;
          while (!eof() && !at("{") && !at(";") && !at(",") && !at(")") && !at("=") &&
                 guard++ < 64) {
            if (at("(")) {
              consume_balanced(fn.children, "(", ")");
              continue;
            }
            take(fn.children);
          }
        }
        finish(fn);
        core = std::move(fn);
        have_core = true;
        continue;
      }
      break;
    }

    if (!prefix.empty()) {
      SyntaxNode ptr;
      ptr.kind = NodeKind::PointerDeclarator;
      for (auto& p : prefix) ptr.children.push_back(std::move(p));
      if (have_core) ptr.children.push_back(std::move(core));
      finish(ptr);
      return ptr;
    }
    if (!have_core) {
      SyntaxNode empty;
      empty.kind = NodeKind::Declarator;
      finish(empty);
      return empty;
    }
    return core;
  }

  SyntaxNode parse_parameter_list() {
    SyntaxNode n;
    n.kind = NodeKind::ParameterList;
    take(n.children);  // (
    if (take_if(n.children, ")")) {
      finish(n);
      return n;
    }
    while (!eof() && !at(")")) {
      size_t before = pos_;
      flush_comments(n.children);
      if (at("...")) {
        take(n.children);
      } else {
        n.children.push_back(parse_parameter());
      }
      if (at(",")) take(n.children);
      ensure_progress(before, n.children);
    }
    take_if(n.children, ")");
    finish(n);
    return n;
  }

  SyntaxNode parse_parameter() {
    SyntaxNode n;
    n.kind = NodeKind::ParameterDeclaration;
    consume_specifiers(n.children);
    if (!at(",") && !at(")")) {
      n.children.push_back(parse_declarator(/*allow_abstract=*/true));
    }
    if (at("=")) {
      take(n.children);
      n.children.push_back(parse_assignment());
    }
    finish(n);
    return n;
  }

  SyntaxNode parse_decl_or_function() {
    SyntaxNode n;
    n.kind = NodeKind::Declaration;
    SpecInfo spec = consume_specifiers(n.children);
    flush_comments(n.children);

    if (at(";")) {  // e.g. `struct Foo { ... };`
      take(n.children);
      finish(n);
      return n;
    }
    if (spec.any && (at("{") || eof())) {
      // struct/enum specifier followed by something unexpected; close out
      if (at("{")) n.children.push_back(error_sync());
      finish(n);
      return n;
    }

    SyntaxNode decl = parse_declarator(/*allow_abstract=*/false);
    bool is_fn = declarator_is_function(decl);

    if (is_fn) {
      // constructor initializers / K&R parameter declarations / stray
      // attributes before the body
      std::vector<SyntaxNode> between;
      if (at(":")) {
        take(between);
        size_t guard = 0;
        while (!eof() && !at("{") && !at(";") && guard++ < 4096) {
          if (at("(")) {
            consume_balanced(between, "(", ")");
            continue;
          }
          if (at("<")) {
            if (!try_consume_template_args(between)) take(between);
            continue;
          }
          take(between);
        }
      } else if (!at("{") && !at(";") && !at(",") && !at("=")) {
        size_t guard = 0;
        while (!eof() && !at("{") && !at(";") && !at("}") && guard++ < 128) {
          if (at("(")) {
            consume_balanced(between, "(", ")");
            continue;
          }
          take(between);
        }
        if (!between.empty()) ++error_count_;
      }
      if (at("{")) {
        n.kind = NodeKind::FunctionDefinition;
        n.children.push_back(std::move(decl));
        for (auto& b : between) n.children.push_back(std::move(b));
        n.children.push_back(parse_compound());
        finish(n);
        return n;
      }
      for (auto& b : between) decl.children.push_back(std::move(b));
      finish(decl);
    }

    // plain declaration: one or more init-declarators
    bool first = true;
    for (;;) {
      SyntaxNode init;
      init.kind = NodeKind::InitDeclarator;
      init.children.push_back(first ? std::move(decl) : parse_declarator(false));
      first = false;
      if (at(":") && !is_fn) {  // bitfield width
        take(init.children);
        flush_comments(init.children);
        init.children.push_back(parse_assignment());
      }
      if (at("=")) {
        take(init.children);
        flush_comments(init.children);
        init.children.push_back(parse_initializer());
      } else if (at("{")) {  // C++ braced init
        init.children.push_back(parse_initializer_list());
      } else if (at("(") && spec.saw_type) {  // direct init
        SyntaxNode args;
        args.kind = NodeKind::ArgumentList;
        consume_balanced(args.children, "(", ")");
        finish(args);
        init.children.push_back(std::move(args));
      }
      finish(init);
      n.children.push_back(std::move(init));
      if (at(",")) {
        take(n.children);
        continue;
      }
      break;
    }
    if (!take_if(n.children, ";")) {
      n.children.push_back(error_sync());
    }
    finish(n);
    return n;
  }

  SyntaxNode parse_initializer() {
    if (at("{")) return parse_initializer_list();
    return parse_assignment();
  }

  SyntaxNode parse_initializer_list() {
    SyntaxNode n;
    n.kind = NodeKind::InitializerList;
    take(n.children);  // {
    while (!eof() && !at("}")) {
      size_t before = pos_;
      flush_comments(n.children);
      if (at(".") && at_ident(1) && at("=", 2)) {  // designated: .field = x
        take(n.children);
        take(n.children);
        take(n.children);
      } else if (at("[")) {  // designated: [idx] = x
        take(n.children);
        if (!at("]")) n.children.push_back(parse_assignment());
        take_if(n.children, "]");
        take_if(n.children, "=");
      }
      if (!at("}") && !at(",")) n.children.push_back(parse_initializer());
      if (at(",")) take(n.children);
      ensure_progress(before, n.children);
    }
    take_if(n.children, "}");
    finish(n);
    return n;
  }

  // ---- statements -------------------------------------------------------

  SyntaxNode parse_compound() {
    SyntaxNode n;
    n.kind = NodeKind::CompoundStatement;
    take(n.children);  // {
    while (!eof() && !at("}")) {
      size_t before = pos_;
      parse_statement(n.children);
      ensure_progress(before, n.children);
    }
    if (!take_if(n.children, "}")) ++error_count_;  // ran off the end
    finish(n);
    return n;
  }

  void parse_statement(std::vector<SyntaxNode>& out) {
    flush_comments(out);
    if (raw_eof()) return;
    const RawToken& t = toks_[pos_];

    if (t.kind == RK::DirectiveHead && t.directive >= 0) {
      out.push_back(parse_directive());
      return;
    }
    if (at("{")) {
      out.push_back(parse_compound());
      return;
    }
    if (at_kw("if")) {
      SyntaxNode n;
      n.kind = NodeKind::IfStatement;
      take(n.children);
      if (at_kw("constexpr")) take(n.children);
      if (take_if(n.children, "(")) {
        n.children.push_back(parse_expression());
        take_if(n.children, ")");
      }
      parse_statement(n.children);
      if (at_kw("else")) {
        take(n.children);
        parse_statement(n.children);
      }
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_kw("for")) {
      out.push_back(parse_for());
      return;
    }
    if (at_kw("while")) {
      SyntaxNode n;
      n.kind = NodeKind::WhileStatement;
      take(n.children);
      if (take_if(n.children, "(")) {
        n.children.push_back(parse_expression());
        take_if(n.children, ")");
      }
      parse_statement(n.children);
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_kw("do")) {
      SyntaxNode n;
      n.kind = NodeKind::DoStatement;
      take(n.children);
      parse_statement(n.children);
      if (at_kw("while")) {
        take(n.children);
        if (take_if(n.children, "(")) {
          n.children.push_back(parse_expression());
          take_if(n.children, ")");
        }
      }
      if (!take_if(n.children, ";")) n.children.push_back(error_sync());
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_kw("switch")) {
      SyntaxNode n;
      n.kind = NodeKind::SwitchStatement;
      take(n.children);
      if (take_if(n.children, "(")) {
        n.children.push_back(parse_expression());
        take_if(n.children, ")");
      }
      parse_statement(n.children);
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_kw("case")) {
      SyntaxNode n;
      n.kind = NodeKind::CaseStatement;
      take(n.children);
      n.children.push_back(parse_assignment());
      if (at("...")) {  // GNU case range
        take(n.children);
        n.children.push_back(parse_assignment());
      }
      take_if(n.children, ":");
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_kw("default") && at(":", 1)) {
      SyntaxNode n;
      n.kind = NodeKind::CaseStatement;
      take(n.children);
      take(n.children);
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_kw("return")) {
      SyntaxNode n;
      n.kind = NodeKind::ReturnStatement;
      take(n.children);
      if (!at(";")) n.children.push_back(parse_expression());
      if (!take_if(n.children, ";")) n.children.push_back(error_sync());
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_kw("break") || at_kw("continue")) {
      SyntaxNode n;
      n.kind = at_kw("break") ? NodeKind::BreakStatement : NodeKind::ContinueStatement;
      take(n.children);
      if (!take_if(n.children, ";")) n.children.push_back(error_sync());
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_kw("goto")) {
      SyntaxNode n;
      n.kind = NodeKind::GotoStatement;
      take(n.children);
      if (at_ident()) take(n.children);
      if (!take_if(n.children, ";")) n.children.push_back(error_sync());
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_kw("try")) {
      SyntaxNode n;
      n.kind = NodeKind::TryStatement;
      take(n.children);
      if (at("{")) n.children.push_back(parse_compound());
      while (at_kw("catch")) {
        SyntaxNode c;
        c.kind = NodeKind::CatchClause;
        take(c.children);
        if (at("(")) consume_balanced(c.children, "(", ")");
        if (at("{")) c.children.push_back(parse_compound());
        finish(c);
        n.children.push_back(std::move(c));
      }
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_kw("namespace")) {
      out.push_back(parse_namespace());
      return;
    }
    if (at_kw("using") || at_kw("static_assert") || at_kw("_Static_assert")) {
      out.push_back(parse_simple_to_semicolon(NodeKind::Declaration));
      return;
    }
    if (at(";")) {
      SyntaxNode n;
      n.kind = NodeKind::ExpressionStatement;
      take(n.children);
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (at_ident() && at(":", 1) && !at("::", 1)) {
      SyntaxNode n;
      n.kind = NodeKind::LabeledStatement;
      take(n.children);
      take(n.children);
      parse_statement(n.children);
      finish(n);
      out.push_back(std::move(n));
      return;
    }
    if (starts_declaration()) {
      out.push_back(parse_decl_or_function());
      return;
    }
    SyntaxNode n;
    n.kind = NodeKind::ExpressionStatement;
    n.children.push_back(parse_expression());
    if (!take_if(n.children, ";")) n.children.push_back(error_sync());
    finish(n);
    out.push_back(std::move(n));
  }

  bool starts_declaration() const {
    const RawToken* t = peek();
    if (!t || t->kind != RK::Identifier) {
      return at("::") && at_ident(1) && looks_like_type_here();
    }
    std::string txt = text_of(*t);
    if (is_keyword(txt, lang_)) {
      return is_type_keyword(txt) || is_spec_keyword(txt) || txt == "struct" ||
             txt == "class" || txt == "union" || txt == "enum" || txt == "decltype" ||
             txt == "template";
    }
    return looks_like_type_here();
  }

  SyntaxNode parse_for() {
    SyntaxNode n;
    n.kind = NodeKind::ForStatement;
    take(n.children);  // for
    if (take_if(n.children, "(")) {
      bool range_for = false;
      if (at(";")) {
        take(n.children);
      } else if (starts_declaration()) {
        // declaration init: `int i = 0;` or range-for `auto x : xs`
        SyntaxNode d;
        d.kind = NodeKind::Declaration;
        consume_specifiers(d.children);
        SyntaxNode declr = parse_declarator(false);
        if (at(":")) {
          SyntaxNode init;
          init.kind = NodeKind::InitDeclarator;
          init.children.push_back(std::move(declr));
          finish(init);
          d.children.push_back(std::move(init));
          finish(d);
          n.children.push_back(std::move(d));
          take(n.children);  // :
          flush_comments(n.children);
          n.children.push_back(parse_expression());
          range_for = true;
        } else {
          bool first = true;
          for (;;) {
            SyntaxNode init;
            init.kind = NodeKind::InitDeclarator;
            init.children.push_back(first ? std::move(declr) : parse_declarator(false));
            first = false;
            if (at("=")) {
              take(init.children);
              flush_comments(init.children);
              init.children.push_back(parse_initializer());
            } else if (at("{")) {
              init.children.push_back(parse_initializer_list());
            }
            finish(init);
            d.children.push_back(std::move(init));
            if (at(",")) {
              take(d.children);
              continue;
            }
            break;
          }
          take_if(d.children, ";");
          finish(d);
          n.children.push_back(std::move(d));
        }
      } else {
        flush_comments(n.children);
        n.children.push_back(parse_expression());
        if (!take_if(n.children, ";") && at(":")) {  // range-for over expression
          take(n.children);
          flush_comments(n.children);
          n.children.push_back(parse_expression());
          range_for = true;
        }
      }
      if (!range_for) {
        if (!at(";") && !at(")")) {
          flush_comments(n.children);
          n.children.push_back(parse_expression());
        }
        take_if(n.children, ";");
        if (!at(")")) {
          flush_comments(n.children);
          n.children.push_back(parse_expression());
        }
      }
      take_if(n.children, ")");
    }
    parse_statement(n.children);
    finish(n);
    return n;
  }

  // ---- expressions ------------------------------------------------------

  SyntaxNode parse_expression() {
    SyntaxNode left = parse_assignment();
    while (at(",")) {
      SyntaxNode n;
      n.kind = NodeKind::CommaExpression;
      n.children.push_back(std::move(left));
      take(n.children);
      n.children.push_back(parse_assignment());
      finish(n);
      left = std::move(n);
    }
    return left;
  }

  SyntaxNode parse_assignment() {
    SyntaxNode left = parse_conditional();
    if (at_punct() && is_assign_op(peek_text())) {
      SyntaxNode n;
      n.kind = NodeKind::AssignmentExpression;
      n.children.push_back(std::move(left));
      take(n.children);
      n.children.push_back(parse_assignment());
      finish(n);
      return n;
    }
    return left;
  }

  SyntaxNode parse_conditional() {
    SyntaxNode cond = parse_binary(0);
    if (at("?")) {
      SyntaxNode n;
      n.kind = NodeKind::ConditionalExpression;
      n.children.push_back(std::move(cond));
      take(n.children);
      n.children.push_back(parse_assignment());
      take_if(n.children, ":");
      n.children.push_back(parse_assignment());
      finish(n);
      return n;
    }
    return cond;
  }

  SyntaxNode parse_binary(int min_prec) {
    SyntaxNode left = parse_unary();
    for (;;) {
      if (!at_punct()) break;
      std::string op = peek_text();
      int prec = binary_precedence(op);
      if (prec < 0 || prec < min_prec) break;
      SyntaxNode n;
      n.kind = NodeKind::BinaryExpression;
      n.children.push_back(std::move(left));
      take(n.children);
      n.children.push_back(parse_binary(prec + 1));
      finish(n);
      left = std::move(n);
    }
    return left;
  }

  SyntaxNode parse_unary() {
    if (at("+") || at("-") || at("!") || at("~") || at("*") || at("&") || at("++") ||
        at("--") || at_kw("sizeof") || at_kw("not") || at_kw("compl") || at_kw("co_await") ||
        at_kw("alignof") || at_kw("_Alignof") || at_kw("new") || at_kw("delete") ||
        at_kw("throw") || at("::")) {
      SyntaxNode n;
      n.kind = NodeKind::UnaryExpression;
      bool was_throw = at_kw("throw");
      bool was_delete = at_kw("delete");
      take(n.children);
      if (was_delete && at("[")) {
        take(n.children);
        take_if(n.children, "]");
      }
      if (was_throw && (at(";") || at(")") || at(","))) {
        finish(n);
        return n;
      }
      n.children.push_back(parse_unary());
      finish(n);
      return n;
    }
    return parse_postfix();
  }

  SyntaxNode parse_postfix() {
    SyntaxNode e = parse_primary();
    for (;;) {
      if (at("(")) {
        SyntaxNode call;
        call.kind = NodeKind::CallExpression;
        call.children.push_back(std::move(e));
        call.children.push_back(parse_argument_list());
        finish(call);
        e = std::move(call);
        continue;
      }
      if (at("[")) {
        SyntaxNode sub;
        sub.kind = NodeKind::SubscriptExpression;
        sub.children.push_back(std::move(e));
        take(sub.children);
        if (!at("]")) sub.children.push_back(parse_expression());
        take_if(sub.children, "]");
        finish(sub);
        e = std::move(sub);
        continue;
      }
      if (at(".") || at("->") || at("::")) {
        SyntaxNode mem;
        mem.kind = NodeKind::MemberExpression;
        mem.children.push_back(std::move(e));
        take(mem.children);
        if (at("~")) take(mem.children);
        if (at_ident() || at_kw("operator")) take(mem.children);
        finish(mem);
        e = std::move(mem);
        continue;
      }
      if (at("++") || at("--")) {
        SyntaxNode upd;
        upd.kind = NodeKind::UpdateExpression;
        upd.children.push_back(std::move(e));
        take(upd.children);
        finish(upd);
        e = std::move(upd);
        continue;
      }
      break;
    }
    return e;
  }

  SyntaxNode parse_argument_list() {
    SyntaxNode n;
    n.kind = NodeKind::ArgumentList;
    take(n.children);  // (
    while (!eof() && !at(")")) {
      size_t before = pos_;
      flush_comments(n.children);
      if (!at(")") && !at(",")) n.children.push_back(parse_assignment());
      if (at(",")) take(n.children);
      ensure_progress(before, n.children);
    }
    take_if(n.children, ")");
    finish(n);
    return n;
  }

  // Conservative cast detection for `( ... ) expr`.
  bool looks_like_cast() const {
    if (!at("(")) return false;
    size_t k = 1;
    bool any_type_word = false;
    bool only_type_tokens = true;
    bool single_plain_ident = true;
    size_t words = 0;
    for (; k < 64; ++k) {
      const RawToken* t = peek(k);
      if (!t) return false;
      std::string txt = text_of(*t);
      if (txt == ")") break;
      if (t->kind == RK::Identifier) {
        if (is_keyword(txt, lang_)) {
          if (is_type_keyword(txt) || is_cv_keyword(txt) || txt == "struct" ||
              txt == "union" || txt == "enum") {
            any_type_word = true;
            single_plain_ident = false;
          } else {
            only_type_tokens = false;
          }
        } else {
          any_type_word = true;
          ++words;
          if (words > 1) single_plain_ident = false;
        }
        continue;
      }
      if (txt == "*" || txt == "&" || txt == "::" || txt == "[" || txt == "]" ||
          txt == "<" || txt == ">" || txt == ",") {
        if (txt != "::") single_plain_ident = false;
        continue;
      }
      only_type_tokens = false;
    }
    if (!only_type_tokens || !any_type_word || k >= 64) return false;
    const RawToken* after = peek(k + 1);
    if (!after) return false;
    std::string nxt = text_of(*after);
    if (after->kind == RK::Number || after->kind == RK::String ||
        after->kind == RK::CharLit) {
      return true;
    }
    if (after->kind == RK::Identifier) {
      if (is_keyword(nxt, lang_)) return nxt == "sizeof" || is_type_keyword(nxt);
      return true;
    }
    if (single_plain_ident) {
      // `(x)(y)` reads as a cast; `(x) + 1` stays a parenthesized expr
      return nxt == "(";
    }
    return nxt == "(" || nxt == "-" || nxt == "+" || nxt == "*" || nxt == "&" ||
           nxt == "!" || nxt == "~";
  }

  SyntaxNode parse_primary() {
    flush_comments_into_limbo();
    const RawToken* t = peek();
    if (!t) {
      ++error_count_;
      SyntaxNode err;
      err.kind = NodeKind::Error;
      finish(err);
      return err;
    }

    if (t->kind == RK::Number || t->kind == RK::CharLit) {
      SyntaxNode n;
      take_single(n);
      return n;
    }
    if (t->kind == RK::String) {
      SyntaxNode first;
      take_single(first);
      if (peek() && peek()->kind == RK::String) {
        SyntaxNode cat;
        cat.kind = NodeKind::ConcatenatedString;
        cat.children.push_back(std::move(first));
        while (peek() && peek()->kind == RK::String) take(cat.children);
        finish(cat);
        return cat;
      }
      return first;
    }
    if (t->kind == RK::Identifier) {
      std::string txt = text_of(*t);
      if (!is_keyword(txt, lang_)) {
        SyntaxNode n;
        take_single(n);
        return n;
      }
      if (txt == "true" || txt == "false" || txt == "nullptr" || txt == "this" ||
          is_type_keyword(txt)) {
        SyntaxNode n;
        take_single(n);
        return n;
      }
      if (txt == "static_cast" || txt == "dynamic_cast" || txt == "const_cast" ||
          txt == "reinterpret_cast") {
        SyntaxNode n;
        n.kind = NodeKind::CastExpression;
        take(n.children);
        if (at("<")) {
          if (!try_consume_template_args(n.children)) take(n.children);
        }
        if (at("(")) {
          take(n.children);
          n.children.push_back(parse_expression());
          take_if(n.children, ")");
        }
        finish(n);
        return n;
      }
      // stray keyword in expression position
      SyntaxNode err = error_node_one_token();
      return err;
    }
    if (at("(")) {
      if (looks_like_cast()) {
        SyntaxNode n;
        n.kind = NodeKind::CastExpression;
        take(n.children);  // (
        while (!eof() && !at(")")) take(n.children);
        take_if(n.children, ")");
        n.children.push_back(parse_unary());
        finish(n);
        return n;
      }
      SyntaxNode n;
      n.kind = NodeKind::ParenExpression;
      take(n.children);
      if (!at(")")) n.children.push_back(parse_expression());
      take_if(n.children, ")");
      finish(n);
      return n;
    }
    if (at("{")) return parse_initializer_list();
    if (at("[") && lang_ == Language::Cpp) {
      SyntaxNode n;
      n.kind = NodeKind::LambdaExpression;
      consume_balanced(n.children, "[", "]");
      if (at("(")) n.children.push_back(parse_parameter_list());
      while (at_kw("mutable") || at_kw("constexpr") || at_kw("noexcept")) take(n.children);
      if (at("->")) {
        take(n.children);
        size_t guard = 0;
        while (!eof() && !at("{") && !at(";") && guard++ < 32) take(n.children);
      }
      if (at("{")) n.children.push_back(parse_compound());
      finish(n);
      return n;
    }
    return error_node_one_token();
  }

  // Comments directly before a primary expression attach to the nearest
  // enclosing node; park them so `take_single` below stays a leaf.
  std::vector<SyntaxNode> limbo_;

  void flush_comments_into_limbo() { flush_comments(limbo_); }

  void take_single(SyntaxNode& n) {
    flush_comments(limbo_);
    if (raw_eof()) {
      n.kind = NodeKind::Error;
      finish(n);
      return;
    }
    n = leaf(toks_[pos_]);
    ++pos_;
  }
};

}  // namespace

SyntaxTree parse(std::string source, Language lang, const ParseOptions& opts) {
  SyntaxTree tree;
  tree.replaced_invalid_utf8 = detail::sanitize_utf8(source);
  tree.source = std::move(source);
  tree.language = lang;
  if (opts.reject_empty && tree.source.empty()) {
    throw ParseFailure("empty input rejected by configuration");
  }
  Parser parser(tree.source, lang);
  tree.root = parser.run();
  tree.error_count = parser.error_count();
  return tree;
}

}  // namespace hcp::syntax
