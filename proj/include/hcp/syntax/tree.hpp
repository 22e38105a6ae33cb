#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcp/syntax/token.hpp"

namespace hcp::syntax {

enum class NodeKind : uint8_t {
  // interior nodes
  TranslationUnit,
  PreprocDirective,
  PragmaDirective,
  FunctionDefinition,
  ParameterList,
  ParameterDeclaration,
  Declaration,
  InitDeclarator,
  Declarator,
  PointerDeclarator,
  ArrayDeclarator,
  FunctionDeclarator,
  StructSpecifier,
  EnumSpecifier,
  NamespaceDefinition,
  LinkageSpecification,
  TemplateDeclaration,
  CompoundStatement,
  IfStatement,
  ForStatement,
  WhileStatement,
  DoStatement,
  SwitchStatement,
  TryStatement,
  CatchClause,
  CaseStatement,
  LabeledStatement,
  ReturnStatement,
  BreakStatement,
  ContinueStatement,
  GotoStatement,
  ExpressionStatement,
  BinaryExpression,
  UnaryExpression,
  UpdateExpression,
  AssignmentExpression,
  ConditionalExpression,
  CallExpression,
  ArgumentList,
  SubscriptExpression,
  MemberExpression,
  ParenExpression,
  CastExpression,
  CommaExpression,
  InitializerList,
  ConcatenatedString,
  LambdaExpression,
  Error,
  // leaves
  Identifier,
  NumberLiteral,
  StringLiteral,
  CharLiteral,
  Keyword,
  Punctuation,
  PragmaToken,
  OtherToken,
  Comment,
};

const char* kind_name(NodeKind kind);

struct SyntaxNode {
  NodeKind kind = NodeKind::Error;
  uint32_t begin = 0;  // byte span [begin, end) into the source
  uint32_t end = 0;
  std::string text;  // verbatim source slice; leaves only
  std::vector<SyntaxNode> children;

  bool is_leaf() const { return children.empty(); }
};

struct SyntaxTree {
  SyntaxNode root;
  std::string source;
  Language language = Language::C;
  int error_count = 0;
  bool replaced_invalid_utf8 = false;
};

struct ParseOptions {
  bool reject_empty = false;
};

/// Parse C or C++ source into a concrete syntax tree. Every token of the
/// source appears as a leaf, comments included; the root span covers the
/// whole source. Malformed stretches become Error nodes (counted in
/// error_count), never a failed parse. Invalid UTF-8 bytes are replaced
/// with U+FFFD and flagged on the tree.
SyntaxTree parse(std::string source, Language lang, const ParseOptions& opts = {});

/// Pre-order traversal.
template <class F>
void visit(const SyntaxNode& node, F&& fn) {
  fn(node);
  for (const auto& child : node.children) visit(child, fn);
}

/// True when the node or any descendant is an Error node.
bool contains_error(const SyntaxNode& node);

/// True for `#pragma omp ...` directive nodes.
bool is_omp_pragma(const SyntaxNode& node);

}  // namespace hcp::syntax
