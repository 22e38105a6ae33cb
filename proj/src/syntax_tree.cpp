#include "hcp/syntax/tree.hpp"

namespace hcp::syntax {

const char* kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::TranslationUnit: return "translation-unit";
    case NodeKind::PreprocDirective: return "preproc-directive";
    case NodeKind::PragmaDirective: return "pragma-directive";
    case NodeKind::FunctionDefinition: return "function-definition";
    case NodeKind::ParameterList: return "parameter-list";
    case NodeKind::ParameterDeclaration: return "parameter-declaration";
    case NodeKind::Declaration: return "declaration";
    case NodeKind::InitDeclarator: return "init-declarator";
    case NodeKind::Declarator: return "declarator";
    case NodeKind::PointerDeclarator: return "pointer-declarator";
    case NodeKind::ArrayDeclarator: return "array-declarator";
    case NodeKind::FunctionDeclarator: return "function-declarator";
    case NodeKind::StructSpecifier: return "struct-specifier";
    case NodeKind::EnumSpecifier: return "enum-specifier";
    case NodeKind::NamespaceDefinition: return "namespace-definition";
    case NodeKind::LinkageSpecification: return "linkage-specification";
    case NodeKind::TemplateDeclaration: return "template-declaration";
    case NodeKind::CompoundStatement: return "compound-statement";
    case NodeKind::IfStatement: return "if-statement";
    case NodeKind::ForStatement: return "for-statement";
    case NodeKind::WhileStatement: return "while-statement";
    case NodeKind::DoStatement: return "do-statement";
    case NodeKind::SwitchStatement: return "switch-statement";
    case NodeKind::TryStatement: return "try-statement";
    case NodeKind::CatchClause: return "catch-clause";
    case NodeKind::CaseStatement: return "case-statement";
    case NodeKind::LabeledStatement: return "labeled-statement";
    case NodeKind::ReturnStatement: return "return-statement";
    case NodeKind::BreakStatement: return "break-statement";
    case NodeKind::ContinueStatement: return "continue-statement";
    case NodeKind::GotoStatement: return "goto-statement";
    case NodeKind::ExpressionStatement: return "expression-statement";
    case NodeKind::BinaryExpression: return "binary-expression";
    case NodeKind::UnaryExpression: return "unary-expression";
    case NodeKind::UpdateExpression: return "update-expression";
    case NodeKind::AssignmentExpression: return "assignment-expression";
    case NodeKind::ConditionalExpression: return "conditional-expression";
    case NodeKind::CallExpression: return "call-expression";
    case NodeKind::ArgumentList: return "argument-list";
    case NodeKind::SubscriptExpression: return "subscript-expression";
    case NodeKind::MemberExpression: return "member-expression";
    case NodeKind::ParenExpression: return "paren-expression";
    case NodeKind::CastExpression: return "cast-expression";
    case NodeKind::CommaExpression: return "comma-expression";
    case NodeKind::InitializerList: return "initializer-list";
    case NodeKind::ConcatenatedString: return "concatenated-string";
    case NodeKind::LambdaExpression: return "lambda-expression";
    case NodeKind::Error: return "error";
    case NodeKind::Identifier: return "identifier";
    case NodeKind::NumberLiteral: return "number-literal";
    case NodeKind::StringLiteral: return "string-literal";
    case NodeKind::CharLiteral: return "char-literal";
    case NodeKind::Keyword: return "keyword";
    case NodeKind::Punctuation: return "punctuation";
    case NodeKind::PragmaToken: return "pragma";
    case NodeKind::OtherToken: return "other";
    case NodeKind::Comment: return "comment";
  }
  return "error";
}

bool contains_error(const SyntaxNode& node) {
  if (node.kind == NodeKind::Error) return true;
  for (const auto& child : node.children) {
    if (contains_error(child)) return true;
  }
  return false;
}

bool is_omp_pragma(const SyntaxNode& node) {
  if (node.kind != NodeKind::PragmaDirective) return false;
  if (node.children.size() < 2) return false;
  return node.children[0].text == "#pragma" && node.children[1].text == "omp";
}

}  // namespace hcp::syntax
